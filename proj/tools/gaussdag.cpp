// gaussdag: simulate Gaussian DAG data, sample the DAG posterior, and
// summarize chains. Exit codes: 0 ok, 1 I/O, 2 validation, 3 numeric failure.

#include "gaussdag/gaussdag.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gaussdag;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr const char* kManifestSchema = "gaussdag-manifest/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n)) throw UsageError("manifest U is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

std::vector<int> parse_labels(const std::string& text, int q) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int label = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      if (label < 1 || label > q) throw UsageError("node label " + item + " is outside 1.." + std::to_string(q));
      out.push_back(label - 1);
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse node label '" + item + "'");
    }
  }
  return out;
}

Chain load_chain(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("chain file not found: " + path.string());
  return io::read_chain(path);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int q = 8;
  double w = 0.2;
  double lmin = 0.1;
  double lmax = 1.0;
  double dvar = 1.0;
  std::size_t n = 200;
  std::optional<std::uint64_t> seed;
  bool header = false;
  std::string out_dir;
};

void cmd_simulate(const SimulateArgs& a) {
  if (a.q < 1) throw UsageError("--q must be at least 1");
  if (a.n < 1) throw UsageError("--n must be at least 1");
  if (!(a.w >= 0.0 && a.w <= 1.0)) throw UsageError("--w must lie in [0, 1]");
  if (!(a.lmin <= a.lmax)) throw UsageError("--lmin must not exceed --lmax");
  if (!(a.dvar > 0.0)) throw UsageError("--dvar must be positive");
  const std::uint64_t seed = a.seed.value_or(entropy_seed());
  Rng rng(seed);
  const Dag dag = rand_dag(a.q, a.w, rng);
  const CholParams params = rand_sem_params(dag, a.lmin, a.lmax, Vector::Constant(a.q, a.dvar), rng);
  const Dataset data = sample_data(a.n, params, rng);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  io::write_adjacency_csv(dir / "dag.csv", dag.adjacency());
  io::write_matrix_csv(dir / "L.csv", params.L());
  io::write_matrix_csv(dir / "D.csv", params.D());
  io::write_dataset_csv(dir / "data.csv", data.X, a.header);

  json m;
  m["schema"] = kManifestSchema;
  m["command"] = "simulate";
  m["tool_version"] = kVersion;
  m["seed"] = seed;
  m["params"] = {{"q", a.q}, {"w", a.w}, {"lmin", a.lmin}, {"lmax", a.lmax}, {"dvar", a.dvar}, {"n", a.n}};
  m["data"] = {{"path", "data.csv"}, {"n", a.n}, {"q", a.q},
               {"fnv1a64", io::hex64(io::fnv1a64(io::read_file(dir / "data.csv")))}};
  io::write_file(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- learn

struct LearnArgs {
  std::string data;
  std::size_t S = 5000;
  std::size_t burn = 1000;
  std::optional<double> a;
  std::optional<std::string> U;
  double w = 0.1;
  bool fast = false;
  bool collapse = false;
  bool save_memory = false;
  std::optional<std::uint64_t> seed;
  std::size_t chains = 1;
  std::optional<std::string> init;
  std::optional<std::string> replay;
  std::string out_dir;
};

void apply_replay(LearnArgs& a, json& hyper_json) {
  const json m = json::parse(io::read_file(*a.replay));
  if (m.value("schema", "") != kManifestSchema || m.value("command", "") != "learn")
    throw UsageError("--replay expects a learn manifest with schema " + std::string(kManifestSchema));
  const json& c = m.at("config");
  a.S = c.at("S").get<std::size_t>();
  a.burn = c.at("burn").get<std::size_t>();
  a.w = c.at("w").get<double>();
  a.fast = c.at("fast").get<bool>();
  a.collapse = c.at("collapse").get<bool>();
  a.save_memory = c.at("save_memory").get<bool>();
  a.seed = c.at("seed").get<std::uint64_t>();
  a.chains = c.value("chains", std::size_t{1});
  hyper_json = m.at("hyper");
}

void cmd_learn(LearnArgs a) {
  json replay_hyper;
  if (a.replay) apply_replay(a, replay_hyper);

  const fs::path data_path(a.data);
  if (!fs::exists(data_path)) throw UsageError("data file not found: " + a.data);
  const std::string data_bytes = io::read_file(data_path);
  Dataset data = Dataset::from_matrix(io::parse_matrix_csv(data_bytes));
  const int q = data.q();
  if (q < 1 || data.n() < 1) throw UsageError("data file has no observations");

  if (a.S > 0 && a.chains == 0) throw UsageError("--chains must be at least 1");

  double shape = a.a.value_or(q);
  Matrix U = Matrix::Identity(q, q);
  json u_json = {{"kind", "scalar"}, {"value", 1.0}};
  if (a.replay) {
    shape = replay_hyper.at("a").get<double>();
    U = matrix_from_json(replay_hyper.at("U").at("matrix"));
    u_json = replay_hyper.at("U");
  } else if (a.U) {
    double c = 0.0;
    std::size_t used = 0;
    bool scalar = false;
    try {
      c = std::stod(*a.U, &used);
      scalar = used == a.U->size();
    } catch (const std::logic_error&) {
    }
    if (scalar) {
      U = c * Matrix::Identity(q, q);
      u_json = {{"kind", "scalar"}, {"value", c}};
    } else {
      if (!fs::exists(*a.U)) throw UsageError("--U is neither a number nor an existing matrix file: " + *a.U);
      U = io::read_matrix_csv(*a.U);
      u_json = {{"kind", "file"}, {"source", *a.U}};
    }
  }
  if (U.rows() != q || U.cols() != q) throw UsageError("U must be " + std::to_string(q) + " x " + std::to_string(q));
  if (!(shape > q - 1.0)) throw HyperError("a must satisfy a > q - 1 (got a = " + io::format_double(shape) + ", q = " + std::to_string(q) + ")");
  DagWishartHyper hyper;
  try {
    hyper = DagWishartHyper::make(shape, U);
  } catch (const NotSpdError& e) {
    throw UsageError(std::string("U must be symmetric positive definite: ") + e.what());
  }
  u_json["matrix"] = matrix_json(hyper.U);

  McmcConfig config;
  config.S = a.S;
  config.burn = a.burn;
  config.w = a.w;
  config.fast = a.fast;
  config.collapse = a.collapse;
  config.save_memory = a.save_memory;
  config.seed = a.seed.value_or(entropy_seed());
  if (a.init) {
    const fs::path p(*a.init);
    config.init = p.extension() == ".json" ? io::dag_from_json(io::read_file(p)) : io::read_dag_csv(p);
  }
  if (!(config.w > 0.0 && config.w < 1.0)) throw UsageError("--w must lie strictly between 0 and 1");

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Chain> chains = run_chains(config, data, hyper, a.chains);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json files = json::array();
  std::uint64_t accepted = 0, proposed = 0;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const std::string name = chains.size() == 1 ? "chain.gdc" : "chain_" + std::to_string(k + 1) + ".gdc";
    const std::string bytes = encode_compact(chains[k]);
    io::write_file(dir / name, bytes);
    files.push_back({{"path", name}, {"seed", chains[k].config().seed}, {"fnv1a64", io::hex64(io::fnv1a64(bytes))},
                     {"acceptance_rate", chains[k].acceptance_rate()}});
    accepted += chains[k].accept_count;
    proposed += chains[k].proposals.size();
  }
  if (chains.size() > 1 && config.S > 0) {
    Matrix merged = Matrix::Zero(q, q);
    for (const auto& c : chains) merged += edge_probabilities(c);
    io::write_matrix_csv(dir / "edgeprobs_merged.csv", merged / static_cast<double>(chains.size()));
  }

  json m;
  m["schema"] = kManifestSchema;
  m["command"] = "learn";
  m["tool_version"] = kVersion;
  m["config"] = {{"S", config.S},       {"burn", config.burn},         {"w", config.w},
                 {"fast", config.fast}, {"collapse", config.collapse}, {"save_memory", config.save_memory},
                 {"seed", config.seed}, {"chains", a.chains}};
  if (config.init) m["config"]["init"] = json::parse(io::dag_to_json(*config.init));
  m["hyper"] = {{"a", shape}, {"U", u_json}};
  m["data"] = {{"path", a.data}, {"n", data.n()}, {"q", q}, {"fnv1a64", io::hex64(io::fnv1a64(data_bytes))}};
  m["wall_clock_seconds"] = seconds;
  m["acceptance_rate"] = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  m["chains"] = files;
  io::write_file(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- summarize

struct SummarizeArgs {
  std::string chain;
  std::string out_dir;
  bool edgeprobs = false;
  bool map = false;
  bool mpm = false;
};

void cmd_summarize(SummarizeArgs a) {
  const Chain chain = load_chain(a.chain);
  if (chain.empty()) throw UsageError("chain has no retained states");
  if (!a.edgeprobs && !a.map && !a.mpm) a.edgeprobs = a.map = a.mpm = true;
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  if (a.edgeprobs) io::write_matrix_csv(dir / "edgeprobs.csv", edge_probabilities(chain));
  if (a.map) io::write_adjacency_csv(dir / "map.csv", map_dag(chain).adjacency());
  if (a.mpm) io::write_adjacency_csv(dir / "mpm.csv", mpm_dag(chain));
}

// ---------------------------------------------------------------- causal

struct CausalArgs {
  std::string chain;
  std::string targets;
  int response = 1;
  bool bma = false;
  std::string out_dir;
};

void cmd_causal(const CausalArgs& a) {
  const Chain chain = load_chain(a.chain);
  if (chain.empty()) throw UsageError("chain has no retained states");
  if (a.response < 1 || a.response > chain.q())
    throw UsageError("--response must lie in 1.." + std::to_string(chain.q()));
  const CausalQuery query{parse_labels(a.targets, chain.q()), a.response - 1};
  const CausalDraws draws = posterior_causal_effects(chain, query);
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  io::write_file(dir / "causal_draws.csv", io::format_causal_draws_csv(draws));
  if (a.bma) io::write_file(dir / "causal_bma.csv", io::format_bma_csv(draws.targets, bma_causal_effect(draws)));
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string chain;
  std::string out_dir;
  std::size_t stride = 1;
};

void cmd_diagnose(const DiagnoseArgs& a) {
  const Chain chain = load_chain(a.chain);
  if (chain.empty()) throw UsageError("chain has no retained states");
  if (a.stride < 1) throw UsageError("--stride must be at least 1");
  io::write_diagnostics(a.out_dir, chain, a.stride);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian structure learning and causal effects for Gaussian DAG models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Random DAG, SEM coefficients and Gaussian data");
  s->add_option("--q", sim.q, "Number of nodes")->default_val(8);
  s->add_option("--w", sim.w, "Edge probability")->default_val(0.2);
  s->add_option("--lmin", sim.lmin, "Lower bound of L entries")->default_val(0.1);
  s->add_option("--lmax", sim.lmax, "Upper bound of L entries")->default_val(1.0);
  s->add_option("--dvar", sim.dvar, "Conditional variance of every node")->default_val(1.0);
  s->add_option("--n", sim.n, "Number of observations")->default_val(200);
  s->add_option("--seed", sim.seed, "RNG seed (drawn from system entropy if absent)");
  s->add_flag("--header", sim.header, "Write X1..Xq as the first line of data.csv");
  s->add_option("--out-dir", sim.out_dir, "Output directory")->required();

  LearnArgs learn;
  auto* l = app.add_subcommand("learn", "Sample the posterior over DAGs (and parameters)");
  l->add_option("--data", learn.data, "Data CSV (n rows, q columns)")->required();
  l->add_option("--S", learn.S, "Retained iterations")->default_val(5000);
  l->add_option("--burn", learn.burn, "Burn-in iterations")->default_val(1000);
  l->add_option("--a", learn.a, "DAG-Wishart shape (default q)");
  l->add_option("--U", learn.U, "Rate matrix: scalar c for c*I, or a CSV matrix file (default identity)");
  l->add_option("--w", learn.w, "Prior edge inclusion probability")->default_val(0.1);
  l->add_flag("--fast", learn.fast, "Approximate proposal without the valid-operator count");
  l->add_flag("--collapse", learn.collapse, "Sample DAGs only");
  l->add_flag("--save-memory", learn.save_memory, "Keep retained states packed in memory");
  l->add_option("--seed", learn.seed, "RNG seed (drawn from system entropy if absent)");
  l->add_option("--chains", learn.chains, "Independent chains on worker threads")->default_val(1);
  l->add_option("--init", learn.init, "Starting DAG (adjacency CSV or edge-list JSON)");
  l->add_option("--replay", learn.replay, "Rerun with the configuration recorded in a learn manifest");
  l->add_option("--out-dir", learn.out_dir, "Output directory")->required();

  SummarizeArgs sum;
  auto* su = app.add_subcommand("summarize", "Edge probabilities, MAP and MPM graphs");
  su->add_option("--chain", sum.chain, "Chain file")->required();
  su->add_option("--out-dir", sum.out_dir, "Output directory")->required();
  su->add_flag("--edgeprobs", sum.edgeprobs, "Write edgeprobs.csv");
  su->add_flag("--map", sum.map, "Write map.csv");
  su->add_flag("--mpm", sum.mpm, "Write mpm.csv");

  CausalArgs causal;
  auto* c = app.add_subcommand("causal", "Posterior causal effects of a joint intervention");
  c->add_option("--chain", causal.chain, "Chain file (not collapsed)")->required();
  c->add_option("--targets", causal.targets, "Comma-separated target labels, e.g. 5,6,7")->required();
  c->add_option("--response", causal.response, "Response label")->required();
  c->add_flag("--bma", causal.bma, "Also write the model-averaged means");
  c->add_option("--out-dir", causal.out_dir, "Output directory")->required();

  DiagnoseArgs diag;
  auto* d = app.add_subcommand("diagnose", "Convergence diagnostics series");
  d->add_option("--chain", diag.chain, "Chain file")->required();
  d->add_option("--out-dir", diag.out_dir, "Output directory")->required();
  d->add_option("--stride", diag.stride, "Write every k-th running edge-probability row")->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*s) cmd_simulate(sim);
    if (*l) cmd_learn(learn);
    if (*su) cmd_summarize(sum);
    if (*c) cmd_causal(causal);
    if (*d) cmd_diagnose(diag);
  } catch (const SamplerError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const CollapsedChainError& e) {
    std::cerr << "error: CollapsedChainError: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const gaussdag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
