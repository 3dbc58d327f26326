#include "gaussdag/io.hpp"

#include "gaussdag/errors.hpp"
#include "gaussdag/summaries.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gaussdag::io {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != '"') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& x) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string line(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Matrix parse_matrix_csv(std::string_view text, std::vector<std::string>* header) {
  const auto lines = lines_of(text);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      double x;
      if (!parse_double(f, x)) {
        numeric = false;
        break;
      }
      row.push_back(x);
    }
    if (!numeric) {
      if (i == 0) {
        if (header) *header = fields;
        continue;
      }
      throw ShapeError("non-numeric CSV cell on line " + std::to_string(i + 1));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ShapeError("ragged CSV row on line " + std::to_string(i + 1));
    rows.push_back(std::move(row));
  }
  const auto ncols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Matrix m(static_cast<Eigen::Index>(rows.size()), ncols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < ncols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* header) {
  return parse_matrix_csv(read_file(path), header);
}

std::string format_matrix_csv(const Matrix& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out.push_back(',');
    out += header[k];
  }
  if (!header.empty()) out.push_back('\n');
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_double(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header) {
  write_file(path, format_matrix_csv(m, header));
}

std::string format_adjacency_csv(const AdjacencyMatrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out.push_back(',');
      out += std::to_string(a(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

AdjacencyMatrix parse_adjacency_csv(std::string_view text) {
  const Matrix m = parse_matrix_csv(text);
  AdjacencyMatrix a(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0 && m(i, j) != 1.0) throw ShapeError("adjacency CSV must contain only 0 and 1");
      a(i, j) = static_cast<int>(m(i, j));
    }
  return a;
}

Dag read_dag_csv(const std::filesystem::path& path) { return Dag::from_adjacency(parse_adjacency_csv(read_file(path))); }

void write_adjacency_csv(const std::filesystem::path& path, const AdjacencyMatrix& a) {
  write_file(path, format_adjacency_csv(a));
}

std::string dag_to_json(const Dag& dag) {
  nlohmann::json j;
  j["q"] = dag.q();
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : dag.edges()) j["edges"].push_back({u + 1, v + 1});
  return j.dump();
}

Dag dag_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("invalid DAG JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("q") || !j["q"].is_number_integer() || !j.contains("edges") ||
      !j["edges"].is_array())
    throw ShapeError("DAG JSON needs an integer \"q\" and an \"edges\" array");
  const int q = j["q"].get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ShapeError("each edge must be a pair of integer labels");
    edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
  }
  return Dag::from_edges(q, edges);
}

void write_dataset_csv(const std::filesystem::path& path, const Matrix& X, bool with_header) {
  std::vector<std::string> header;
  if (with_header)
    for (Eigen::Index j = 0; j < X.cols(); ++j) header.push_back("X" + std::to_string(j + 1));
  write_matrix_csv(path, X, header);
}

std::string format_causal_draws_csv(const CausalDraws& draws) {
  std::vector<std::string> header;
  for (int t : draws.targets) header.push_back("h = " + std::to_string(t + 1));
  return format_matrix_csv(draws.values, header);
}

std::string format_bma_csv(const std::vector<int>& targets, const Vector& means) {
  std::vector<std::string> header;
  for (int t : targets) header.push_back("h = " + std::to_string(t + 1));
  return format_matrix_csv(means.transpose(), header);
}

void write_chain(const std::filesystem::path& path, const Chain& chain) { write_file(path, encode_compact(chain)); }

Chain read_chain(const std::filesystem::path& path) { return decode_compact(read_file(path)); }

void write_diagnostics(const std::filesystem::path& dir, const Chain& chain, std::size_t stride) {
  if (chain.empty()) throw EmptyChainError("chain has no retained states");
  if (stride == 0) throw DomainError("stride must be positive");
  const int q = chain.q();
  std::filesystem::create_directories(dir);
  std::ofstream sizes(dir / "sizetrace.csv", std::ios::binary | std::ios::trunc);
  if (!sizes) throw std::runtime_error("cannot write " + (dir / "sizetrace.csv").string());
  sizes << "s,size,running_mean\n";
  std::vector<std::ofstream> per_node;
  for (int v = 0; v < q; ++v) {
    const auto p = dir / ("edgeprobs_running_v" + std::to_string(v + 1) + ".csv");
    per_node.emplace_back(p, std::ios::binary | std::ios::trunc);
    if (!per_node.back()) throw std::runtime_error("cannot write " + p.string());
    per_node.back() << "s";
    for (int u = 0; u < q; ++u) per_node.back() << ",u" << (u + 1);
    per_node.back() << '\n';
  }
  DiagnosticsAccumulator acc(q);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    acc.push(chain.dag(s));
    const std::string label = std::to_string(s + 1);
    sizes << label << ',' << acc.last_size() << ',' << format_double(acc.running_mean_size()) << '\n';
    if ((s + 1) % stride != 0 && s + 1 != chain.size()) continue;
    for (int v = 0; v < q; ++v) {
      std::string line = label;
      for (int u = 0; u < q; ++u) {
        line.push_back(',');
        line += format_double(acc.running_edge_prob(u, v));
      }
      line.push_back('\n');
      per_node[static_cast<std::size_t>(v)] << line;
    }
  }
  for (auto& f : per_node)
    if (!f.flush()) throw std::runtime_error("diagnostics write failed");
  if (!sizes.flush()) throw std::runtime_error("diagnostics write failed");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace gaussdag::io
