#include "gaussdag/chain.hpp"

#include "gaussdag/errors.hpp"

#include <bit>
#include <cstring>
#include <utility>

namespace gaussdag {

namespace {

constexpr std::string_view kMagic = "GDCHAIN1";

enum Flags : std::uint8_t {
  kHasParams = 1,
  kFast = 2,
  kCollapse = 4,
  kSaveMemory = 8,
  kHasInit = 16,
};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }

template <typename T>
T get_le(std::string_view in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T) || pos > in.size()) throw CorruptEncodingError("chain payload is truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i));
  pos += sizeof(T);
  return value;
}
double get_f64(std::string_view in, std::size_t& pos) { return std::bit_cast<double>(get_le<std::uint64_t>(in, pos)); }

std::size_t dag_bytes(int q) { return (static_cast<std::size_t>(q) * static_cast<std::size_t>(q) + 7) / 8; }

void put_dag(std::string& out, const Dag& dag) {
  const int q = dag.q();
  std::string bits(dag_bytes(q), '\0');
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v)
      if (dag.has_edge(u, v)) {
        const std::size_t k = static_cast<std::size_t>(u) * static_cast<std::size_t>(q) + static_cast<std::size_t>(v);
        bits[k / 8] = static_cast<char>(static_cast<unsigned char>(bits[k / 8]) | (1u << (k % 8)));
      }
  out += bits;
}

Dag get_dag(std::string_view in, std::size_t& pos, int q) {
  const std::size_t nb = dag_bytes(q);
  if (pos > in.size() || in.size() - pos < nb) throw CorruptEncodingError("chain payload is truncated");
  AdjacencyMatrix a = AdjacencyMatrix::Zero(q, q);
  for (int u = 0; u < q; ++u)
    for (int v = 0; v < q; ++v) {
      const std::size_t k = static_cast<std::size_t>(u) * static_cast<std::size_t>(q) + static_cast<std::size_t>(v);
      a(u, v) = (static_cast<unsigned char>(in[pos + k / 8]) >> (k % 8)) & 1u;
    }
  // Padding bits after the last entry must be zero.
  const std::size_t used = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
  for (std::size_t k = used; k < nb * 8; ++k)
    if ((static_cast<unsigned char>(in[pos + k / 8]) >> (k % 8)) & 1u)
      throw CorruptEncodingError("nonzero padding bits in DAG record");
  pos += nb;
  try {
    return Dag::from_adjacency(a);
  } catch (const Error& e) {
    throw CorruptEncodingError(std::string("invalid DAG record: ") + e.what());
  }
}

}  // namespace

namespace codec {

void append_state(std::string& out, const Dag& dag, const CholParams* params) {
  put_dag(out, dag);
  if (!params) return;
  for (Eigen::Index j = 0; j < params->variances().size(); ++j) put_f64(out, params->variances()(j));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params->coefficients().size()));
  for (const auto& c : params->coefficients()) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(c.u));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(c.v));
    put_f64(out, c.value);
  }
}

Dag read_state(std::string_view in, std::size_t& pos, int q, bool has_params, CholParams* params) {
  Dag dag = get_dag(in, pos, q);
  if (!has_params) return dag;
  Vector variances(q);
  for (int j = 0; j < q; ++j) {
    variances(j) = get_f64(in, pos);
    if (!(variances(j) > 0.0)) throw CorruptEncodingError("non-positive conditional variance");
  }
  const auto nnz = get_le<std::uint32_t>(in, pos);
  if (nnz > static_cast<std::uint32_t>(dag.num_edges())) throw CorruptEncodingError("more coefficients than edges");
  std::vector<Coefficient> coefs;
  coefs.reserve(nnz);
  for (std::uint32_t k = 0; k < nnz; ++k) {
    const int u = get_le<std::uint16_t>(in, pos);
    const int v = get_le<std::uint16_t>(in, pos);
    const double value = get_f64(in, pos);
    if (u >= q || v >= q || !dag.has_edge(u, v)) throw CorruptEncodingError("coefficient outside the DAG support");
    if (!coefs.empty() && std::pair(coefs.back().u, coefs.back().v) >= std::pair(u, v))
      throw CorruptEncodingError("coefficients are not in increasing (u, v) order");
    coefs.push_back({u, v, value});
  }
  if (params) *params = CholParams(std::move(variances), std::move(coefs));
  return dag;
}

}  // namespace codec

Chain::Chain(int q, McmcConfig config) : q_(q), config_(std::move(config)) {
  if (q < 1) throw ConfigError("chain requires q >= 1");
  if (q > 65535) throw ConfigError("chain codec supports q <= 65535");
  if (config_.init && config_.init->q() != q) throw ConfigError("initial DAG has the wrong number of nodes");
}

Dag Chain::dag(std::size_t s) const {
  if (s >= size_) throw IndexError("chain index out of range");
  if (!packed()) return dags_[s];
  std::size_t pos = packed_offsets_[s];
  return codec::read_state(packed_bytes_, pos, q_, false, nullptr);
}

CholParams Chain::params(std::size_t s) const {
  if (!has_params()) throw CollapsedChainError("chain was produced by the collapsed sampler and has no parameters");
  if (s >= size_) throw IndexError("chain index out of range");
  if (!packed()) return params_[s];
  std::size_t pos = packed_offsets_[s];
  CholParams p;
  codec::read_state(packed_bytes_, pos, q_, true, &p);
  return p;
}

void Chain::push(const Dag& dag, const CholParams* params) {
  if (dag.q() != q_) throw ShapeError("state has the wrong number of nodes");
  if (has_params() != (params != nullptr)) throw ConfigError("parameters must be given iff the chain is not collapsed");
  if (packed()) {
    packed_offsets_.push_back(packed_bytes_.size());
    codec::append_state(packed_bytes_, dag, params);
  } else {
    dags_.push_back(dag);
    if (params) params_.push_back(*params);
  }
  ++size_;
}

double Chain::acceptance_rate() const {
  return proposals.empty() ? 0.0 : static_cast<double>(accept_count) / static_cast<double>(proposals.size());
}

bool operator==(const Chain& a, const Chain& b) {
  if (a.q_ != b.q_ || !(a.config_ == b.config_) || a.size_ != b.size_ || a.accept_count != b.accept_count ||
      a.proposals != b.proposals)
    return false;
  for (std::size_t s = 0; s < a.size_; ++s) {
    if (!(a.dag(s) == b.dag(s))) return false;
    if (a.has_params() && !(a.params(s) == b.params(s))) return false;
  }
  return true;
}

std::string encode_compact(const Chain& chain) {
  const McmcConfig& cfg = chain.config();
  std::string out(kMagic);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(chain.q()));
  std::uint8_t flags = 0;
  if (chain.has_params()) flags |= kHasParams;
  if (cfg.fast) flags |= kFast;
  if (cfg.collapse) flags |= kCollapse;
  if (cfg.save_memory) flags |= kSaveMemory;
  if (cfg.init) flags |= kHasInit;
  out.push_back(static_cast<char>(flags));
  put_le<std::uint64_t>(out, cfg.S);
  put_le<std::uint64_t>(out, cfg.burn);
  put_f64(out, cfg.w);
  put_le<std::uint64_t>(out, cfg.seed);
  if (cfg.init) put_dag(out, *cfg.init);
  put_le<std::uint64_t>(out, chain.accept_count);
  put_le<std::uint64_t>(out, chain.proposals.size());
  for (const auto& p : chain.proposals) {
    out.push_back(static_cast<char>(p.op.kind));
    out.push_back(static_cast<char>(p.accepted ? 1 : 0));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(p.op.u));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(p.op.v));
  }
  put_le<std::uint64_t>(out, chain.size());
  for (std::size_t s = 0; s < chain.size(); ++s) {
    if (chain.has_params()) {
      const CholParams p = chain.params(s);
      codec::append_state(out, chain.dag(s), &p);
    } else {
      codec::append_state(out, chain.dag(s), nullptr);
    }
  }
  return out;
}

Chain decode_compact(std::string_view in) {
  if (in.size() < kMagic.size() || in.substr(0, kMagic.size()) != kMagic)
    throw CorruptEncodingError("missing GDCHAIN1 header");
  std::size_t pos = kMagic.size();
  const auto q32 = get_le<std::uint32_t>(in, pos);
  if (q32 < 1 || q32 > 65535) throw CorruptEncodingError("node count out of range");
  const int q = static_cast<int>(q32);
  const auto flags = get_le<std::uint8_t>(in, pos);
  if (flags & ~0x1Fu) throw CorruptEncodingError("unknown flag bits");
  McmcConfig cfg;
  cfg.fast = flags & kFast;
  cfg.collapse = flags & kCollapse;
  cfg.save_memory = flags & kSaveMemory;
  if (static_cast<bool>(flags & kHasParams) == cfg.collapse)
    throw CorruptEncodingError("parameter flag contradicts the collapse flag");
  cfg.S = get_le<std::uint64_t>(in, pos);
  cfg.burn = get_le<std::uint64_t>(in, pos);
  cfg.w = get_f64(in, pos);
  cfg.seed = get_le<std::uint64_t>(in, pos);
  if (flags & kHasInit) cfg.init = get_dag(in, pos, q);

  Chain chain(q, cfg);
  chain.accept_count = get_le<std::uint64_t>(in, pos);
  const auto nprop = get_le<std::uint64_t>(in, pos);
  if (nprop > (in.size() - pos) / 6) throw CorruptEncodingError("proposal log is truncated");
  chain.proposals.reserve(nprop);
  for (std::uint64_t i = 0; i < nprop; ++i) {
    const auto kind = get_le<std::uint8_t>(in, pos);
    const auto accepted = get_le<std::uint8_t>(in, pos);
    const int u = get_le<std::uint16_t>(in, pos);
    const int v = get_le<std::uint16_t>(in, pos);
    if (kind > 2 || accepted > 1 || u >= q || v >= q || u == v)
      throw CorruptEncodingError("malformed proposal record");
    chain.proposals.push_back({{static_cast<OpKind>(kind), u, v}, accepted == 1});
  }
  if (chain.accept_count > chain.proposals.size()) throw CorruptEncodingError("accept count exceeds proposals");
  const auto nstates = get_le<std::uint64_t>(in, pos);
  if (nstates > in.size() - pos) throw CorruptEncodingError("state count exceeds payload");
  for (std::uint64_t s = 0; s < nstates; ++s) {
    if (chain.has_params()) {
      CholParams p;
      const Dag d = codec::read_state(in, pos, q, true, &p);
      chain.push(d, &p);
    } else {
      chain.push(codec::read_state(in, pos, q, false, nullptr), nullptr);
    }
  }
  if (pos != in.size()) throw CorruptEncodingError("trailing bytes after the last state");
  return chain;
}

std::size_t dense_size_bytes(const Chain& chain) {
  const std::size_t cells = static_cast<std::size_t>(chain.q()) * static_cast<std::size_t>(chain.q()) * chain.size();
  return cells * sizeof(int) + (chain.has_params() ? 2 * cells * sizeof(double) : 0);
}

}  // namespace gaussdag
