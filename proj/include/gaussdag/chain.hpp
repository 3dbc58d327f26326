#pragma once

#include "gaussdag/dagwishart.hpp"
#include "gaussdag/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaussdag {

struct McmcConfig {
  std::size_t S = 0;
  std::size_t burn = 0;
  double w = 0.1;
  bool fast = false;
  bool collapse = false;
  bool save_memory = false;
  std::uint64_t seed = 0;
  std::optional<Dag> init;

  friend bool operator==(const McmcConfig&, const McmcConfig&) = default;
};

/// One Metropolis-Hastings proposal and whether it was taken.
struct ProposalRecord {
  Operator op;
  bool accepted = false;
  friend bool operator==(const ProposalRecord&, const ProposalRecord&) = default;
};

/// Retained sampler states plus the run's configuration and proposal log.
///
/// With `config.save_memory` set, states are held in the packed record format
/// of the chain codec and decoded on access; otherwise they are kept as
/// values. Both layouts behave identically through this interface.
class Chain {
 public:
  Chain() = default;
  Chain(int q, McmcConfig config);

  int q() const { return q_; }
  const McmcConfig& config() const { return config_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool has_params() const { return !config_.collapse; }
  bool packed() const { return config_.save_memory; }

  Dag dag(std::size_t s) const;
  /// Throws CollapsedChainError when the chain carries no parameters.
  CholParams params(std::size_t s) const;

  /// Appends a state. `params` must be given iff the chain is not collapsed.
  void push(const Dag& dag, const CholParams* params);

  std::uint64_t accept_count = 0;
  std::vector<ProposalRecord> proposals;

  double acceptance_rate() const;

  friend bool operator==(const Chain& a, const Chain& b);

 private:
  int q_ = 0;
  McmcConfig config_;
  std::size_t size_ = 0;
  std::vector<Dag> dags_;
  std::vector<CholParams> params_;
  std::string packed_bytes_;
  std::vector<std::size_t> packed_offsets_;
};

/// Versioned binary form of a chain ("GDCHAIN1"); see docs/chain_format.md.
std::string encode_compact(const Chain& chain);
/// Throws CorruptEncodingError on any malformed input.
Chain decode_compact(std::string_view bytes);

/// Size in bytes a dense (q, q, S) array layout of the same chain would take.
std::size_t dense_size_bytes(const Chain& chain);

namespace codec {
// Single-state record: DAG bits, then (if has_params) variances and sparse L.
void append_state(std::string& out, const Dag& dag, const CholParams* params);
/// Decodes one record at `pos`, advancing it.
Dag read_state(std::string_view in, std::size_t& pos, int q, bool has_params, CholParams* params);
}  // namespace codec

}  // namespace gaussdag
