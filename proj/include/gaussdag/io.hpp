#pragma once

#include "gaussdag/causal.hpp"
#include "gaussdag/chain.hpp"
#include "gaussdag/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// File formats. Node labels are 1-based in every file; the library API is 0-based.
namespace gaussdag::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Numeric CSV. A first line containing any non-numeric field is treated as a
/// header and returned through `header`. Throws ShapeError on ragged rows or
/// unparsable cells, std::runtime_error on I/O failure.
Matrix read_matrix_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);
Matrix parse_matrix_csv(std::string_view text, std::vector<std::string>* header = nullptr);
std::string format_matrix_csv(const Matrix& m, const std::vector<std::string>& header = {});
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header = {});

/// Headerless 0/1 CSV, row = source, column = target.
std::string format_adjacency_csv(const AdjacencyMatrix& a);
AdjacencyMatrix parse_adjacency_csv(std::string_view text);
Dag read_dag_csv(const std::filesystem::path& path);
void write_adjacency_csv(const std::filesystem::path& path, const AdjacencyMatrix& a);

/// {"q": int, "edges": [[u, v], ...]} with 1-based labels.
std::string dag_to_json(const Dag& dag);
Dag dag_from_json(std::string_view text);

/// Data matrix; `with_header` writes X1..Xq as the first line.
void write_dataset_csv(const std::filesystem::path& path, const Matrix& X, bool with_header);

/// Columns headed "h = <label>".
std::string format_causal_draws_csv(const CausalDraws& draws);
std::string format_bma_csv(const std::vector<int>& targets, const Vector& means);

void write_chain(const std::filesystem::path& path, const Chain& chain);
Chain read_chain(const std::filesystem::path& path);

/// sizetrace.csv plus edgeprobs_running_v<k>.csv for k = 1..q, streamed
/// without holding the running matrices. Every `stride`-th step is written
/// (the last step always is).
void write_diagnostics(const std::filesystem::path& dir, const Chain& chain, std::size_t stride = 1);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// 64-bit FNV-1a, used as a content fingerprint.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

}  // namespace gaussdag::io
