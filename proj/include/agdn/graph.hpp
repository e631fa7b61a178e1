#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace agdn {

using index_t = std::int64_t;

/// Raised by ingestion code; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Dense matrices built for oracle comparisons are capped at this size.
inline constexpr index_t kDenseOracleCap = 256;

/// Immutable CSR adjacency. Rows are destinations, columns within a row are
/// strictly increasing. Self-loops are never stored here; the transition
/// builders add them.
class Graph {
 public:
  Graph() = default;

  /// Validates the CSR invariants and throws std::invalid_argument on failure.
  Graph(index_t num_nodes, std::vector<index_t> row_offsets,
        std::vector<index_t> col_indices,
        std::vector<double> edge_values = {});

  /// Builds an undirected graph: pairs are symmetrized, deduplicated, and
  /// self-loops dropped.
  static Graph from_edges(index_t num_nodes,
                          std::span<const std::pair<index_t, index_t>> edges);

  index_t num_nodes() const { return num_nodes_; }
  index_t num_edges() const { return static_cast<index_t>(col_indices_.size()); }

  std::span<const index_t> row_offsets() const { return row_offsets_; }
  std::span<const index_t> col_indices() const { return col_indices_; }
  std::span<const double> edge_values() const { return edge_values_; }
  bool weighted() const { return !edge_values_.empty(); }

  std::span<const index_t> neighbors(index_t i) const {
    return {col_indices_.data() + row_offsets_[i],
            static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
  }
  bool has_edge(index_t i, index_t j) const;

  /// Every (i, j) has a matching (j, i).
  bool is_symmetric() const;

  bool operator==(const Graph&) const = default;

 private:
  index_t num_nodes_ = 0;
  std::vector<index_t> row_offsets_{0};
  std::vector<index_t> col_indices_;
  std::vector<double> edge_values_;
};

/// Reads a whitespace-separated `src dst` edge list (0-based ids, `#` comments).
Graph load_edge_list(const std::filesystem::path& path, index_t num_nodes);

/// Same parser over an in-memory text.
Graph parse_edge_list(const std::string& text, index_t num_nodes);

/// Writes one `src\tdst` line per stored (directed) edge with src < dst.
void save_edge_list(const Graph& g, const std::filesystem::path& path);

/// Neighbor counts, self-loops excluded.
std::vector<index_t> degrees(const Graph& g);

Eigen::MatrixXd to_dense(const Graph& g, index_t cap = kDenseOracleCap);

/// Non-zero off-diagonal entries become edges; weights are kept only when some
/// entry differs from 1.
Graph from_dense(const Eigen::MatrixXd& dense);

}  // namespace agdn
