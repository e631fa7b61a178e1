#include "agdn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace agdn {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

Graph::Graph(index_t num_nodes, std::vector<index_t> row_offsets,
             std::vector<index_t> col_indices, std::vector<double> edge_values)
    : num_nodes_(num_nodes),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      edge_values_(std::move(edge_values)) {
  if (num_nodes_ < 0) throw std::invalid_argument("graph: negative node count");
  if (static_cast<index_t>(row_offsets_.size()) != num_nodes_ + 1 || row_offsets_.front() != 0)
    throw std::invalid_argument("graph: row_offsets must have N+1 entries starting at 0");
  if (row_offsets_.back() != static_cast<index_t>(col_indices_.size()))
    throw std::invalid_argument("graph: row_offsets[N] != number of edges");
  if (!edge_values_.empty() && edge_values_.size() != col_indices_.size())
    throw std::invalid_argument("graph: edge_values length != number of edges");
  for (index_t i = 0; i < num_nodes_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i])
      throw std::invalid_argument("graph: row_offsets not non-decreasing");
    for (index_t e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) {
      index_t j = col_indices_[e];
      if (j < 0 || j >= num_nodes_) throw std::invalid_argument("graph: column index out of range");
      if (e > row_offsets_[i] && col_indices_[e - 1] >= j)
        throw std::invalid_argument("graph: columns within a row must be strictly increasing");
    }
  }
}

Graph Graph::from_edges(index_t num_nodes, std::span<const std::pair<index_t, index_t>> edges) {
  std::vector<std::pair<index_t, index_t>> directed;
  directed.reserve(edges.size() * 2);
  for (auto [s, d] : edges) {
    if (s < 0 || d < 0 || s >= num_nodes || d >= num_nodes)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (s == d) continue;
    directed.emplace_back(s, d);
    directed.emplace_back(d, s);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  std::vector<index_t> offsets(num_nodes + 1, 0);
  std::vector<index_t> cols;
  cols.reserve(directed.size());
  for (auto [s, d] : directed) {
    ++offsets[s + 1];
    cols.push_back(d);
  }
  for (index_t i = 0; i < num_nodes; ++i) offsets[i + 1] += offsets[i];
  return Graph(num_nodes, std::move(offsets), std::move(cols));
}

bool Graph::has_edge(index_t i, index_t j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

bool Graph::is_symmetric() const {
  for (index_t i = 0; i < num_nodes_; ++i)
    for (index_t j : neighbors(i))
      if (!has_edge(j, i)) return false;
  return true;
}

namespace {

bool parse_index(std::string_view tok, index_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

Graph parse_edge_list(const std::string& text, index_t num_nodes) {
  if (num_nodes <= 0) throw ParseError("edge list: num_nodes must be positive");
  std::vector<std::pair<index_t, index_t>> edges;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;

    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra))
      throw ParseError("expected exactly two node ids", lineno);
    index_t s = 0, d = 0;
    if (!parse_index(a, s) || !parse_index(b, d))
      throw ParseError("node id is not an integer", lineno);
    if (s < 0 || d < 0 || s >= num_nodes || d >= num_nodes)
      throw ParseError("node id out of range [0, " + std::to_string(num_nodes) + ")", lineno);
    edges.emplace_back(s, d);
    ++records;
  }
  if (records == 0) throw ParseError("edge list is empty");
  return Graph::from_edges(num_nodes, edges);
}

Graph load_edge_list(const std::filesystem::path& path, index_t num_nodes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open edge list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str(), num_nodes);
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (index_t i = 0; i < g.num_nodes(); ++i)
    for (index_t j : g.neighbors(i))
      if (i < j) out << i << '\t' << j << '\n';
}

std::vector<index_t> degrees(const Graph& g) {
  std::vector<index_t> deg(g.num_nodes());
  auto offsets = g.row_offsets();
  for (index_t i = 0; i < g.num_nodes(); ++i) {
    index_t d = offsets[i + 1] - offsets[i];
    if (g.has_edge(i, i)) --d;
    deg[i] = d;
  }
  return deg;
}

Eigen::MatrixXd to_dense(const Graph& g, index_t cap) {
  if (g.num_nodes() > cap)
    throw std::length_error("to_dense: " + std::to_string(g.num_nodes()) +
                            " nodes exceeds oracle cap " + std::to_string(cap));
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(g.num_nodes(), g.num_nodes());
  auto offsets = g.row_offsets();
  auto cols = g.col_indices();
  auto vals = g.edge_values();
  for (index_t i = 0; i < g.num_nodes(); ++i)
    for (index_t e = offsets[i]; e < offsets[i + 1]; ++e)
      dense(i, cols[e]) = g.weighted() ? vals[e] : 1.0;
  return dense;
}

Graph from_dense(const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols()) throw std::invalid_argument("from_dense: matrix not square");
  const index_t n = dense.rows();
  std::vector<index_t> offsets(n + 1, 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  bool weighted = false;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (i == j || dense(i, j) == 0.0) continue;
      cols.push_back(j);
      vals.push_back(dense(i, j));
      weighted = weighted || dense(i, j) != 1.0;
    }
    offsets[i + 1] = static_cast<index_t>(cols.size());
  }
  if (!weighted) vals.clear();
  return Graph(n, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace agdn
