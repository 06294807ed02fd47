#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace labelprop {

/// Vertex ids are 32-bit; offsets and edge indices are 64-bit.
using VertexId = std::uint32_t;
using EdgeIdx = std::uint64_t;

/// Raised when a file cannot be parsed (names the offending line).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when parsed input violates a semantic requirement
/// (non-positive weight, id out of range, asymmetric input, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an internal invariant is violated (e.g. hashtable
/// insertion failure); indicates a bug, not bad input.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightedEdge {
  VertexId u = 0;
  VertexId v = 0;
  double w = 1.0;
};

/// Unordered multiset of weighted edges as parsed from a file or produced
/// by a generator. `n_declared` carries an explicit vertex count when the
/// source format declares one (MatrixMarket size line).
struct EdgeList {
  std::vector<WeightedEdge> edges;
  std::optional<std::uint64_t> n_declared;
};

/// Compressed sparse row adjacency of an undirected weighted graph.
///
/// Both directions of every edge are stored (m2 = 2m directed entries);
/// self-loops are stored once in their row. Rows are sorted by target id,
/// so two builds from the same edge set are bitwise identical. Weights are
/// kept in 32-bit floats; totals and quality math accumulate in doubles.
class CsrGraph {
 public:
  CsrGraph() = default;
  CsrGraph(std::vector<std::uint64_t> offsets, std::vector<VertexId> targets,
           std::vector<float> weights);

  std::uint32_t order() const { return static_cast<std::uint32_t>(offsets_.size() - 1); }
  std::uint64_t directed_size() const { return targets_.size(); }  // m2
  std::uint64_t degree(VertexId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::uint64_t offset(VertexId i) const { return offsets_[i]; }
  double total_weight_2m() const { return total_weight_2m_; }

  std::span<const VertexId> neighbors(VertexId i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  std::span<const float> edge_weights(VertexId i) const {
    return {weights_.data() + offsets_[i], weights_.data() + offsets_[i + 1]};
  }

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<VertexId>& targets() const { return targets_; }
  const std::vector<float>& weights() const { return weights_; }

  /// Sum of stored weights in row i (self-loop counted once).
  double weighted_degree(VertexId i) const;

 private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexId> targets_;
  std::vector<float> weights_;
  double total_weight_2m_ = 0.0;
};

enum class FileFormat { MatrixMarket, EdgeListText };

/// Parse a file into an EdgeList.
///
/// MatrixMarket: coordinate format, field pattern/real/integer, symmetry
/// general/symmetric; 1-based indices are converted to 0-based; symmetric
/// files keep the single stored direction (symmetrization happens in
/// build_csr). Edge list: whitespace-delimited `u v [w]` lines, `#` or `%`
/// comment lines, blank lines skipped, missing weight means 1.0.
/// Throws FormatError (with line number) or ValidationError.
EdgeList load_graph(const std::string& path, FileFormat format);

/// Build the CSR from an edge list.
///
/// With `symmetrize`, each u!=v input contributes both directions exactly
/// once: an unordered pair listed in both directions keeps the direction
/// seen first, and same-direction duplicates merge by weight summation.
/// Self-loops merge by summation and are stored once. Without
/// `symmetrize`, same-direction duplicates still merge but the input must
/// already contain both directions with equal weights (ValidationError
/// otherwise). Ids must fit the declared vertex count when one is present.
CsrGraph build_csr(const EdgeList& el, bool symmetrize);

/// Write one line `u v w` per undirected edge (u <= v, self-loops once).
/// Rebuilding the written file with symmetrize=true reproduces the CSR
/// bit for bit.
void write_edge_list(const CsrGraph& g, const std::string& path);

}  // namespace labelprop
