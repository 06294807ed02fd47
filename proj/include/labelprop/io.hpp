#pragma once

#include <span>
#include <string>
#include <vector>

#include "labelprop/graph.hpp"

namespace labelprop {

/// Write one `vertex<TAB>label` line per vertex, in ascending vertex order.
void write_membership(const std::string& path, std::span<const VertexId> labels);

/// Read a membership file for a graph of n vertices. Lines are
/// `vertex<TAB>label` (any whitespace accepted); `#`/`%` comments and blank
/// lines are skipped. Every vertex of the graph must be assigned exactly
/// once and labels must lie in [0, n). Throws FormatError or
/// ValidationError naming the offending line or the first missing vertex.
std::vector<VertexId> read_membership(const std::string& path, std::uint32_t n);

}  // namespace labelprop
