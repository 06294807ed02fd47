#include "labelprop/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>

namespace labelprop {

void write_membership(const std::string& path, std::span<const VertexId> labels) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels[i] << '\n';
  if (!out) throw ValidationError("failed writing " + path);
}

std::vector<VertexId> read_membership(const std::string& path, std::uint32_t n) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open membership file: " + path);
  std::vector<VertexId> labels(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t a = 0;
    while (a < line.size() && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    if (a == line.size() || line[a] == '#' || line[a] == '%') continue;
    std::uint64_t vertex = 0, label = 0;
    auto parse_field = [&](std::uint64_t& out_v) {
      auto [p, ec] = std::from_chars(line.data() + a, line.data() + line.size(), out_v);
      if (ec != std::errc() || p == line.data() + a)
        throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'vertex<TAB>label'");
      a = static_cast<std::size_t>(p - line.data());
      while (a < line.size() && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    };
    parse_field(vertex);
    parse_field(label);
    if (a != line.size())
      throw FormatError(path + ":" + std::to_string(lineno) + ": trailing content after label");
    if (vertex >= n)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": vertex " +
                            std::to_string(vertex) + " out of range for n=" + std::to_string(n));
    if (label >= n)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": label " +
                            std::to_string(label) + " out of range for n=" + std::to_string(n));
    if (seen[vertex])
      throw ValidationError(path + ":" + std::to_string(lineno) + ": vertex " +
                            std::to_string(vertex) + " assigned twice");
    seen[vertex] = 1;
    labels[vertex] = static_cast<VertexId>(label);
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (!seen[i])
      throw ValidationError(path + ": no label for vertex " + std::to_string(i));
  return labels;
}

}  // namespace labelprop
