#include "labelprop/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace labelprop {

namespace {

constexpr std::uint64_t kMaxVertexId = 0xFFFFFFFEull;  // 0xFFFFFFFF is reserved

[[noreturn]] void format_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_id(std::string_view tok, const std::string& path, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    format_fail(path, line, "expected a vertex id, got '" + std::string(tok) + "'");
  return v;
}

double parse_weight(std::string_view tok, const std::string& path, std::size_t line) {
  double w = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
  if (ec != std::errc() || p != tok.data() + tok.size())
    format_fail(path, line, "expected a weight, got '" + std::string(tok) + "'");
  if (!std::isfinite(w) || w <= 0.0)
    throw ValidationError(path + ":" + std::to_string(line) + ": weight must be finite and > 0, got " +
                          std::string(tok));
  return w;
}

void check_id_range(std::uint64_t id, const std::string& path, std::size_t line) {
  if (id > kMaxVertexId)
    throw ValidationError(path + ":" + std::to_string(line) + ": vertex id " + std::to_string(id) +
                          " exceeds the 32-bit id space");
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

EdgeList load_matrix_market(std::ifstream& in, const std::string& path) {
  EdgeList el;
  std::string linebuf;
  std::size_t lineno = 0;

  if (!std::getline(in, linebuf)) format_fail(path, 1, "empty file");
  ++lineno;
  auto header = split_ws(linebuf);
  if (header.size() < 4 || lower(header[0]) != "%%matrixmarket")
    format_fail(path, lineno, "missing %%MatrixMarket banner");
  if (lower(header[1]) != "matrix" || lower(header[2]) != "coordinate")
    format_fail(path, lineno, "only 'matrix coordinate' files are supported");
  const std::string field = lower(header[3]);
  if (field != "real" && field != "integer" && field != "pattern")
    format_fail(path, lineno, "unsupported field '" + field + "' (need real, integer or pattern)");
  std::string symmetry = "general";
  if (header.size() >= 5) symmetry = lower(header[4]);
  if (symmetry != "general" && symmetry != "symmetric")
    format_fail(path, lineno, "unsupported symmetry '" + symmetry + "' (need general or symmetric)");

  // Size line: first non-comment, non-blank line after the banner.
  std::uint64_t rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, linebuf)) format_fail(path, lineno + 1, "missing size line");
    ++lineno;
    auto toks = split_ws(linebuf);
    if (toks.empty() || toks[0][0] == '%') continue;
    if (toks.size() != 3) format_fail(path, lineno, "size line must be 'rows cols nnz'");
    rows = parse_id(toks[0], path, lineno);
    cols = parse_id(toks[1], path, lineno);
    nnz = parse_id(toks[2], path, lineno);
    break;
  }
  const std::uint64_t n = std::max(rows, cols);
  if (n > kMaxVertexId + 1)
    throw ValidationError(path + ": declared dimension exceeds the 32-bit id space");
  el.n_declared = n;
  el.edges.reserve(nnz);

  std::uint64_t seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, linebuf))
      format_fail(path, lineno + 1, "unexpected end of file: expected " + std::to_string(nnz) +
                                        " entries, got " + std::to_string(seen));
    ++lineno;
    auto toks = split_ws(linebuf);
    if (toks.empty() || toks[0][0] == '%') continue;
    const std::size_t want = (field == "pattern") ? 2 : 3;
    if (toks.size() != want)
      format_fail(path, lineno, "expected " + std::to_string(want) + " tokens per entry");
    std::uint64_t i = parse_id(toks[0], path, lineno);
    std::uint64_t j = parse_id(toks[1], path, lineno);
    if (i == 0 || j == 0) format_fail(path, lineno, "MatrixMarket indices are 1-based");
    if (i > rows || j > cols)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": entry (" + std::to_string(i) +
                            "," + std::to_string(j) + ") outside declared " + std::to_string(rows) +
                            "x" + std::to_string(cols));
    double w = (field == "pattern") ? 1.0 : parse_weight(toks[2], path, lineno);
    el.edges.push_back({static_cast<VertexId>(i - 1), static_cast<VertexId>(j - 1), w});
    ++seen;
  }
  return el;
}

EdgeList load_edge_list(std::ifstream& in, const std::string& path) {
  EdgeList el;
  std::string linebuf;
  std::size_t lineno = 0;
  while (std::getline(in, linebuf)) {
    ++lineno;
    auto toks = split_ws(linebuf);
    if (toks.empty() || toks[0][0] == '#' || toks[0][0] == '%') {
      // `% vertices N` (or `# vertices N`) declares the vertex count, which
      // edges alone cannot convey when trailing vertices are isolated.
      if (toks.size() == 3 && (toks[0] == "%" || toks[0] == "#") && toks[1] == "vertices") {
        const std::uint64_t n = parse_id(toks[2], path, lineno);
        if (n > kMaxVertexId + 1)
          throw ValidationError(path + ":" + std::to_string(lineno) +
                                ": declared vertex count exceeds the 32-bit id space");
        el.n_declared = n;
      }
      continue;
    }
    if (toks.size() != 2 && toks.size() != 3)
      format_fail(path, lineno, "expected 'u v' or 'u v w'");
    std::uint64_t u = parse_id(toks[0], path, lineno);
    std::uint64_t v = parse_id(toks[1], path, lineno);
    check_id_range(u, path, lineno);
    check_id_range(v, path, lineno);
    double w = (toks.size() == 3) ? parse_weight(toks[2], path, lineno) : 1.0;
    el.edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), w});
  }
  return el;
}

}  // namespace

CsrGraph::CsrGraph(std::vector<std::uint64_t> offsets, std::vector<VertexId> targets,
                   std::vector<float> weights)
    : offsets_(std::move(offsets)), targets_(std::move(targets)), weights_(std::move(weights)) {
  if (offsets_.empty() || offsets_.back() != targets_.size() || targets_.size() != weights_.size())
    throw ValidationError("inconsistent CSR arrays");
  total_weight_2m_ = 0.0;
  for (float w : weights_) total_weight_2m_ += static_cast<double>(w);
}

double CsrGraph::weighted_degree(VertexId i) const {
  double k = 0.0;
  for (float w : edge_weights(i)) k += static_cast<double>(w);
  return k;
}

EdgeList load_graph(const std::string& path, FileFormat format) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);
  return format == FileFormat::MatrixMarket ? load_matrix_market(in, path) : load_edge_list(in, path);
}

CsrGraph build_csr(const EdgeList& el, bool symmetrize) {
  // Resolve the vertex count.
  std::uint64_t n = el.n_declared.value_or(0);
  std::uint64_t max_id = 0;
  for (const auto& e : el.edges) max_id = std::max<std::uint64_t>(max_id, std::max(e.u, e.v));
  if (el.n_declared) {
    if (!el.edges.empty() && max_id >= *el.n_declared)
      throw ValidationError("vertex id " + std::to_string(max_id) +
                            " out of range for declared n=" + std::to_string(*el.n_declared));
  } else if (!el.edges.empty()) {
    n = max_id + 1;
  }
  if (n > kMaxVertexId + 1) throw ValidationError("vertex count exceeds the 32-bit id space");

  // Merge duplicates into one weight per unordered pair / per self-loop.
  struct PairAgg {
    bool first_is_forward;  // forward means (min,max) listing order
    double w;
  };
  std::unordered_map<std::uint64_t, PairAgg> pairs;
  std::unordered_map<std::uint64_t, double> loops;
  pairs.reserve(el.edges.size());
  std::vector<std::uint64_t> pair_order;  // deterministic iteration
  std::vector<std::uint64_t> loop_order;

  auto pair_key = [](VertexId a, VertexId b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
  };

  if (symmetrize) {
    for (const auto& e : el.edges) {
      if (e.u == e.v) {
        auto [it, fresh] = loops.try_emplace(e.u, 0.0);
        if (fresh) loop_order.push_back(e.u);
        it->second += e.w;
        continue;
      }
      const bool forward = e.u < e.v;
      auto [it, fresh] = pairs.try_emplace(pair_key(e.u, e.v), PairAgg{forward, 0.0});
      if (fresh) pair_order.push_back(pair_key(e.u, e.v));
      if (it->second.first_is_forward == forward)
        it->second.w += e.w;  // same direction: merge
      // opposite direction of an already-seen pair: deduplicated (dropped)
    }
  } else {
    // Exact directed multiset; merge same-direction duplicates, then demand symmetry.
    std::unordered_map<std::uint64_t, double> directed;
    directed.reserve(el.edges.size());
    auto dkey = [](VertexId a, VertexId b) {
      return (static_cast<std::uint64_t>(a) << 32) | b;
    };
    for (const auto& e : el.edges) {
      if (e.u == e.v) {
        auto [it, fresh] = loops.try_emplace(e.u, 0.0);
        if (fresh) loop_order.push_back(e.u);
        it->second += e.w;
        continue;
      }
      directed[dkey(e.u, e.v)] += e.w;
    }
    for (const auto& [key, w] : directed) {
      const VertexId a = static_cast<VertexId>(key >> 32);
      const VertexId b = static_cast<VertexId>(key & 0xFFFFFFFFu);
      auto rev = directed.find(dkey(b, a));
      if (rev == directed.end() || rev->second != w)
        throw ValidationError("input is not symmetric at edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ") and symmetrize is off");
      if (a < b) {
        auto [it, fresh] = pairs.try_emplace(pair_key(a, b), PairAgg{true, w});
        if (fresh) pair_order.push_back(pair_key(a, b));
        (void)it;
      }
    }
    // Deterministic order for the asymmetric-input-free path.
    std::sort(pair_order.begin(), pair_order.end());
  }

  // Counting sort into CSR; each unordered pair lands in both rows.
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::uint64_t key : pair_order) {
    const VertexId a = static_cast<VertexId>(key >> 32);
    const VertexId b = static_cast<VertexId>(key & 0xFFFFFFFFu);
    ++offsets[a + 1];
    ++offsets[b + 1];
  }
  for (std::uint64_t u : loop_order) ++offsets[u + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

  const std::uint64_t m2 = offsets[n];
  std::vector<VertexId> targets(m2);
  std::vector<float> weights(m2);
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  auto put = [&](VertexId from, VertexId to, double w) {
    targets[cursor[from]] = to;
    weights[cursor[from]] = static_cast<float>(w);
    ++cursor[from];
  };
  for (std::uint64_t key : pair_order) {
    const VertexId a = static_cast<VertexId>(key >> 32);
    const VertexId b = static_cast<VertexId>(key & 0xFFFFFFFFu);
    const double w = pairs.at(key).w;
    put(a, b, w);
    put(b, a, w);
  }
  for (std::uint64_t u : loop_order) put(static_cast<VertexId>(u), static_cast<VertexId>(u), loops.at(u));

  // Canonical per-row order: sort by target id (targets are unique per row).
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t lo = offsets[i], hi = offsets[i + 1];
    std::vector<std::pair<VertexId, float>> row;
    row.reserve(hi - lo);
    for (std::uint64_t p = lo; p < hi; ++p) row.emplace_back(targets[p], weights[p]);
    std::sort(row.begin(), row.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::uint64_t p = lo; p < hi; ++p) {
      targets[p] = row[p - lo].first;
      weights[p] = row[p - lo].second;
    }
  }

  return CsrGraph(std::move(offsets), std::move(targets), std::move(weights));
}

void write_edge_list(const CsrGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << "% undirected weighted edge list: u v w (each edge once, u <= v)\n";
  out << "% vertices " << g.order() << '\n';
  char buf[64];
  for (VertexId i = 0; i < g.order(); ++i) {
    auto nbrs = g.neighbors(i);
    auto ws = g.edge_weights(i);
    for (std::size_t p = 0; p < nbrs.size(); ++p) {
      if (nbrs[p] < i) continue;  // emit u <= v once; self-loops included
      auto r = std::to_chars(buf, buf + sizeof buf, ws[p]);
      out << i << ' ' << nbrs[p] << ' ' << std::string_view(buf, r.ptr - buf) << '\n';
    }
  }
  if (!out) throw ValidationError("failed writing " + path);
}

}  // namespace labelprop
