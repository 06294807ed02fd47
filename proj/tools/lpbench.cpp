// lpbench: benchmark and inspection CLI for the labelprop library.
//
//   lpbench detect   run community detection on a graph, emit a JSON report
//   lpbench sweep    run a one-dimensional design sweep, emit CSV rows
//   lpbench quality  score an existing membership file against a graph
//   lpbench gen      write synthetic benchmark graphs
//
// Exit codes: 0 success, 1 usage error, 2 input error (unreadable or invalid
// files, bad parameter combinations), 3 internal failure (invariant
// violation or memory exhaustion).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "labelprop/generators.hpp"
#include "labelprop/graph.hpp"
#include "labelprop/io.hpp"
#include "labelprop/lpa.hpp"
#include "labelprop/quality.hpp"

using json = nlohmann::ordered_json;
using namespace labelprop;

namespace {

// ---------------------------------------------------------------- helpers

FileFormat resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "mtx") return FileFormat::MatrixMarket;
  if (flag == "edge-list") return FileFormat::EdgeListText;
  // Infer from the extension when the flag is absent.
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".mtx") return FileFormat::MatrixMarket;
  return FileFormat::EdgeListText;
}

const char* format_name(FileFormat f) {
  return f == FileFormat::MatrixMarket ? "mtx" : "edge-list";
}

CsrGraph load_csr(const std::string& path, const std::string& format_flag, FileFormat* used) {
  const FileFormat fmt = resolve_format(format_flag, path);
  if (used) *used = fmt;
  return build_csr(load_graph(path, fmt), /*symmetrize=*/true);
}

std::uint64_t count_self_loops(const CsrGraph& g) {
  std::uint64_t loops = 0;
  for (VertexId i = 0; i < g.order(); ++i)
    for (VertexId j : g.neighbors(i))
      if (j == i) ++loops;
  return loops;
}

json graph_meta(const CsrGraph& g, const std::string& path, FileFormat fmt) {
  const std::uint64_t loops = count_self_loops(g);
  return json{{"path", path},
              {"format", format_name(fmt)},
              {"n", g.order()},
              {"m", (g.directed_size() - loops) / 2 + loops},
              {"m2", g.directed_size()},
              {"total_weight", g.total_weight_2m() / 2.0}};
}

struct EngineOpts {
  LpaConfig cfg;
  std::string probing = "quadratic-double";
  std::string exec = "parallel";
  int precision = 32;
};

void add_engine_flags(CLI::App* cmd, EngineOpts& eo) {
  cmd->add_option("--tolerance", eo.cfg.tolerance,
                  "stop when the fraction of changed vertices drops below this")
      ->capture_default_str();
  cmd->add_option("--max-iterations", eo.cfg.max_iterations, "iteration cap")
      ->capture_default_str();
  cmd->add_option("--pl-period", eo.cfg.pl_period,
                  "restrict moves to smaller labels every k-th iteration (0 = never)")
      ->capture_default_str();
  cmd->add_option("--cc-period", eo.cfg.cc_period,
                  "validate and revert suspect moves every k-th iteration (0 = never)")
      ->capture_default_str();
  cmd->add_option("--probing", eo.probing, "hashtable collision policy")
      ->check(CLI::IsMember({"linear", "quadratic", "double", "quadratic-double"}))
      ->capture_default_str();
  cmd->add_option("--switch-degree", eo.cfg.switch_degree,
                  "degree at which a vertex moves from the scalar path to the team path")
      ->capture_default_str();
  cmd->add_option("--precision", eo.precision, "hashtable value width in bits")
      ->check(CLI::IsMember({32, 64}))
      ->capture_default_str();
  cmd->add_option("--exec", eo.exec, "execution mode")
      ->check(CLI::IsMember({"parallel", "sequential", "synchronous"}))
      ->capture_default_str();
  cmd->add_option("--workers", eo.cfg.workers, "worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  cmd->add_option("--seed", eo.cfg.seed, "seed echoed into reports")->capture_default_str();
  cmd->add_flag("--prune,!--no-prune", eo.cfg.prune,
                "skip vertices whose neighborhood did not change")
      ->capture_default_str();
}

LpaConfig resolve_engine(const EngineOpts& eo) {
  LpaConfig cfg = eo.cfg;
  cfg.strategy = *parse_probe_strategy(eo.probing);   // choices enforced by CLI11
  cfg.exec = *parse_exec_mode(eo.exec);
  cfg.precision = eo.precision == 64 ? ValuePrecision::Bits64 : ValuePrecision::Bits32;
  return cfg;
}

json config_echo(const LpaConfig& cfg) {
  return json{{"tolerance", cfg.tolerance},
              {"max_iterations", cfg.max_iterations},
              {"pl_period", cfg.pl_period},
              {"cc_period", cfg.cc_period},
              {"probing", to_string(cfg.strategy)},
              {"switch_degree", cfg.switch_degree},
              {"precision", cfg.precision == ValuePrecision::Bits64 ? 64 : 32},
              {"exec", to_string(cfg.exec)},
              {"workers", cfg.workers},
              {"seed", cfg.seed},
              {"prune", cfg.prune}};
}

std::optional<double> throughput(const CsrGraph& g, const RunStats& stats) {
  if (stats.elapsed_seconds <= 0.0) return std::nullopt;
  return static_cast<double>(g.directed_size()) * stats.iterations / stats.elapsed_seconds;
}

json run_entry(const CsrGraph& g, const LpaResult& r) {
  json e{{"iterations", r.stats.iterations},
         {"converged", r.stats.converged},
         {"pl_iterations", r.stats.pl_iterations},
         {"cc_reverts", r.stats.cc_reverts},
         {"delta_n_per_iter", r.stats.delta_n_per_iter},
         {"elapsed_seconds", r.stats.elapsed_seconds}};
  const auto tp = throughput(g, r.stats);
  e["throughput_edges_per_second"] = tp ? json(*tp) : json(nullptr);
  if (g.total_weight_2m() > 0.0) {
    e["modularity"] = modularity(g, r.labels);
  } else {
    e["modularity"] = nullptr;
  }
  e["communities"] = community_stats(g, r.labels).count;
  return e;
}

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot open output file: " + out_path);
  out << report.dump(2) << '\n';
  if (!out) throw ValidationError("failed writing " + out_path);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------- detect

struct DetectOpts {
  std::string input, format, out_report, out_membership;
  int reps = 1;
  EngineOpts engine;
};

int run_detect(const DetectOpts& opt) {
  FileFormat fmt;
  const CsrGraph g = load_csr(opt.input, opt.format, &fmt);
  const LpaConfig cfg = resolve_engine(opt.engine);

  json runs = json::array();
  std::vector<VertexId> last_labels;
  double sum_elapsed = 0.0, sum_q = 0.0, sum_iters = 0.0;
  int q_count = 0;
  for (int rep = 0; rep < opt.reps; ++rep) {
    LpaResult r = lpa(g, cfg);
    json e = run_entry(g, r);
    sum_elapsed += r.stats.elapsed_seconds;
    sum_iters += r.stats.iterations;
    if (e["modularity"].is_number()) {
      sum_q += e["modularity"].get<double>();
      ++q_count;
    }
    runs.push_back(std::move(e));
    last_labels = std::move(r.labels);
  }

  if (!opt.out_membership.empty()) write_membership(opt.out_membership, last_labels);

  json summary{{"reps", opt.reps},
               {"mean_elapsed_seconds", sum_elapsed / opt.reps},
               {"mean_iterations", sum_iters / opt.reps},
               {"mean_modularity", q_count > 0 ? json(sum_q / q_count) : json(nullptr)}};
  json report{{"graph", graph_meta(g, opt.input, fmt)},
              {"config", config_echo(cfg)},
              {"runs", std::move(runs)},
              {"summary", std::move(summary)}};
  emit(report, opt.out_report);
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
  std::string input, format, dimension = "mitigation", out_csv;
  int reps = 5;
  EngineOpts engine;
};

struct GridPoint {
  LpaConfig cfg;
};

std::vector<GridPoint> build_grid(const std::string& dimension, const LpaConfig& base) {
  std::vector<GridPoint> grid;
  auto push = [&](LpaConfig c) { grid.push_back({c}); };
  if (dimension == "mitigation") {
    LpaConfig c = base;
    c.pl_period = 0;
    c.cc_period = 0;
    push(c);  // unmitigated baseline
    for (int k = 1; k <= 4; ++k) {
      c = base;
      c.pl_period = k;
      c.cc_period = 0;
      push(c);
    }
    for (int k = 1; k <= 4; ++k) {
      c = base;
      c.pl_period = 0;
      c.cc_period = k;
      push(c);
    }
    for (int pl = 1; pl <= 4; ++pl)
      for (int cc = 1; cc <= 4; ++cc) {
        c = base;
        c.pl_period = pl;
        c.cc_period = cc;
        push(c);
      }
  } else if (dimension == "probing") {
    for (ProbeStrategy s : {ProbeStrategy::Linear, ProbeStrategy::Quadratic,
                            ProbeStrategy::DoubleHash, ProbeStrategy::QuadraticDouble}) {
      LpaConfig c = base;
      c.strategy = s;
      push(c);
    }
  } else if (dimension == "switch-degree") {
    for (std::uint32_t d = 2; d <= 256; d *= 2) {
      LpaConfig c = base;
      c.switch_degree = d;
      push(c);
    }
  } else {  // precision
    for (ValuePrecision p : {ValuePrecision::Bits32, ValuePrecision::Bits64}) {
      LpaConfig c = base;
      c.precision = p;
      push(c);
    }
  }
  return grid;
}

constexpr const char* kCsvHeader =
    "graph,exec,precision,probing,switch_degree,tolerance,max_iterations,pl_period,cc_period,"
    "workers,prune,seed,rep,iterations,converged,pl_iterations,cc_reverts,delta_n_final,"
    "elapsed_seconds,throughput_eps,modularity,communities,error";

std::string csv_prefix(const std::string& graph, const LpaConfig& c) {
  std::string row = csv_escape(graph);
  row += ',';
  row += to_string(c.exec);
  row += ',';
  row += std::to_string(c.precision == ValuePrecision::Bits64 ? 64 : 32);
  row += ',';
  row += to_string(c.strategy);
  row += ',';
  row += std::to_string(c.switch_degree);
  row += ',';
  row += fmt_double(c.tolerance);
  row += ',';
  row += std::to_string(c.max_iterations);
  row += ',';
  row += std::to_string(c.pl_period);
  row += ',';
  row += std::to_string(c.cc_period);
  row += ',';
  row += std::to_string(c.workers);
  row += ',';
  row += c.prune ? "true" : "false";
  row += ',';
  row += std::to_string(c.seed);
  return row;
}

int run_sweep(const SweepOpts& opt) {
  FileFormat fmt;
  const CsrGraph g = load_csr(opt.input, opt.format, &fmt);
  const std::vector<GridPoint> grid = build_grid(opt.dimension, resolve_engine(opt.engine));

  std::ofstream file;
  if (!opt.out_csv.empty()) {
    file.open(opt.out_csv);
    if (!file) throw ValidationError("cannot open output file: " + opt.out_csv);
  }
  std::ostream& out = opt.out_csv.empty() ? std::cout : file;
  out << kCsvHeader << '\n';

  for (const GridPoint& point : grid) {
    const std::string prefix = csv_prefix(opt.input, point.cfg);
    // Aggregates over the successful repetitions of this grid point.
    double sum_iter = 0, sum_conv = 0, sum_pl = 0, sum_cc = 0, sum_dn = 0, sum_el = 0, sum_tp = 0,
           sum_q = 0, sum_comm = 0;
    int ok = 0, tp_n = 0, q_n = 0;
    for (int rep = 0; rep < opt.reps; ++rep) {
      out << prefix << ',' << rep << ',';
      try {
        const LpaResult r = lpa(g, point.cfg);
        const double q = g.total_weight_2m() > 0.0 ? modularity(g, r.labels)
                                                   : std::numeric_limits<double>::quiet_NaN();
        const std::uint64_t communities = community_stats(g, r.labels).count;
        const std::uint64_t dn_final =
            r.stats.delta_n_per_iter.empty() ? 0 : r.stats.delta_n_per_iter.back();
        const auto tp = throughput(g, r.stats);
        out << r.stats.iterations << ',' << (r.stats.converged ? "true" : "false") << ','
            << r.stats.pl_iterations << ',' << r.stats.cc_reverts << ',' << dn_final << ','
            << fmt_double(r.stats.elapsed_seconds) << ',' << (tp ? fmt_double(*tp) : "") << ','
            << (std::isnan(q) ? "" : fmt_double(q)) << ',' << communities << ",\n";
        ++ok;
        sum_iter += r.stats.iterations;
        sum_conv += r.stats.converged ? 1 : 0;
        sum_pl += r.stats.pl_iterations;
        sum_cc += static_cast<double>(r.stats.cc_reverts);
        sum_dn += static_cast<double>(dn_final);
        sum_el += r.stats.elapsed_seconds;
        if (tp) {
          sum_tp += *tp;
          ++tp_n;
        }
        if (!std::isnan(q)) {
          sum_q += q;
          ++q_n;
        }
        sum_comm += static_cast<double>(communities);
      } catch (const std::exception& e) {
        out << ",,,,,,,,," << csv_escape(e.what()) << '\n';
      }
    }
    out << prefix << ",mean,";
    if (ok > 0) {
      out << fmt_double(sum_iter / ok) << ',' << fmt_double(sum_conv / ok) << ','
          << fmt_double(sum_pl / ok) << ',' << fmt_double(sum_cc / ok) << ','
          << fmt_double(sum_dn / ok) << ',' << fmt_double(sum_el / ok) << ','
          << (tp_n > 0 ? fmt_double(sum_tp / tp_n) : "") << ','
          << (q_n > 0 ? fmt_double(sum_q / q_n) : "") << ',' << fmt_double(sum_comm / ok) << ",\n";
    } else {
      out << ",,,,,,,,,all repetitions failed\n";
    }
  }
  if (!opt.out_csv.empty() && !file) throw ValidationError("failed writing " + opt.out_csv);
  return 0;
}

// ---------------------------------------------------------------- quality

struct QualityOpts {
  std::string input, format, membership, out_report;
};

int run_quality(const QualityOpts& opt) {
  FileFormat fmt;
  const CsrGraph g = load_csr(opt.input, opt.format, &fmt);
  const std::vector<VertexId> labels = read_membership(opt.membership, g.order());
  const CommunityStats stats = community_stats(g, labels);

  json hist = json::object();
  for (const auto& [size, count] : stats.size_histogram) hist[std::to_string(size)] = count;
  json report{{"graph", graph_meta(g, opt.input, fmt)},
              {"membership", opt.membership},
              {"modularity",
               g.total_weight_2m() > 0.0 ? json(modularity(g, labels)) : json(nullptr)},
              {"communities", stats.count},
              {"community_size_histogram", std::move(hist)}};
  emit(report, opt.out_report);
  return 0;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  std::string type = "planted", out, ground_truth;
  std::uint32_t n = 1000, communities = 10;
  double p_in = 0.1, p_out = 0.01;
  std::uint64_t seed = 0;
  std::uint32_t cliques = 8, clique_size = 8, leaves = 8;
};

int run_gen(const GenOpts& opt) {
  EdgeList edges;
  std::vector<VertexId> truth;
  if (opt.type == "planted") {
    PlantedGraph pg = planted_partition(opt.n, opt.communities, opt.p_in, opt.p_out, opt.seed);
    edges = std::move(pg.edges);
    truth = std::move(pg.ground_truth);
  } else if (opt.type == "ring") {
    PlantedGraph pg = ring_of_cliques(opt.cliques, opt.clique_size);
    edges = std::move(pg.edges);
    truth = std::move(pg.ground_truth);
  } else {  // star
    edges = star_graph(opt.leaves);
    if (!opt.ground_truth.empty())
      throw ValidationError("star graphs carry no planted communities");
  }

  const CsrGraph g = build_csr(edges, /*symmetrize=*/true);
  write_edge_list(g, opt.out);
  if (!truth.empty() && !opt.ground_truth.empty()) write_membership(opt.ground_truth, truth);

  json report{{"type", opt.type},
              {"path", opt.out},
              {"n", g.order()},
              {"edges", (g.directed_size() - count_self_loops(g)) / 2},
              {"seed", opt.seed}};
  if (!opt.ground_truth.empty()) report["ground_truth"] = opt.ground_truth;
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"label-propagation community detection benchmark"};
  app.require_subcommand(1);

  DetectOpts detect;
  CLI::App* cmd_detect = app.add_subcommand("detect", "run detection and report statistics");
  cmd_detect->add_option("--input", detect.input, "graph file")->required();
  cmd_detect->add_option("--format", detect.format, "input format (inferred from extension)")
      ->check(CLI::IsMember({"mtx", "edge-list"}));
  cmd_detect->add_option("--reps", detect.reps, "repetitions")->check(CLI::PositiveNumber);
  cmd_detect->add_option("--out-report", detect.out_report, "JSON report path (default stdout)");
  cmd_detect->add_option("--out-membership", detect.out_membership,
                         "write the final labeling as vertex<TAB>label");
  add_engine_flags(cmd_detect, detect.engine);

  SweepOpts sweep;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep one design dimension, emit CSV");
  cmd_sweep->add_option("--input", sweep.input, "graph file")->required();
  cmd_sweep->add_option("--format", sweep.format, "input format (inferred from extension)")
      ->check(CLI::IsMember({"mtx", "edge-list"}));
  cmd_sweep->add_option("--dimension", sweep.dimension, "axis to sweep")
      ->check(CLI::IsMember({"mitigation", "probing", "switch-degree", "precision"}))
      ->capture_default_str();
  cmd_sweep->add_option("--reps", sweep.reps, "repetitions per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_sweep->add_option("--out-csv", sweep.out_csv, "CSV path (default stdout)");
  add_engine_flags(cmd_sweep, sweep.engine);

  QualityOpts quality;
  CLI::App* cmd_quality = app.add_subcommand("quality", "score a membership file");
  cmd_quality->add_option("--input", quality.input, "graph file")->required();
  cmd_quality->add_option("--format", quality.format, "input format (inferred from extension)")
      ->check(CLI::IsMember({"mtx", "edge-list"}));
  cmd_quality->add_option("--membership", quality.membership, "vertex<TAB>label file")->required();
  cmd_quality->add_option("--out-report", quality.out_report, "JSON report path (default stdout)");

  GenOpts gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic graph");
  cmd_gen->add_option("--type", gen.type, "generator")
      ->check(CLI::IsMember({"planted", "ring", "star"}))
      ->capture_default_str();
  cmd_gen->add_option("--out", gen.out, "edge-list output path")->required();
  cmd_gen->add_option("--ground-truth", gen.ground_truth, "write the planted membership here");
  cmd_gen->add_option("--n", gen.n, "vertices (planted)")->capture_default_str();
  cmd_gen->add_option("--communities", gen.communities, "blocks (planted)")->capture_default_str();
  cmd_gen->add_option("--p-in", gen.p_in, "intra-block edge probability")->capture_default_str();
  cmd_gen->add_option("--p-out", gen.p_out, "cross-block edge probability")->capture_default_str();
  cmd_gen->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  cmd_gen->add_option("--cliques", gen.cliques, "cliques in the ring")->capture_default_str();
  cmd_gen->add_option("--clique-size", gen.clique_size, "vertices per clique")
      ->capture_default_str();
  cmd_gen->add_option("--leaves", gen.leaves, "leaves of the star")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_detect->parsed()) return run_detect(detect);
    if (cmd_sweep->parsed()) return run_sweep(sweep);
    if (cmd_quality->parsed()) return run_quality(quality);
    return run_gen(gen);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "internal error: out of memory\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
}
