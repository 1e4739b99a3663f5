#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "popproto/errors.hpp"
#include "popproto/experiment.hpp"

using namespace popproto;

namespace {

struct GraphFlags {
  std::string descriptor_file;
  std::string family;
  std::vector<std::size_t> n;
  std::size_t delta = 3;
  std::size_t k = 0;
  std::optional<std::uint64_t> graph_seed;
  std::string edge_file;

  void add(CLI::App* cmd, bool sweep) {
    if (!sweep) cmd->add_option("--graph", descriptor_file, "graph descriptor JSON file");
    cmd->add_option("--family", family,
                    "path | star | balanced_binary | random_bounded_degree | lower_bound | file");
    cmd->add_option("--n", n, "node count(s), comma separated")->delimiter(',');
    cmd->add_option("--delta", delta, "degree cap for random trees")->capture_default_str();
    cmd->add_option("--k", k, "path parameter of the lower-bound tree (default n/8)");
    cmd->add_option("--graph-seed", graph_seed, "seed of a random tree (default: run seed)");
    cmd->add_option("--file", edge_file, "edge-list file for --family file");
  }

  std::vector<GraphDescriptor> points() const {
    if (!descriptor_file.empty()) {
      std::ifstream in(descriptor_file);
      if (!in) throw InvalidParameter("cannot open " + descriptor_file);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("bad descriptor: ") + e.what());
      }
      return {descriptor_from_json(j)};
    }
    if (family.empty()) throw InvalidParameter("give --graph or --family");
    const GraphFamily f = parse_family(family);
    if (f == GraphFamily::FromFile) {
      GraphDescriptor d;
      d.family = f;
      d.path = edge_file;
      std::ifstream in(edge_file);
      if (!in) throw InvalidParameter("cannot open " + edge_file);
      d.n = read_edge_list(in).node_count();
      return {d};
    }
    if (n.empty()) throw InvalidParameter("give --n");
    std::vector<GraphDescriptor> out;
    for (std::size_t size : n) {
      GraphDescriptor d;
      d.family = f;
      d.n = size;
      if (f == GraphFamily::RandomBoundedDegree) {
        d.delta_cap = delta;
        d.seed = graph_seed;
      }
      if (f == GraphFamily::LowerBoundTnk) d.k = k ? k : size / 8;
      out.push_back(d);
    }
    return out;
  }
};

struct RunFlags {
  std::string stack = "majority";
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  std::uint64_t cap = 0;
  std::optional<std::uint64_t> tail;
  std::string out;
  std::string trace;
  std::string instrument = "light";
  std::string init = "fresh";
  std::string inputs = "alternating";
  std::string explicit_inputs;
  std::vector<std::size_t> candidates;
  std::size_t alpha = 7;
  std::size_t threads = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--stack", stack, "coloring | orientation | leader | majority | two-colour | count | full")
        ->capture_default_str();
    cmd->add_option("--seeds", seeds, "seeds per graph point")->capture_default_str();
    cmd->add_option("--seed-base", seed_base, "first seed")->capture_default_str();
    cmd->add_option("--cap", cap, "step cap (default 50 n^2 ceil(log2 n))");
    cmd->add_option("--tail", tail, "verification tail after stability");
    cmd->add_option("--out", out, "JSONL output (default stdout)");
    cmd->add_option("--trace", trace, "per-step JSONL trace (runs serially)");
    cmd->add_option("--instrument", instrument, "full | light | off")->capture_default_str();
    cmd->add_option("--init", init, "fresh | random")->capture_default_str();
    cmd->add_option("--inputs", inputs, "majority inputs: alternating | all-a | random | explicit")
        ->capture_default_str();
    cmd->add_option("--input-string", explicit_inputs, "explicit majority inputs, e.g. AABAB");
    cmd->add_option("--candidates", candidates, "leader candidate nodes, comma separated")
        ->delimiter(',');
    cmd->add_option("--alpha", alpha, "palette factor")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (default POPPROTO_THREADS)");
  }

  StackOptions stack_options(std::size_t n) const {
    StackOptions o;
    o.alpha = alpha;
    if (init == "fresh")
      o.init = InitMode::Fresh;
    else if (init == "random")
      o.init = InitMode::Random;
    else
      throw InvalidParameter("unknown init mode '" + init + "'");
    o.inputs = parse_majority_inputs(explicit_inputs.empty() ? inputs : "explicit");
    for (char ch : explicit_inputs) {
      if (ch != 'A' && ch != 'B') throw InvalidParameter("inputs must be A or B");
      o.explicit_inputs.push_back(ch == 'A' ? Opinion::A : Opinion::B);
    }
    if (!candidates.empty()) {
      o.leader_candidates.assign(n, false);
      for (std::size_t v : candidates) {
        if (v >= n) throw InvalidParameter("candidate node out of range");
        o.leader_candidates[v] = true;
      }
    }
    return o;
  }
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw InvalidParameter("cannot write " + path);
  return file;
}

std::vector<RunRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open " + path);
  return read_jsonl(in);
}

int do_run(const GraphFlags& gf, const RunFlags& rf) {
  ExperimentSpec spec;
  spec.points = gf.points();
  spec.stack = rf.stack;
  spec.seeds = rf.seeds;
  spec.seed_base = rf.seed_base;
  spec.step_cap = rf.cap;
  spec.tail = rf.tail;
  spec.threads = rf.threads;
  const std::size_t n = spec.points.front().n;
  for (const auto& p : spec.points)
    if (p.n != n && (!rf.candidates.empty() || !rf.explicit_inputs.empty()))
      throw InvalidParameter("per-node options need a single graph size");
  spec.stack_options = rf.stack_options(n);
  spec.validate();
  const Instrumentation level = parse_instrumentation(rf.instrument);

  std::vector<RunRecord> records;
  if (!rf.trace.empty() && level != Instrumentation::Off) {
    std::ofstream trace(rf.trace);
    if (!trace) throw InvalidParameter("cannot write " + rf.trace);
    TraceWriter writer(trace, level == Instrumentation::Full);
    for (const auto& point : spec.points)
      for (std::size_t i = 0; i < spec.seeds; ++i) {
        const std::uint64_t seed = spec.seed_base + i;
        nlohmann::ordered_json header;
        header["run"] = {{"graph", to_json(point.resolve(seed))}, {"seed", seed}};
        trace << header.dump() << '\n';
        records.push_back(run_single(point, spec.stack, spec.stack_options, seed, spec.step_cap,
                                     spec.tail, {&writer}));
      }
  } else {
    records = run_experiment(spec);
  }

  std::ofstream file;
  write_jsonl(open_out(rf.out, file), records);
  std::size_t capped = 0;
  for (const auto& r : records) capped += r.capped;
  std::cerr << records.size() << " runs, " << capped << " capped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population protocols on trees: simulation and scaling experiments"};
  app.require_subcommand(1);

  GraphFlags run_graph, sweep_graph;
  RunFlags run_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "run a stack on one graph over several seeds");
  run_graph.add(run, false);
  run_flags.add(run);

  auto* sweep = app.add_subcommand("sweep", "run a stack over a family of sizes");
  sweep_graph.add(sweep, true);
  sweep_flags.add(sweep);

  std::string fit_in, fit_out, fit_layer;
  auto* fit = app.add_subcommand("fit", "log-log slope of mean steps against n");
  fit->add_option("--in", fit_in, "JSONL records")->required();
  fit->add_option("--out", fit_out, "CSV output (default stdout)");
  fit->add_option("--layer", fit_layer, "layer whose steps are fitted (default: top layer)");

  std::string stats_in, stats_out, stats_layer;
  auto* stats = app.add_subcommand("stats", "per-point mean, median, p95 and capped counts");
  stats->add_option("--in", stats_in, "JSONL records")->required();
  stats->add_option("--out", stats_out, "CSV output (default stdout)");
  stats->add_option("--layer", stats_layer, "layer to summarise (default: top layer)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return do_run(run_graph, run_flags);
    if (*sweep) {
      if (sweep_graph.family.empty()) throw InvalidParameter("sweep needs --family");
      return do_run(sweep_graph, sweep_flags);
    }
    if (*fit) {
      auto points = summarize(load_records(fit_in), fit_layer);
      auto f = fit_scaling(points);
      std::ofstream file;
      write_fit_csv(open_out(fit_out, file), points, f);
      std::cerr << "slope " << f.slope << "  intercept " << f.intercept << "  R^2 " << f.r_squared
                << '\n';
      return 0;
    }
    if (*stats) {
      auto points = summarize(load_records(stats_in), stats_layer);
      std::ofstream file;
      write_summary_csv(open_out(stats_out, file), points);
      for (const auto& p : points)
        if (p.warning)
          std::cerr << "warning: " << p.capped << " capped run(s) excluded at n = " << p.graph.n
                    << '\n';
      return 0;
    }
  } catch (const FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return 3;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
