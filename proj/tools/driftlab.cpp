// driftlab command-line front end.
//
// Every run writes into one output directory: run.json (config echo, input
// digests, verdicts) plus the command's CSV/JSON/DOT artifacts. Outputs carry
// no timestamps, so reruns with the same config are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftlab/chain_model.hpp"
#include "driftlab/drift_coeffs.hpp"
#include "driftlab/ea_sim.hpp"
#include "driftlab/exact_oracle.hpp"
#include "driftlab/io.hpp"
#include "driftlab/knapsack_bench.hpp"
#include "driftlab/time_bounds.hpp"

namespace fs = std::filesystem;
using namespace driftlab;
using io::Json;

namespace {

struct RunConfig {
  std::string command;
  std::string instance;
  std::size_t n = 8;
  std::vector<std::string> variants;
  std::vector<std::string> chains;
  std::string backend = "auto";
  std::string coeffs = "forward";
  std::string path;
  std::string mode = "rational";
  std::string start;
  std::optional<std::size_t> level;
  std::uint64_t trials = 10000;
  std::uint64_t cap = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = "driftlab-out";
};

// One analyzable input: a chain plus the state runs start from.
template <typename T>
struct Input {
  std::string label;
  std::string source;
  std::string digest;
  Chain<T> chain;
  StateIndex start = 0;
  std::optional<KnapsackInstance> instance;
};

class Run {
 public:
  explicit Run(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out) {}

  const fs::path& dir() const { return dir_; }
  Json& outputs() { return outputs_; }
  Json& inputs() { return inputs_; }

  void write(const std::string& name, std::string_view text) {
    io::write_text_file(dir_ / name, text);
    files_.push_back(name);
  }

  void verdict(const std::string& name, bool pass) {
    verdicts_[name] = pass ? "PASS" : "FAIL";
    all_pass_ = all_pass_ && pass;
    std::cout << name << ": " << (pass ? "PASS" : "FAIL") << '\n';
  }

  int finish() {
    Json doc;
    doc["command"] = cfg_.command;
    Json c;
    c["instance"] = cfg_.instance;
    c["n"] = cfg_.n;
    c["variants"] = cfg_.variants;
    c["chains"] = cfg_.chains;
    c["backend"] = cfg_.backend;
    c["coeffs"] = cfg_.coeffs;
    c["path"] = cfg_.path;
    c["mode"] = cfg_.mode;
    c["start"] = cfg_.start;
    if (cfg_.level) c["level"] = *cfg_.level;
    c["trials"] = cfg_.trials;
    c["cap"] = cfg_.cap;
    c["seed"] = cfg_.seed;
    doc["config"] = std::move(c);
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    doc["verdicts"] = verdicts_;
    doc["files"] = files_;
    doc["status"] = all_pass_ ? "PASS" : "FAIL";
    io::write_text_file(dir_ / "run.json", doc.dump(2) + "\n");
    std::cout << "output: " << dir_.string() << '\n';
    return all_pass_ ? 0 : 1;
  }

 private:
  const RunConfig& cfg_;
  fs::path dir_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::object();
  Json verdicts_ = Json::object();
  std::vector<std::string> files_;
  bool all_pass_ = true;
};

template <typename T>
Json scalar_json(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return format_rational(x);
  }
}

template <typename T>
bool leq(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, double>) {
    return a <= b + 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  } else {
    return a <= b;
  }
}

template <typename T>
bool same(const T& a, const T& b) {
  return leq(a, b) && leq(b, a);
}

KnapsackInstance load_instance(const RunConfig& cfg) {
  if (cfg.instance.size() > 5 && cfg.instance.ends_with(".json")) {
    return io::instance_from_json(io::read_json_file(cfg.instance));
  }
  return make_instance(cfg.instance, cfg.n);
}

RationalChain knapsack_chain(const RunConfig& cfg, const KnapsackInstance& inst, Variant v, std::string& backend) {
  backend = cfg.backend;
  if (backend == "auto") backend = inst.exchangeable() ? "lumped" : "full";
  if (backend == "lumped") return build_lumped_chain(inst, v);
  if (backend == "full") return build_full_chain(inst, v);
  throw InputError("unknown backend: " + backend + " (expected auto, lumped or full)");
}

template <typename T>
StateIndex pick_start(const Chain<T>& chain, const std::string& requested) {
  if (!requested.empty()) {
    if (auto s = chain.find(requested)) return *s;
    throw InputError("start state '" + requested + "' not in chain");
  }
  const LevelPartition p = build_level_partition(chain);
  return p.level(p.top()).front();
}

template <typename T>
std::vector<Input<T>> load_inputs(const RunConfig& cfg, Run& run) {
  const bool have_instance = !cfg.instance.empty();
  const bool have_chain = !cfg.chains.empty();
  if (have_instance == have_chain) throw InputError("give exactly one input source: --instance or --chain");

  std::vector<Input<T>> out;
  if (have_chain) {
    for (const auto& file : cfg.chains) {
      const std::string text = io::read_text_file(file);
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw InputError(file + ": " + e.what());
      }
      Input<T> in;
      in.label = fs::path(file).stem().string();
      in.source = file;
      in.digest = io::digest(text);
      in.chain = io::chain_from_json<T>(doc);
      in.start = pick_start(in.chain, cfg.start);
      out.push_back(std::move(in));
    }
  } else {
    const KnapsackInstance inst = load_instance(cfg);
    std::vector<std::string> variants = cfg.variants;
    if (variants.empty()) variants = {"feasibility"};
    for (const auto& name : variants) {
      const Variant v = parse_variant(name);
      std::string backend;
      RationalChain exact = knapsack_chain(cfg, inst, v, backend);
      Input<T> in;
      in.label = inst.id() + "_n" + std::to_string(inst.n()) + "_" + name;
      in.source = inst.id() + " n=" + std::to_string(inst.n()) + " variant=" + name + " backend=" + backend;
      in.digest = io::digest(io::instance_to_json(inst).dump() + "|" + name + "|" + backend);
      if constexpr (std::is_same_v<T, double>) {
        in.chain = to_float_chain(exact);
      } else {
        in.chain = std::move(exact);
      }
      const std::string empty = backend == "lumped" ? LevelClass{}.id() : solution_id(inst, 0);
      in.start = pick_start(in.chain, cfg.start.empty() ? empty : cfg.start);
      in.instance = inst;
      out.push_back(std::move(in));
    }
  }
  for (const auto& in : out) {
    run.inputs().push_back({{"label", in.label}, {"source", in.source}, {"digest", in.digest},
                            {"states", in.chain.size()}, {"start", in.chain.state(in.start).id}});
  }
  return out;
}

// Exact value followed by its float approximation when they differ in form.
template <typename T>
std::string show(const Extended<T>& x) {
  if (!x.finite()) return "unbounded";
  if constexpr (std::is_same_v<T, double>) {
    return format_double(x.value());
  } else {
    if (x.value().get_den() == 1) return x.format();
    return x.format() + " (~" + format_double(x.value().get_d()) + ")";
  }
}

std::string suffix(std::size_t count, const std::string& label) { return count > 1 ? "_" + label : ""; }

// ------------------------------------------------------------------ oracle

template <typename T>
int cmd_oracle(const RunConfig& cfg) {
  Run run(cfg);
  const auto inputs = load_inputs<T>(cfg, run);
  for (const auto& in : inputs) {
    const LevelPartition p = build_level_partition(in.chain);
    const TimeProfile<T> times = time_profile(in.chain, p);
    const Decomposition<T> dec = decompose_hitting_time(in.chain, p, in.start);

    std::ostringstream states;
    states << "state,level,fitness,m,exit_time\n";
    for (StateIndex s = 0; s < in.chain.size(); ++s) {
      states << in.chain.state(s).id << ',' << p.level_of(s) << ',' << format_rational(in.chain.state(s).fitness)
             << ',' << format_scalar(times.hitting_time[s]) << ',' << format_scalar(times.exit_time[s]) << '\n';
    }
    std::ostringstream hitting;
    hitting << "state";
    for (LevelIndex l = 0; l < p.level_count(); ++l) hitting << ",h_" << l;
    hitting << '\n';
    std::vector<HittingProfile<T>> profiles;
    for (LevelIndex l = 0; l < p.level_count(); ++l) profiles.push_back(hitting_probabilities(in.chain, p, l));
    for (StateIndex s = 0; s < in.chain.size(); ++s) {
      hitting << in.chain.state(s).id;
      for (const auto& h : profiles) hitting << ',' << format_scalar(h.probability[s]);
      hitting << '\n';
    }
    std::ostringstream decomposition;
    decomposition << "level,staying\n";
    for (LevelIndex l = 1; l < dec.staying.size(); ++l) decomposition << l << ',' << format_scalar(dec.staying[l]) << '\n';

    const std::string sfx = suffix(inputs.size(), in.label);
    run.write("oracle" + sfx + ".csv", states.str());
    run.write("hitting" + sfx + ".csv", hitting.str());
    run.write("decomposition" + sfx + ".csv", decomposition.str());

    const T& m = times.hitting_time[in.start];
    run.outputs()[in.label] = {{"start", in.chain.state(in.start).id},
                               {"levels", p.level_count()},
                               {"m", scalar_json(m)},
                               {"m_float", ScalarTraits<T>::to_double(m)},
                               {"decomposition_total", scalar_json(dec.total)}};
    std::cout << in.label << ": m(" << in.chain.state(in.start).id << ") = " << format_scalar(m) << " ~ "
              << format_double(ScalarTraits<T>::to_double(m)) << '\n';
    run.verdict(in.label + " decomposition", same(dec.total, m));
  }
  return run.finish();
}

// ----------------------------------------------------------------- analyze

template <typename T>
struct Bounds {
  BoundReport<T> lower;
  BoundReport<T> upper;
  std::optional<CoefficientTable<T>> lower_table;
  std::optional<CoefficientTable<T>> upper_table;
};

template <typename T>
Bounds<T> compute_bounds(const RunConfig& cfg, const LevelStats<T>& stats, LevelIndex k) {
  const CoeffMethod method = parse_method(cfg.coeffs);
  Bounds<T> b;
  auto table = [&](Direction d) -> CoefficientTable<T> {
    switch (method) {
      case CoeffMethod::forward: return forward_table(stats, d);
      case CoeffMethod::level_recursion: return level_recursion_table(stats, d);
      case CoeffMethod::reverse: return reverse_table(stats, d);
      case CoeffMethod::allpath: return allpath_table(stats, d);
      case CoeffMethod::type_c: return type_c_table(stats, d);
      case CoeffMethod::type_cl:
      case CoeffMethod::random_init: return type_cl_table(stats, d);
      case CoeffMethod::path: {
        const LevelGraph graph = build_level_graph(stats);
        std::vector<Path> explicit_paths;
        if (!cfg.path.empty()) {
          std::vector<LevelIndex> vs;
          std::stringstream ss(cfg.path);
          for (std::string part; std::getline(ss, part, ',');) vs.push_back(std::stoul(part));
          explicit_paths.push_back(select_path(graph, vs.front(), vs.back(), PathStrategy::explicit_list, vs));
        }
        return path_table(stats, graph, k, d, PathStrategy::shortest, explicit_paths);
      }
    }
    throw InputError("unsupported coefficient method");
  };
  if (k == 0) {
    // Start already optimal: both bounds are zero.
    b.lower.direction = Direction::lower;
    b.upper.direction = Direction::upper;
    b.lower.method = b.upper.method = cfg.coeffs;
    return b;
  }
  if (method == CoeffMethod::random_init) {
    const auto dist = point_distribution<T>(stats.top(), k);
    const auto c = random_init_coeffs(stats, std::span<const T>(dist));
    b.lower = doerr_kotzing_bound(stats, std::span<const T>(c));
    b.lower.start_level = k;
  } else {
    b.lower_table = table(Direction::lower);
    b.lower = lower_time_bound(stats, *b.lower_table, k);
  }
  b.upper_table = table(Direction::upper);
  b.upper = upper_time_bound(stats, *b.upper_table, k);
  return b;
}

template <typename T>
LevelIndex analysis_level(const RunConfig& cfg, const LevelPartition& p, StateIndex start) {
  if (cfg.level) {
    if (*cfg.level > p.top()) throw InputError("--level exceeds K = " + std::to_string(p.top()));
    return *cfg.level;
  }
  if (!cfg.path.empty() && cfg.coeffs == "path") return std::stoul(cfg.path.substr(0, cfg.path.find(',')));
  return p.level_of(start);
}

template <typename T>
int cmd_analyze(const RunConfig& cfg) {
  Run run(cfg);
  const auto inputs = load_inputs<T>(cfg, run);
  for (const auto& in : inputs) {
    const LevelPartition p = build_level_partition(in.chain);
    const LevelStats<T> stats = level_stats(in.chain, p);
    const LevelIndex k = analysis_level<T>(cfg, p, in.start);
    const Bounds<T> b = compute_bounds(cfg, stats, k);

    // Exact reference: the level extrema of m over S_k.
    const auto m = mean_hitting_time(in.chain, p);
    T m_min = m[p.level(k).front()], m_max = m_min;
    for (StateIndex s : p.level(k)) {
      m_min = std::min(m_min, m[s]);
      m_max = std::max(m_max, m[s]);
    }

    const std::string sfx = suffix(inputs.size(), in.label);
    if (b.lower_table) run.write("coefficients_lower" + sfx + ".csv", io::coefficient_csv(*b.lower_table));
    if (b.upper_table) run.write("coefficients_upper" + sfx + ".csv", io::coefficient_csv(*b.upper_table));
    run.write("bound_lower" + sfx + ".csv", io::bound_report_csv(b.lower));
    run.write("bound_upper" + sfx + ".csv", io::bound_report_csv(b.upper));

    Json out;
    out["level"] = k;
    out["lower"] = io::bound_report_json(b.lower);
    out["upper"] = io::bound_report_json(b.upper);
    out["exact_min"] = scalar_json(m_min);
    out["exact_max"] = scalar_json(m_max);
    if (b.lower_table && !b.lower_table->note().empty()) out["paths_lower"] = b.lower_table->note();
    if (b.upper_table && !b.upper_table->note().empty()) out["paths_upper"] = b.upper_table->note();
    run.write("bounds" + sfx + ".json", out.dump(2) + "\n");
    run.outputs()[in.label] = std::move(out);

    std::cout << in.label << " level " << k << ": lower = " << show(b.lower.value) << ", exact = ["
              << show(Extended<T>(m_min)) << ", " << show(Extended<T>(m_max)) << "], upper = " << show(b.upper.value)
              << '\n';
    if (!b.upper.value.finite()) std::cout << in.label << ": upper bound is unbounded (some climb probability is 0)\n";
    const bool sandwich = leq(b.lower.value.value(), m_min) &&
                          (!b.upper.value.finite() || leq(m_max, b.upper.value.value()));
    run.verdict(in.label + " sandwich", sandwich);
    if (k > 0) {
      if (!b.lower.level_values.empty()) {
        run.verdict(in.label + " drift lower", verify_drift_inequality(in.chain, p, b.lower).ok());
      }
      run.verdict(in.label + " drift upper", verify_drift_inequality(in.chain, p, b.upper).ok());
    }
  }
  return run.finish();
}

// ----------------------------------------------------------------- compare

template <typename T>
int cmd_compare(const RunConfig& cfg) {
  RunConfig c = cfg;
  if (c.chains.empty() && c.variants.empty()) c.variants = {"greedy", "feasibility"};
  Run run(c);
  const auto inputs = load_inputs<T>(c, run);
  if (inputs.size() != 2) throw InputError("compare needs exactly two variants or two chains (A then B)");

  std::vector<Bounds<T>> bounds;
  std::vector<T> exact;
  for (const auto& in : inputs) {
    const LevelPartition p = build_level_partition(in.chain);
    const LevelStats<T> stats = level_stats(in.chain, p);
    bounds.push_back(compute_bounds(c, stats, p.level_of(in.start)));
    exact.push_back(mean_hitting_time(in.chain, p)[in.start]);
  }
  const RatioInterval<T> ratio =
      compare_algorithms(bounds[0].lower, bounds[0].upper, bounds[1].lower, bounds[1].upper,
                         std::optional<T>(exact[0]), std::optional<T>(exact[1]));

  Json out;
  out["a"] = inputs[0].label;
  out["b"] = inputs[1].label;
  out["m_a"] = scalar_json(exact[0]);
  out["m_b"] = scalar_json(exact[1]);
  out["interval_lower"] = ratio.lower.format();
  out["interval_upper"] = ratio.upper.format();
  if (ratio.exact) {
    out["exact_ratio"] = scalar_json(*ratio.exact);
    out["exact_ratio_float"] = ScalarTraits<T>::to_double(*ratio.exact);
  }
  run.write("compare.json", out.dump(2) + "\n");
  run.outputs()["compare"] = out;

  std::cout << "ratio " << inputs[0].label << " / " << inputs[1].label << ": interval [" << show(ratio.lower)
            << ", " << show(ratio.upper) << "]";
  if (ratio.exact) std::cout << ", exact " << show(Extended<T>(*ratio.exact));
  std::cout << '\n';
  if (ratio.exact) {
    const bool inside = leq(ratio.lower.value(), *ratio.exact) &&
                        (!ratio.upper.finite() || leq(*ratio.exact, ratio.upper.value()));
    run.verdict("exact ratio inside interval", inside);
  }
  return run.finish();
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg) {
  Run run(cfg);
  if (cfg.instance.empty() || !cfg.chains.empty()) throw InputError("simulate needs --instance (chains cannot be run)");
  const KnapsackInstance inst = load_instance(cfg);
  std::vector<std::string> variants = cfg.variants;
  if (variants.empty()) variants = {"feasibility"};
  run.inputs().push_back({{"label", inst.id()}, {"digest", io::digest(io::instance_to_json(inst).dump())}});

  std::ostringstream csv;
  csv << sim_csv_header() << '\n';
  SimOptions opt;
  opt.trials = cfg.trials;
  opt.cap = cfg.cap;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  if (!cfg.start.empty()) opt.start = parse_solution(inst, cfg.start);
  for (const auto& name : variants) {
    const Variant v = parse_variant(name);
    const SimEstimate e = estimate_hitting_time(inst, v, opt);
    csv << sim_csv_row(inst, v, e) << '\n';
    for (const auto& w : e.warnings) std::cerr << "warning: " << name << ": " << w << '\n';
    run.outputs()[name] = {{"mean", e.mean}, {"se", e.standard_error}, {"censored", e.censored}};
    std::cout << inst.id() << " n=" << inst.n() << ' ' << name << ": mean " << format_double(e.mean) << " se "
              << format_double(e.standard_error) << " censored " << e.censored << '\n';
  }
  run.write("sim.csv", csv.str());
  return run.finish();
}

// ------------------------------------------------------------ export-graph

template <typename T>
int cmd_export_graph(const RunConfig& cfg) {
  Run run(cfg);
  const auto inputs = load_inputs<T>(cfg, run);
  for (const auto& in : inputs) {
    const LevelPartition p = build_level_partition(in.chain);
    const LevelGraph graph = build_level_graph(level_stats(in.chain, p));
    const std::string name = "graph" + suffix(inputs.size(), in.label) + ".dot";
    run.write(name, io::level_graph_dot(in.chain, p, graph));
    run.outputs()[in.label] = {{"vertices", graph.vertex_count()}, {"edges", graph.arcs().size()}};
    std::cout << in.label << ": " << graph.vertex_count() << " vertices, " << graph.arcs().size() << " edges -> "
              << name << '\n';
  }
  return run.finish();
}

template <typename T>
int dispatch(const RunConfig& cfg) {
  if (cfg.command == "oracle") return cmd_oracle<T>(cfg);
  if (cfg.command == "analyze") return cmd_analyze<T>(cfg);
  if (cfg.command == "compare") return cmd_compare<T>(cfg);
  if (cfg.command == "export-graph") return cmd_export_graph<T>(cfg);
  return cmd_simulate(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: hitting-time bounds for elitist evolutionary algorithms"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--instance", cfg.instance, "KP1..KP6, or a custom instance JSON file");
    sub->add_option("--n", cfg.n, "item count for built-in instances");
    sub->add_option("--variant", cfg.variants, "feasibility or greedy (repeatable)");
    sub->add_option("--chain", cfg.chains, "chain JSON file (repeatable)");
    sub->add_option("--backend", cfg.backend, "auto, lumped or full")
        ->check(CLI::IsMember({"auto", "lumped", "full"}));
    sub->add_option("--start", cfg.start, "start state id (default: empty knapsack or a lowest-level state)");
    sub->add_option("--mode", cfg.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--out", cfg.out, "output directory (DRIFTLAB_OUT overrides)");
  };
  auto add_coeffs = [&](CLI::App* sub) {
    sub->add_option("--coeffs", cfg.coeffs, "coefficient method")
        ->check(CLI::IsMember({"forward", "level_recursion", "reverse", "allpath", "path", "type_c", "type_cl",
                               "random_init"}));
    sub->add_option("--path", cfg.path, "explicit level path, e.g. 12,8,1");
    sub->add_option("--level", cfg.level, "start level k for the bounds");
  };

  auto* oracle = app.add_subcommand("oracle", "exact hitting times, probabilities and decomposition");
  add_input(oracle);
  auto* analyze = app.add_subcommand("analyze", "coefficient tables and linear time bounds");
  add_input(analyze);
  add_coeffs(analyze);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of the EA variants");
  add_input(simulate);
  simulate->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--cap", cfg.cap)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed);
  simulate->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
  auto* compare = app.add_subcommand("compare", "ratio of mean hitting times A / B");
  add_input(compare);
  add_coeffs(compare);
  auto* graph = app.add_subcommand("export-graph", "level digraph in DOT format");
  add_input(graph);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share exit code 2 with other input errors; --help stays 0.
    return app.exit(e) == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (const char* env = std::getenv("DRIFTLAB_OUT"); env && *env) cfg.out = env;

  try {
    return cfg.mode == "float" ? dispatch<double>(cfg) : dispatch<Rational>(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
