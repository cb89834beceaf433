// wslab: generate computation dags, run the work-stealing simulator and
// sweeps, drive the threaded executor, and run the verification suites.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wslab/dag.hpp"
#include "wslab/executor.hpp"
#include "wslab/history.hpp"
#include "wslab/potential.hpp"
#include "wslab/sim.hpp"
#include "wslab/verify.hpp"

namespace {

using namespace wslab;

std::vector<std::uint32_t> parse_range(const std::string& s) {
  // "a:b:step" (inclusive) or a single value
  std::vector<std::uint32_t> out;
  std::uint32_t a = 0, b = 0, step = 1;
  if (std::sscanf(s.c_str(), "%u:%u:%u", &a, &b, &step) == 3) {
    WSLAB_REQUIRE(step > 0, "range step must be positive");
    for (std::uint32_t v = a; v <= b; v += step) out.push_back(v);
  } else {
    out.push_back(static_cast<std::uint32_t>(std::stoul(s)));
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

DagSpec::Kind parse_kind(const std::string& s) {
  if (s == "regular") return DagSpec::Kind::regular;
  if (s == "irregular") return DagSpec::Kind::irregular;
  throw CLI::ValidationError("--kind must be regular or irregular");
}

std::vector<SchedulerKind> parse_schedulers(const std::string& s) {
  std::vector<SchedulerKind> out;
  for (const auto& name : split_csv(s)) {
    auto k = scheduler_from_name(name);
    if (!k) throw CLI::ValidationError("unknown scheduler: " + name);
    out.push_back(*k);
  }
  return out;
}

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      WSLAB_REQUIRE(file.good(), "cannot open output file " + path);
      os = &file;
    }
  }
};

int print_suites(const std::vector<SuiteResult>& suites) {
  bool all_ok = true;
  for (const auto& s : suites) {
    std::cout << "suite " << s.name << ": " << (s.passed ? "pass" : "FAIL")
              << '\n';
    for (const auto& line : s.lines) std::cout << line << '\n';
    all_ok = all_ok && s.passed;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"work-stealing scheduling laboratory"};
  app.require_subcommand(1);

  std::string kind = "regular";
  std::string depths_arg = "0";
  std::uint32_t depth = 0;
  double lambda = 0.05;
  std::uint64_t seed = 0;
  std::uint32_t seeds = 1;
  std::uint32_t procs = 64;
  std::string procs_list = "64";
  std::string schedulers = "lcws";
  std::string out_path;
  std::string trace = "none";
  std::uint32_t workers = 0;
  std::string suite = "all";
  std::string history_file;

  auto* gen = app.add_subcommand("gen-dag", "generate a dag file");
  gen->add_option("--kind", kind);
  gen->add_option("--depth", depth)->required();
  gen->add_option("--lambda", lambda);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path);

  auto* run = app.add_subcommand("run", "run one simulation, emit one CSV row");
  run->add_option("--kind", kind);
  run->add_option("--depth", depth)->required();
  run->add_option("--lambda", lambda);
  run->add_option("--procs", procs);
  run->add_option("--scheduler", schedulers);
  run->add_option("--seed", seed);
  run->add_option("--trace", trace);
  run->add_option("--out", out_path);

  auto* sweep_span = app.add_subcommand("sweep-span", "sweep over dag depths");
  sweep_span->add_option("--kind", kind);
  sweep_span->add_option("--depths", depths_arg)->required();
  sweep_span->add_option("--lambda", lambda);
  sweep_span->add_option("--procs", procs);
  sweep_span->add_option("--schedulers", schedulers);
  sweep_span->add_option("--seeds", seeds);
  sweep_span->add_option("--out", out_path);

  auto* sweep_procs =
      app.add_subcommand("sweep-procs", "sweep over processor counts");
  sweep_procs->add_option("--kind", kind);
  sweep_procs->add_option("--depth", depth)->required();
  sweep_procs->add_option("--lambda", lambda);
  sweep_procs->add_option("--procs-list", procs_list);
  sweep_procs->add_option("--schedulers", schedulers);
  sweep_procs->add_option("--seeds", seeds);
  sweep_procs->add_option("--out", out_path);

  auto* compare =
      app.add_subcommand("compare", "run both schedulers and print ratios");
  compare->add_option("--kind", kind);
  compare->add_option("--depths", depths_arg)->required();
  compare->add_option("--lambda", lambda);
  compare->add_option("--procs", procs);
  compare->add_option("--seeds", seeds);
  compare->add_option("--out", out_path);

  auto* exec = app.add_subcommand("exec", "execute a dag on real workers");
  exec->add_option("--kind", kind);
  exec->add_option("--depth", depth)->required();
  exec->add_option("--lambda", lambda);
  exec->add_option("--seed", seed);
  exec->add_option("--workers", workers);

  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite,
                     "deque|semantics|lemmas|serial|ratio|scaling|ballsbins|"
                     "phase|executor|all");
  auto* verify_depth = verify->add_option("--depth", depth);
  auto* verify_procs = verify->add_option("--procs", procs);
  verify->add_option("--seeds", seeds);
  verify->add_option("--kind", kind);
  verify->add_option("--lambda", lambda);

  auto* check = app.add_subcommand("check-history",
                                   "check a history file against the relaxed "
                                   "deque semantics");
  check->add_option("file", history_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      DagSpec spec{parse_kind(kind), depth, lambda, seed};
      CompDag dag = generate(spec);
      OutStream out(out_path);
      dag.serialize(*out.os);
      return 0;
    }

    if (*run) {
      auto scheds = parse_schedulers(schedulers);
      WSLAB_REQUIRE(scheds.size() == 1, "run takes exactly one --scheduler");
      DagSpec spec{parse_kind(kind), depth, lambda, seed};
      CompDag dag = generate(spec);
      SimConfig cfg;
      cfg.processors = procs;
      cfg.scheduler = scheds[0];
      cfg.master_seed = seed;
      if (trace == "full")
        cfg.trace_level = TraceLevel::full;
      else if (trace == "counters")
        cfg.trace_level = TraceLevel::counters;
      SimResult r = run_sim(dag, cfg);
      {
        OutStream out(out_path);
        std::vector<RunRow> rows{
            RunRow{SweepItem{spec, procs, scheds[0], seed}, dag.t1(),
                   dag.t_inf(), r.metrics}};
        write_csv(*out.os, rows);
      }
      if (cfg.trace_level == TraceLevel::full &&
          scheds[0] == SchedulerKind::lcws) {
        AnalyzerReport drops = check_drops(dag, r.trace);
        AnalyzerReport top = check_top_heavy(dag, r.trace);
        AnalyzerReport structural = check_structural(dag, r.trace);
        std::size_t total = drops.violations.size() + top.violations.size() +
                            structural.violations.size();
        std::cerr << "trace checks: " << total << " violations\n";
        for (const auto* rep : {&drops, &top, &structural})
          write_violations(std::cerr, *rep);
        if (total > 0) return 1;
      }
      return 0;
    }

    if (*sweep_span || *sweep_procs || *compare) {
      auto scheds = *compare ? parse_schedulers("lcws,cws")
                             : parse_schedulers(schedulers);
      std::vector<std::uint32_t> depth_values =
          *sweep_procs ? std::vector<std::uint32_t>{depth}
                       : parse_range(depths_arg);
      std::vector<std::uint32_t> proc_values;
      if (*sweep_procs)
        for (const auto& p : split_csv(procs_list))
          proc_values.push_back(static_cast<std::uint32_t>(std::stoul(p)));
      else
        proc_values.push_back(procs);

      std::vector<SweepItem> items;
      for (std::uint32_t d : depth_values)
        for (std::uint32_t sd = 0; sd < seeds; ++sd)
          for (std::uint32_t p : proc_values)
            for (SchedulerKind k : scheds)
              items.push_back(
                  {DagSpec{parse_kind(kind), d, lambda, sd}, p, k, sd});
      std::vector<RunRow> rows = sweep(items);
      OutStream out(out_path);
      write_csv(*out.os, rows);
      if (*compare) {
        // lcws/cws total-sync ratio per (depth, procs), from the same rows
        for (std::uint32_t d : depth_values)
          for (std::uint32_t p : proc_values) {
            double totals[2] = {0, 0};
            for (const auto& r : rows)
              if (r.item.dag.depth == d && r.item.procs == p)
                totals[r.item.scheduler == SchedulerKind::cws] +=
                    double(r.metrics.sync_total());
            double ratio = totals[1] == 0 ? 0 : totals[0] / totals[1];
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "# ratio,%s,%u,%u,lcws/cws=%.6g", kind.c_str(), d,
                          p, ratio);
            *out.os << buf << '\n';
          }
      }
      return 0;
    }

    if (*exec) {
      DagSpec spec{parse_kind(kind), depth, lambda, seed};
      CompDag dag = generate(spec);
      ExecutorConfig cfg;
      cfg.workers = workers;
      cfg.seed = seed;
      ExecutionReport rep = execute_dag_parallel(dag, cfg);
      SyncEvents total = rep.sync_total();
      std::cout << "nodes " << rep.nodes_executed << " t1 " << dag.t1()
                << " notifications " << rep.notifications << " cas "
                << total.cas_attempts << " fences " << total.fences
                << " join_updates " << rep.join_updates << " checksum "
                << rep.checksum << " wall_s " << rep.wall_seconds << '\n';
      return rep.nodes_executed == dag.t1() ? 0 : 1;
    }

    if (*verify) {
      std::vector<SuiteResult> suites;
      if (suite == "all") {
        suites = run_all_suites();
      } else if (suite == "deque") {
        suites.push_back(verify_deque_suite(100000, 1));
      } else if (suite == "semantics") {
        suites.push_back(verify_semantics_suite(500, 500, 2));
      } else if (suite == "lemmas") {
        if (*verify_depth || *verify_procs) {
          std::vector<LemmaGridItem> grid{
              {DagSpec{parse_kind(kind), depth, lambda, 0}, procs, seeds}};
          suites.push_back(verify_lemma_suite(grid));
        } else {
          suites.push_back(verify_lemma_suite(default_lemma_grid()));
        }
      } else if (suite == "serial") {
        suites.push_back(verify_serial_sync_suite());
      } else if (suite == "ratio") {
        suites.push_back(verify_span_ratio_suite(5));
      } else if (suite == "scaling") {
        suites.push_back(verify_idle_scaling_suite(16, {5, 10, 15, 20}, 20));
      } else if (suite == "ballsbins") {
        suites.push_back(verify_balls_bins_suite(10000, 3));
      } else if (suite == "phase") {
        suites.push_back(verify_phase_suite(10, 8, 50));
      } else if (suite == "executor") {
        suites.push_back(verify_executor_suite(100));
      } else {
        std::cerr << "unknown suite: " << suite << '\n';
        return 2;
      }
      return print_suites(suites);
    }

    if (*check) {
      std::ifstream in(history_file);
      if (!in.good()) {
        std::cerr << "cannot open " << history_file << '\n';
        return 2;
      }
      History h = read_history(in);
      if (!is_good(h))
        std::cout << "note: owner methods overlap (not a good set)\n";
      CheckResult r = check_relaxed(h);
      switch (r.verdict) {
        case Verdict::valid:
          std::cout << "valid\n";
          return 0;
        case Verdict::invalid:
          std::cout << "counterexample: " << r.detail << '\n';
          return 1;
        case Verdict::too_large:
          std::cout << "too-large: " << r.detail << '\n';
          return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
