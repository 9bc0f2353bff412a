// Experiment driver and result emission. run_matrix executes the
// experiment grid (baseline plus both replay variants over the replay
// intervals), each cell with N seeded replications; emit_outputs writes
// the CSV files and the manifest. All numeric output is fixed at six
// significant digits with stable column order, so identical inputs
// produce byte-identical files.

#ifndef RPLSIM_REPORT_HPP
#define RPLSIM_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rplsim/config.hpp"
#include "rplsim/detect.hpp"
#include "rplsim/engine.hpp"
#include "rplsim/metrics.hpp"

namespace rplsim {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt6(*v) : "nan";
}

// --------------------------------------------------------------- grid

struct CellSpec {
  std::string scenario;  // "baseline", "non_spoofed_2s", ...
  AttackVariant variant = AttackVariant::NONE;
  double interval_s = 0.0;  // 0 for the baseline row (interval plays no role)
};

struct RunResult {
  bool ok = false;
  bool topology_error = false;
  std::string error;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  std::vector<FlagRecord> flags;
};

struct CellResult {
  CellSpec cell;
  std::vector<RunResult> runs;
  SampleStats pdr;
  SampleStats app_pdr;
  SampleStats ae2ed_s;
  SampleStats apc_mw;
};

struct MatrixOptions {
  bool full_grid = false;
  bool baseline_only = false;
  bool detector_on = true;
  int threads = 1;
};

inline std::string cell_name(AttackVariant v, double interval_s) {
  if (v == AttackVariant::NONE) return "baseline";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%gs", to_string(v), interval_s);
  return buf;
}

inline std::vector<CellSpec> grid_cells(const ScenarioConfig& base, const MatrixOptions& opt) {
  std::vector<CellSpec> cells;
  if (opt.baseline_only) {
    cells.push_back({"baseline", AttackVariant::NONE, 0.0});
    return cells;
  }
  if (!opt.full_grid) {
    const AttackVariant v = base.attack_variant;
    const double i = v == AttackVariant::NONE ? 0.0 : base.replay_interval_s;
    cells.push_back({cell_name(v, base.replay_interval_s), v, i});
    return cells;
  }
  cells.push_back({"baseline", AttackVariant::NONE, 0.0});
  for (AttackVariant v : {AttackVariant::NON_SPOOFED, AttackVariant::SPOOFED}) {
    for (double i : {1.0, 2.0, 3.0, 4.0}) {
      cells.push_back({cell_name(v, i), v, i});
    }
  }
  return cells;
}

// Execute every cell of the grid; a failing cell reports its error and
// does not abort the others.
inline std::vector<CellResult> run_matrix(const ScenarioConfig& base, const MatrixOptions& opt) {
  const auto cells = grid_cells(base, opt);
  std::vector<CellResult> results(cells.size());
  struct Job {
    std::size_t cell;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    results[c].cell = cells[c];
    results[c].runs.resize(static_cast<std::size_t>(base.replications));
    for (int r = 0; r < base.replications; ++r) jobs.push_back({c, r});
  }
  const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t j = static_cast<std::size_t>(w); j < jobs.size();
           j += static_cast<std::size_t>(nthreads)) {
        const Job job = jobs[j];
        RunResult& slot = results[job.cell].runs[static_cast<std::size_t>(job.rep)];
        ScenarioConfig c = base;
        c.attack_variant = results[job.cell].cell.variant;
        if (c.attack_variant != AttackVariant::NONE) {
          c.replay_interval_s = results[job.cell].cell.interval_s;
        }
        c.seed = base.seed + static_cast<std::uint64_t>(job.rep);
        slot.seed = c.seed;
        try {
          const Trace tr = run(c);
          slot.metrics = metrics_from_trace(tr);
          if (opt.detector_on) {
            slot.flags = monitor(
                tr, static_cast<std::int64_t>(base.detector_window_s * 1e6 + 0.5),
                base.detector_fence_k);
          }
          slot.ok = true;
        } catch (const TopologyError& e) {
          slot.ok = false;
          slot.topology_error = true;
          slot.error = e.what();
        } catch (const std::exception& e) {
          slot.ok = false;
          slot.error = e.what();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& cell : results) {
    std::vector<double> pdr, app, ae2, apc;
    for (const auto& r : cell.runs) {
      if (!r.ok) continue;
      if (r.metrics.pdr) pdr.push_back(*r.metrics.pdr);
      if (r.metrics.app_pdr) app.push_back(*r.metrics.app_pdr);
      if (r.metrics.ae2ed_s) ae2.push_back(*r.metrics.ae2ed_s);
      apc.push_back(r.metrics.apc_mw);
    }
    cell.pdr = sample_stats(pdr);
    cell.app_pdr = sample_stats(app);
    cell.ae2ed_s = sample_stats(ae2);
    cell.apc_mw = sample_stats(apc);
  }
  return results;
}

// ------------------------------------------------------------- output

namespace report_detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace report_detail

inline void emit_outputs(const std::vector<CellResult>& results, const RunManifest& manifest,
                         const std::string& out_dir, bool detector_on) {
  if (results.empty()) throw IoError("emit_outputs: no results to write");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  std::string summary = "scenario,variant,interval_s,seed,pdr,app_pdr,ae2ed_s,apc_mw\n";
  std::string ci =
      "scenario,variant,interval_s,n,pdr_mean,pdr_ci95,app_pdr_mean,app_pdr_ci95,"
      "ae2ed_mean_s,ae2ed_ci95_s,apc_mean_mw,apc_ci95_mw\n";
  std::string power = "variant,interval_s,seed,node_id,bin_start_s,cpu_mw,lpm_mw,tx_mw,rx_mw\n";
  std::string flags = "variant,interval_s,seed,window_start_s,observer_id,flagged_id,count,fence\n";
  std::string errors;

  for (const auto& cell : results) {
    const std::string vname = to_string(cell.cell.variant);
    const std::string ival = fmt6(cell.cell.interval_s);
    for (const auto& run : cell.runs) {
      if (!run.ok) {
        errors += cell.cell.scenario + "," + std::to_string(run.seed) + "," + run.error + "\n";
        continue;
      }
      summary += cell.cell.scenario + "," + vname + "," + ival + "," +
                 std::to_string(run.seed) + "," + fmt_opt(run.metrics.pdr) + "," +
                 fmt_opt(run.metrics.app_pdr) + "," + fmt_opt(run.metrics.ae2ed_s) + "," +
                 fmt6(run.metrics.apc_mw) + "\n";
      for (const auto& row : run.metrics.per_node_series) {
        power += vname + "," + ival + "," + std::to_string(run.seed) + "," +
                 std::to_string(row.node) + "," +
                 fmt6(static_cast<double>(row.bin_start_us) * 1e-6) + "," +
                 fmt6(row.cpu_mw) + "," + fmt6(row.lpm_mw) + "," + fmt6(row.tx_mw) + "," +
                 fmt6(row.rx_mw) + "\n";
      }
      for (const auto& fr : run.flags) {
        flags += vname + "," + ival + "," + std::to_string(run.seed) + "," +
                 fmt6(static_cast<double>(fr.window_start_us) * 1e-6) + "," +
                 std::to_string(fr.observer) + "," + std::to_string(fr.flagged) + "," +
                 std::to_string(fr.count) + "," + fmt6(fr.fence) + "\n";
      }
    }
    ci += cell.cell.scenario + "," + vname + "," + ival + "," +
          std::to_string(cell.apc_mw.n) + "," + fmt_opt(cell.pdr.mean) + "," +
          fmt_opt(cell.pdr.ci95_half) + "," + fmt_opt(cell.app_pdr.mean) + "," +
          fmt_opt(cell.app_pdr.ci95_half) + "," + fmt_opt(cell.ae2ed_s.mean) + "," +
          fmt_opt(cell.ae2ed_s.ci95_half) + "," + fmt_opt(cell.apc_mw.mean) + "," +
          fmt_opt(cell.apc_mw.ci95_half) + "\n";
  }

  const fs::path dir(out_dir);
  report_detail::write_file(dir / "summary.csv", summary);
  report_detail::write_file(dir / "summary_ci.csv", ci);
  report_detail::write_file(dir / "node_power.csv", power);
  if (detector_on) report_detail::write_file(dir / "detector_flags.csv", flags);
  report_detail::write_file(dir / "manifest.txt", manifest_text(manifest));
  if (!errors.empty()) {
    report_detail::write_file(dir / "errors.csv", "scenario,seed,error\n" + errors);
  }
}

}  // namespace rplsim

#endif  // RPLSIM_REPORT_HPP
