// Command-line front end: verify | average | fluct | fig1 | scan | classify.
// Exit codes: 0 success, 1 verification failure, 2 invalid arguments.
#include <qbf/harness.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qbf;

struct CommonFlags {
  Index dB = 2;
  Index dA = 2;
  double alpha1 = 1.0;
  double sum_sq = 1.0;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string mode = "analytic";
  std::string out;  // empty -> stdout
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--dB", f.dB, "battery dimension");
  cmd->add_option("--dA", f.dA, "auxiliary dimension");
  cmd->add_option("--alpha1", f.alpha1, "battery purity in [1/dB, 1]");
  cmd->add_option("--sum-sq", f.sum_sq,
                  "sum of squared Hamiltonian basis coefficients");
  cmd->add_option("--samples", f.samples, "Monte Carlo draws");
  cmd->add_option("--seed", f.seed, "base RNG seed");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--mode", f.mode, "computation mode")
      ->check(CLI::IsMember({"analytic", "mc", "both"}));
  cmd->add_option("--out", f.out, "output file (default: stdout)");
  cmd->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::map<std::string, std::string> config_map(const CommonFlags& f) {
  return {
      {"dB", std::to_string(f.dB)},
      {"dA", std::to_string(f.dA)},
      {"alpha1", format_g17(f.alpha1)},
      {"sum_sq", format_g17(f.sum_sq)},
      {"samples", std::to_string(f.samples)},
      {"seed", std::to_string(f.seed)},
      {"threads", std::to_string(f.threads)},
      {"mode", f.mode},
      {"format", f.format},
  };
}

// Text reports honor --out too; structured results go through emit().
std::ostream& open_sink(const std::string& out, std::ofstream& file) {
  if (out.empty()) return std::cout;
  file.open(out);
  require(static_cast<bool>(file), "cannot open output file");
  return file;
}

void emit(const ScanResult& r, RunManifest m, const CommonFlags& f,
          std::chrono::steady_clock::time_point t0) {
  m.timestamp_utc = utc_timestamp();
  m.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  std::ostringstream buf;
  if (f.format == "json")
    write_json(r, m, buf);
  else
    write_csv(r, buf);
  std::ofstream file;
  open_sink(f.out, file) << buf.str();
}

// Single-point result for `average` / `fluct`, reusing the scan emitters.
ScanPoint one_point(const CommonFlags& f, RunMode mode, bool fluctuation) {
  ScanPoint p;
  p.axis = static_cast<double>(f.dB);
  const FluctuationInputs in{f.dB, f.dA, f.alpha1, f.sum_sq};
  BatterySpec battery;
  if (mode != RunMode::Analytic || !fluctuation)
    battery = make_scan_battery(f.dB, f.alpha1, f.sum_sq, derive_seed(f.seed, 3));
  if (mode != RunMode::Mc) {
    if (fluctuation) {
      p.cells[class_index(ProcessClass::Unitary)].analytic = fluct_unitary(in);
      p.cells[class_index(ProcessClass::Cptp)].analytic =
          fluct_cptp_fixed_dA(in);
      p.cells[class_index(ProcessClass::General)].analytic =
          fluct_general_fixed_dA(in);
    } else {
      // The mean extractable energy is class-independent.
      const double avg = avg_extractable_energy(battery);
      for (ProcessClass cls : kAllClasses)
        p.cells[class_index(cls)].analytic = avg;
    }
  }
  if (mode != RunMode::Analytic) {
    const Index rank = static_cast<Index>(
        std::ceil(1.0 / std::clamp(f.alpha1, 1e-12, 1.0) - 1e-9));
    for (ProcessClass cls : kAllClasses) {
      if (cls != ProcessClass::Unitary && f.dA < 2) continue;
      // Purification of the battery needs an ancilla at least as large as
      // the battery rank.
      if (cls == ProcessClass::General && f.dA < rank) continue;
      McConfig cfg;
      cfg.battery = battery;
      cfg.process = cls;
      cfg.dA = f.dA;
      cfg.samples = f.samples;
      cfg.seed = derive_seed(f.seed, 8 + class_index(cls));
      const MomentEstimate est = estimate(cfg, f.threads);
      auto& cell = p.cells[class_index(cls)];
      cell.mc = fluctuation ? est.variance() : est.mean();
      cell.se = fluctuation ? est.se_variance() : est.se_mean();
    }
  }
  return p;
}

int run(int argc, char** argv) {
  CLI::App app{"finite-dimensional battery energetics under random processes"};
  app.require_subcommand(1);

  // verify
  CommonFlags vf;
  vf.samples = 100000;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run the self-check suite (exact and statistical)");
  add_common(verify_cmd, vf);

  // average
  CommonFlags af;
  CLI::App* average_cmd = app.add_subcommand(
      "average", "mean extractable energy of a seeded battery");
  add_common(average_cmd, af);

  // fluct
  CommonFlags ff;
  CLI::App* fluct_cmd = app.add_subcommand(
      "fluct", "extractable-energy fluctuation for the three process classes");
  add_common(fluct_cmd, ff);

  // fig1
  CommonFlags gf;
  gf.samples = 20000;
  CLI::App* fig1_cmd = app.add_subcommand(
      "fig1", "fluctuations vs dimension for randomly drawn batteries");
  Index d_min = 2, d_max = 101, mc_max_d = 24;
  std::int64_t min_samples = 64;
  std::string fig1_battery = "pure";
  fig1_cmd->add_option("--d-min", d_min, "smallest dimension");
  fig1_cmd->add_option("--d-max", d_max, "largest dimension");
  fig1_cmd->add_option("--battery", fig1_battery, "battery state protocol")
      ->check(CLI::IsMember({"pure", "hs-mixed"}));
  fig1_cmd->add_option("--mc-max-d", mc_max_d, "largest dimension sampled by MC");
  fig1_cmd->add_option("--min-samples", min_samples, "MC draw floor per point");
  add_common(fig1_cmd, gf);

  // scan
  CommonFlags sf;
  CLI::App* scan_cmd = app.add_subcommand(
      "scan", "sweep one axis and fit the decay exponents");
  std::string axis_name;
  Index scan_min = 2, scan_max = 16, scan_step = 1;
  bool geometric = false;
  double fit_drop = 0.2;
  scan_cmd->add_option("--axis", axis_name, "scan axis: dA, dB, or n")
      ->required()
      ->check(CLI::IsMember({"dA", "dB", "n"}));
  scan_cmd->add_option("--min", scan_min, "first axis value");
  scan_cmd->add_option("--max", scan_max, "last axis value");
  scan_cmd->add_option("--step", scan_step,
                       "axis increment (multiplier with --geometric)");
  scan_cmd->add_flag("--geometric", geometric,
                     "multiply by --step instead of adding it");
  scan_cmd->add_option("--fit-drop", fit_drop,
                       "fraction of smallest axis values excluded from fits");
  add_common(scan_cmd, sf);

  // classify
  CommonFlags cf;
  CLI::App* classify_cmd = app.add_subcommand(
      "classify", "order the three fluctuations at one parameter point");
  add_common(classify_cmd, cf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();

  if (app.got_subcommand(verify_cmd)) {
    const VerifyReport rep = verify_suite(vf.seed, vf.samples);
    std::ofstream file;
    print_verify_report(rep, open_sink(vf.out, file));
    return rep.ok() ? 0 : 1;
  }

  if (app.got_subcommand(average_cmd) || app.got_subcommand(fluct_cmd)) {
    const bool fluctuation = app.got_subcommand(fluct_cmd);
    const CommonFlags& f = fluctuation ? ff : af;
    const RunMode mode = parse_run_mode(f.mode);
    ScanResult r;
    r.axis_name = "dB";
    r.mode = mode;
    r.points.push_back(one_point(f, mode, fluctuation));
    RunManifest m;
    m.command = fluctuation ? "fluct" : "average";
    m.config = config_map(f);
    m.seed = f.seed;
    emit(r, std::move(m), f, t0);
    return 0;
  }

  if (app.got_subcommand(fig1_cmd)) {
    Fig1Options opt;
    opt.d_min = d_min;
    opt.d_max = d_max;
    if (fig1_cmd->count("--alpha1") > 0) {
      opt.battery = Fig1Battery::FixedPurity;
      opt.alpha1 = gf.alpha1;
    } else {
      opt.battery = fig1_battery == "hs-mixed" ? Fig1Battery::HsMixed
                                               : Fig1Battery::Pure;
    }
    opt.mode = parse_run_mode(gf.mode);
    opt.samples = gf.samples;
    opt.min_samples = min_samples;
    opt.mc_max_d = mc_max_d;
    opt.seed = gf.seed;
    opt.threads = gf.threads;
    const ScanResult r = run_fig1(opt);
    RunManifest m;
    m.command = "fig1";
    m.config = config_map(gf);
    m.config["d_min"] = std::to_string(d_min);
    m.config["d_max"] = std::to_string(d_max);
    m.config["battery"] = opt.battery == Fig1Battery::FixedPurity
                              ? "fixed-purity"
                              : fig1_battery;
    m.config["mc_max_d"] = std::to_string(mc_max_d);
    m.config["min_samples"] = std::to_string(min_samples);
    m.seed = gf.seed;
    emit(r, std::move(m), gf, t0);
    return 0;
  }

  if (app.got_subcommand(scan_cmd)) {
    ScanOptions opt;
    opt.axis = parse_scan_axis(axis_name);
    require(scan_min <= scan_max, "scan: need min <= max");
    if (geometric) {
      require(scan_step >= 2, "scan: geometric step must be >= 2");
      for (Index v = scan_min; v <= scan_max; v *= scan_step)
        opt.grid.push_back(v);
    } else {
      require(scan_step >= 1, "scan: step must be >= 1");
      for (Index v = scan_min; v <= scan_max; v += scan_step)
        opt.grid.push_back(v);
    }
    opt.dB = sf.dB;
    opt.dA = sf.dA;
    opt.alpha1 = sf.alpha1;
    opt.sum_sq = sf.sum_sq;
    opt.mode = parse_run_mode(sf.mode);
    opt.samples = sf.samples;
    opt.seed = sf.seed;
    opt.fit_drop_fraction = fit_drop;
    opt.threads = sf.threads;
    const ScanResult r = scan(opt);
    RunManifest m;
    m.command = "scan";
    m.config = config_map(sf);
    m.config["axis"] = axis_name;
    m.config["min"] = std::to_string(scan_min);
    m.config["max"] = std::to_string(scan_max);
    m.config["step"] = std::to_string(scan_step);
    m.config["geometric"] = geometric ? "true" : "false";
    m.config["fit_drop"] = format_g17(fit_drop);
    m.seed = sf.seed;
    emit(r, std::move(m), sf, t0);
    return 0;
  }

  // classify
  const ClassifyReport rep = classify_point(cf.dB, cf.dA, cf.alpha1);
  std::ofstream file;
  print_classify_report(rep, open_sink(cf.out, file));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
