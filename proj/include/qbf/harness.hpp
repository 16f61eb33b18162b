#pragma once
// Experiment runner: verification suite, figure reproduction over the battery
// dimension, parameter scans with log-log fits, regime classification, and
// CSV/JSON emission with a reproducibility manifest.

#include <qbf/analytic.hpp>
#include <qbf/montecarlo.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qbf {

inline constexpr const char* kToolVersion = "0.1.0";

enum class RunMode { Analytic, Mc, Both };

constexpr const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Analytic: return "analytic";
    case RunMode::Mc: return "mc";
    case RunMode::Both: return "both";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& s);   // throws std::invalid_argument
ScanAxis parse_scan_axis(const std::string& s); // "dA" | "dB" | "n"

constexpr std::size_t class_index(ProcessClass c) {
  return static_cast<std::size_t>(c);
}
inline constexpr std::array<ProcessClass, 3> kAllClasses = {
    ProcessClass::Unitary, ProcessClass::Cptp, ProcessClass::General};

// Ordinary least squares y ~ slope*x + intercept; r2 = 1 for a perfect fit
// (including the degenerate all-equal-y case).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
FitResult ols_fit(std::span<const double> x, std::span<const double> y);

// Per-class cell of one scan point.  Entries that do not apply (class not
// defined on the axis, MC not run or not runnable) stay empty and are emitted
// as empty CSV fields / JSON nulls, never as zeros.
struct ClassCell {
  std::optional<double> analytic;
  std::optional<double> mc;  // MC estimate of the same quantity
  std::optional<double> se;  // standard error of the MC estimate
  // The CSV value column: the analytic value when present, else the MC value.
  std::optional<double> column() const { return analytic ? analytic : mc; }
};

struct ScanPoint {
  double axis = 0.0;
  std::array<ClassCell, 3> cells;  // indexed by class_index
};

struct ScanResult {
  std::string axis_name;  // "dA" | "dB" | "n" | "d"
  RunMode mode = RunMode::Analytic;
  std::vector<ScanPoint> points;
  // Per-class OLS of log(value) vs log(axis) over the fit window; present
  // only when the window holds >= 3 usable points.
  std::array<std::optional<FitResult>, 3> fits;
  // Axis n only: value*n regressed against ln(n) — a straight line with
  // r2 ~ 1 is the signature of ln(n)/n decay.
  std::optional<FitResult> general_log_fit;
};

// Minimal-rank state with the requested purity: rank r = ceil(1/alpha1)
// levels mixed as t|0><0| + (1-t) I_r/r, Haar-rotated by the seeded stream.
// Minimal rank keeps the purification ancilla requirement at ceil(1/alpha1),
// so dilated-class sampling works for every dA >= that rank.
DensityMatrix make_purity_state(Index d, double alpha1, RandomStream& rng);

// Scan/CLI battery: make_purity_state plus a Hamiltonian with all weight on
// the last diagonal basis element, rescaled so that sum a_i^2 == sum_sq.
BatterySpec make_scan_battery(Index dB, double alpha1, double sum_sq,
                              std::uint64_t seed);

struct ScanOptions {
  ScanAxis axis = ScanAxis::AuxDim;
  std::vector<Index> grid;  // strictly ascending; >= 3 points for fits
  Index dB = 2;             // fixed battery dimension (axes dA and n)
  Index dA = 2;             // fixed auxiliary dimension (axis dB)
  double alpha1 = 1.0;
  double sum_sq = 1.0;
  RunMode mode = RunMode::Analytic;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  // Fit window: this fraction of the smallest axis values is excluded from
  // fits to suppress pre-asymptotic curvature.
  double fit_drop_fraction = 0.2;
  int threads = 1;
};
ScanResult scan(const ScanOptions& opt);

// Battery-state protocol for the figure runner.
enum class Fig1Battery {
  Pure,         // Haar-random pure state per d
  HsMixed,      // Hilbert-Schmidt random mixed state per d (purity ~ 2/d)
  FixedPurity,  // minimal-rank state with a caller-supplied purity
};

struct Fig1Options {
  Index d_min = 2;
  Index d_max = 101;
  Fig1Battery battery = Fig1Battery::Pure;
  double alpha1 = 1.0;  // FixedPurity only
  RunMode mode = RunMode::Analytic;
  // MC draw budget at d = 2; the per-point budget tapers as (2/d)^6 with a
  // floor, keeping the per-point cost roughly flat as dilation dims grow.
  std::int64_t samples = 20000;
  std::int64_t min_samples = 64;
  Index mc_max_d = 24;  // MC disabled above this dimension
  std::uint64_t seed = 1;
  int threads = 1;
};
// dB = dA = d sweep: per d, draw the figure-protocol Hamiltonian and battery
// state, then evaluate the three fluctuations analytically and (optionally,
// d <= mc_max_d) by MC.
ScanResult run_fig1(const Fig1Options& opt);

struct ClassifyReport {
  Index dB = 2;
  Index dA = 2;
  double alpha1 = 1.0;
  double unitary = 0.0;  // fluctuations per unit sum_sq
  double cptp = 0.0;
  double general = 0.0;
  FluctOrdering ordering = FluctOrdering::Degenerate;
  bool general_exceeds_unitary = false;
  // Empty when the regime condition's denominator is nonpositive.
  std::optional<bool> unitary_exceeds_cptp;
};
ClassifyReport classify_point(Index dB, Index dA, double alpha1);

struct VerifyCheck {
  std::string name;
  double deviation = 0.0;  // observed
  double tolerance = 0.0;  // allowed; pass iff deviation <= tolerance
  bool pass = false;
};
struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool ok() const;
};
// Deterministic operator identities exactly, statistical identities at the
// given sample budget (z-score tolerances).
VerifyReport verify_suite(std::uint64_t seed, std::int64_t samples);

// Everything needed to reproduce a run bit-for-bit with the same build.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::map<std::string, std::string> config;  // full flag echo
  std::uint64_t seed = 0;
  std::string timestamp_utc;
  double wall_ms = 0.0;
};

// Shortest decimal that parses back to the identical double (%.17g).
std::string format_g17(double v);
std::string utc_timestamp();
// Stable per-point/per-purpose seed derivation (splitmix64 of base ^ tag).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

// CSV schema: header
//   axis,value_unitary,value_cptp,value_general,se_unitary,se_cptp,se_general,mode
// one row per point, missing entries empty, 17-significant-digit values.
void write_csv(const ScanResult& r, std::ostream& os);
ScanResult read_csv(std::istream& is);  // throws std::invalid_argument

// JSON document: {manifest: {...}, points: [...], fit: {...}, fits: {...}}.
// `fit` carries the most informative per-class fit (General, else Cptp, else
// Unitary); `fits` holds all of them plus the axis-n log-correction fit.
void write_json(const ScanResult& r, const RunManifest& m, std::ostream& os);

void print_verify_report(const VerifyReport& r, std::ostream& os);
void print_classify_report(const ClassifyReport& r, std::ostream& os);

}  // namespace qbf
