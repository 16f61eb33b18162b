#include <qbf/harness.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace qbf {

namespace {

constexpr const char* kCsvHeader =
    "axis,value_unitary,value_cptp,value_general,se_unitary,se_cptp,"
    "se_general,mode";

double parse_double_field(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  require(end == begin + s.size() && !s.empty(), "csv: malformed number");
  return v;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// Smallest rank that can host the requested purity: ceil(1/alpha1).
Index purity_rank(double alpha1) {
  return std::max<Index>(
      Index{1}, static_cast<Index>(std::ceil(1.0 / alpha1 - 1e-9)));
}

// Run `job(i)` for i in [0, n); with threads > 1 the jobs are distributed
// over a bounded pool.  Jobs write only to their own slot, so scheduling
// never affects results.
void for_each_index(std::size_t n, int threads,
                    const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  const std::size_t workers = std::min(static_cast<std::size_t>(threads), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Attach per-class log-log fits over the fit window (the smallest
// drop_fraction of axis values excluded).  Points without a usable value
// (absent, nonpositive) are skipped; a fit needs >= 3 usable points.
void attach_fits(ScanResult& r, double drop_fraction) {
  const std::size_t n = r.points.size();
  const std::size_t drop =
      static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(n)));
  if (n == 0 || drop >= n) return;
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> xs, ys;
    for (std::size_t i = drop; i < n; ++i) {
      const auto v = r.points[i].cells[c].column();
      if (!v || *v <= 0.0 || r.points[i].axis <= 0.0) continue;
      xs.push_back(std::log(r.points[i].axis));
      ys.push_back(std::log(*v));
    }
    if (xs.size() >= 3) r.fits[c] = ols_fit(xs, ys);
  }
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// z-score with a guard for degenerate (zero-variance) accumulators.
double z_score(double observed, double target, double se) {
  const double dev = std::abs(observed - target);
  if (dev == 0.0) return 0.0;
  return dev / std::max(se, 1e-300);
}

nlohmann::ordered_json fit_json(const std::optional<FitResult>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}};
}

}  // namespace

RunMode parse_run_mode(const std::string& s) {
  if (s == "analytic") return RunMode::Analytic;
  if (s == "mc") return RunMode::Mc;
  if (s == "both") return RunMode::Both;
  throw std::invalid_argument("mode must be one of: analytic, mc, both");
}

ScanAxis parse_scan_axis(const std::string& s) {
  if (s == "dA") return ScanAxis::AuxDim;
  if (s == "dB") return ScanAxis::BatteryDim;
  if (s == "n") return ScanAxis::MaxAuxDim;
  throw std::invalid_argument("axis must be one of: dA, dB, n");
}

FitResult ols_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "ols_fit: size mismatch");
  require(x.size() >= 2, "ols_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) xbar += x[i], ybar += y[i];
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - xbar, dy = y[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, "ols_fit: degenerate abscissa");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

DensityMatrix make_purity_state(Index d, double alpha1, RandomStream& rng) {
  require(d >= 1, "purity state: dimension must be positive");
  const double lo = 1.0 / static_cast<double>(d);
  require(alpha1 >= lo - 1e-9 && alpha1 <= 1.0 + 1e-9,
          "purity state: alpha1 must lie in [1/d, 1]");
  const double a1 = std::clamp(alpha1, lo, 1.0);
  const Index r = std::min(purity_rank(a1), d);
  Matrix rho = Matrix::Zero(d, d);
  if (r == 1) {
    rho(0, 0) = 1.0;
  } else {
    const double rr = static_cast<double>(r);
    const double t =
        std::sqrt(std::max(0.0, (a1 - 1.0 / rr) / (1.0 - 1.0 / rr)));
    for (Index k = 0; k < r; ++k) rho(k, k) = (1.0 - t) / rr;
    rho(0, 0) += t;
  }
  const Matrix v = haar_unitary(d, rng);
  return make_density(v * rho * v.adjoint());
}

BatterySpec make_scan_battery(Index dB, double alpha1, double sum_sq,
                              std::uint64_t seed) {
  require(dB >= 2, "scan battery: dB must be at least 2");
  require(sum_sq >= 0.0, "scan battery: sum_sq must be nonnegative");
  RandomStream rng(seed, 0);
  DensityMatrix state = make_purity_state(dB, alpha1, rng);
  HamiltonianCoeffs c;
  c.a0 = 0.0;
  c.a = Eigen::VectorXd::Zero(dB * dB - 1);
  c.a(dB * dB - 2) = std::sqrt(sum_sq);
  return make_battery(std::move(state), c);
}

ScanResult scan(const ScanOptions& opt) {
  require(!opt.grid.empty(), "scan: empty grid");
  for (std::size_t i = 0; i + 1 < opt.grid.size(); ++i)
    require(opt.grid[i] < opt.grid[i + 1], "scan: grid must be strictly ascending");
  require(opt.samples >= 1, "scan: samples must be at least 1");
  require(opt.threads >= 1, "scan: threads must be at least 1");
  require(opt.fit_drop_fraction >= 0.0 && opt.fit_drop_fraction < 1.0,
          "scan: fit drop fraction must lie in [0, 1)");

  ScanResult r;
  r.axis_name = to_string(opt.axis);
  r.mode = opt.mode;
  r.points.resize(opt.grid.size());

  if (opt.axis == ScanAxis::MaxAuxDim) {
    require(opt.mode == RunMode::Analytic,
            "scan: axis n averages over auxiliary dimensions analytically; "
            "mc mode is not defined for it");
    require(opt.grid.front() >= 1, "scan: axis n requires n >= 1");
    for (std::size_t i = 0; i < opt.grid.size(); ++i) {
      const Index n = opt.grid[i];
      ScanPoint& p = r.points[i];
      p.axis = static_cast<double>(n);
      p.cells[class_index(ProcessClass::Cptp)].analytic =
          finite_n_avg(ProcessClass::Cptp, n, opt.dB, opt.alpha1, opt.sum_sq).value;
      p.cells[class_index(ProcessClass::General)].analytic =
          finite_n_avg(ProcessClass::General, n, opt.dB, opt.alpha1, opt.sum_sq).value;
    }
    attach_fits(r, opt.fit_drop_fraction);
    // Logarithmic-correction diagnostic: value*n against ln n.
    {
      const std::size_t n = r.points.size();
      const std::size_t drop = static_cast<std::size_t>(
          std::floor(opt.fit_drop_fraction * static_cast<double>(n)));
      std::vector<double> xs, ys;
      for (std::size_t i = drop; i < n; ++i) {
        const auto v = r.points[i].cells[class_index(ProcessClass::General)].column();
        if (!v) continue;
        xs.push_back(std::log(r.points[i].axis));
        ys.push_back(*v * r.points[i].axis);
      }
      if (xs.size() >= 3) r.general_log_fit = ols_fit(xs, ys);
    }
    return r;
  }

  require(opt.grid.front() >= 2, "scan: dimension grids start at 2");
  const bool axis_is_dB = opt.axis == ScanAxis::BatteryDim;
  const Index min_dB = axis_is_dB ? opt.grid.front() : opt.dB;
  require(opt.alpha1 >= 1.0 / static_cast<double>(min_dB) - 1e-9 &&
              opt.alpha1 <= 1.0 + 1e-9,
          "scan: alpha1 must lie in [1/dB, 1] for every grid point");
  if (!axis_is_dB)
    require(opt.dB >= 2, "scan: dB must be at least 2");
  else
    require(opt.dA >= 2, "scan: dA must be at least 2");

  const Index rank_needed = purity_rank(std::clamp(opt.alpha1, 1e-12, 1.0));
  // A dA-axis scan uses one battery for the whole sweep.
  BatterySpec shared_battery;
  if (opt.mode != RunMode::Analytic && !axis_is_dB)
    shared_battery =
        make_scan_battery(opt.dB, opt.alpha1, opt.sum_sq, derive_seed(opt.seed, 3));

  auto compute_point = [&](std::size_t i) {
    const Index v = opt.grid[i];
    const Index dB = axis_is_dB ? v : opt.dB;
    const Index dA = axis_is_dB ? opt.dA : v;
    ScanPoint p;
    p.axis = static_cast<double>(v);
    const FluctuationInputs in{dB, dA, opt.alpha1, opt.sum_sq};
    if (opt.mode != RunMode::Mc) {
      p.cells[class_index(ProcessClass::Unitary)].analytic = fluct_unitary(in);
      p.cells[class_index(ProcessClass::Cptp)].analytic = fluct_cptp_fixed_dA(in);
      p.cells[class_index(ProcessClass::General)].analytic =
          fluct_general_fixed_dA(in);
    }
    if (opt.mode != RunMode::Analytic) {
      const BatterySpec battery =
          axis_is_dB ? make_scan_battery(dB, opt.alpha1, opt.sum_sq,
                                         derive_seed(opt.seed,
                                                     static_cast<std::uint64_t>(v) * 4 + 3))
                     : shared_battery;
      for (ProcessClass cls : kAllClasses) {
        // The purification-based class is undefined below the battery rank.
        if (cls == ProcessClass::General && dA < rank_needed) continue;
        McConfig cfg;
        cfg.battery = battery;
        cfg.process = cls;
        cfg.dA = dA;
        cfg.samples = opt.samples;
        cfg.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(v) * 4 +
                                             class_index(cls));
        const MomentEstimate est = estimate(cfg, 1);
        p.cells[class_index(cls)].mc = est.variance();
        p.cells[class_index(cls)].se = est.se_variance();
      }
    }
    r.points[i] = std::move(p);
  };

  for_each_index(r.points.size(),
                 opt.mode == RunMode::Analytic ? 1 : opt.threads, compute_point);
  attach_fits(r, opt.fit_drop_fraction);
  return r;
}

ScanResult run_fig1(const Fig1Options& opt) {
  require(opt.d_min >= 2 && opt.d_min <= opt.d_max,
          "fig1: need 2 <= d_min <= d_max");
  require(opt.samples >= 1 && opt.min_samples >= 1,
          "fig1: sample budgets must be positive");
  require(opt.threads >= 1, "fig1: threads must be at least 1");
  if (opt.battery == Fig1Battery::FixedPurity)
    require(opt.alpha1 >= 1.0 / static_cast<double>(opt.d_min) - 1e-9 &&
                opt.alpha1 <= 1.0 + 1e-9,
            "fig1: alpha1 must lie in [1/d_min, 1]");

  ScanResult r;
  r.axis_name = "d";
  r.mode = opt.mode;
  r.points.resize(static_cast<std::size_t>(opt.d_max - opt.d_min + 1));

  auto compute_point = [&](std::size_t i) {
    const Index d = opt.d_min + static_cast<Index>(i);
    const std::uint64_t tag = static_cast<std::uint64_t>(d) * 8;
    RandomStream rng(derive_seed(opt.seed, tag), 0);
    const HamiltonianCoeffs h = random_hamiltonian_fig1(d, rng);
    DensityMatrix state;
    switch (opt.battery) {
      case Fig1Battery::Pure: state = random_pure_state(d, rng); break;
      case Fig1Battery::HsMixed: state = hs_density(d, d, rng); break;
      case Fig1Battery::FixedPurity:
        state = make_purity_state(d, opt.alpha1, rng);
        break;
    }
    BatterySpec b = make_battery(std::move(state), h);
    const double a1 =
        std::clamp(b.alpha1(), 1.0 / static_cast<double>(d), 1.0);
    const FluctuationInputs in{d, d, a1, b.sum_sq()};

    ScanPoint p;
    p.axis = static_cast<double>(d);
    // Analytic curves are always computed; MC (when enabled and affordable)
    // sits alongside for the agreement check.
    p.cells[class_index(ProcessClass::Unitary)].analytic = fluct_unitary(in);
    p.cells[class_index(ProcessClass::Cptp)].analytic = fluct_cptp_fixed_dA(in);
    p.cells[class_index(ProcessClass::General)].analytic =
        fluct_general_fixed_dA(in);

    if (opt.mode != RunMode::Analytic && d <= opt.mc_max_d) {
      const double taper = std::pow(2.0 / static_cast<double>(d), 6);
      const std::int64_t n_d = std::clamp(
          static_cast<std::int64_t>(std::llround(
              static_cast<double>(opt.samples) * taper)),
          opt.min_samples, opt.samples);
      for (ProcessClass cls : kAllClasses) {
        McConfig cfg;
        cfg.battery = b;
        cfg.process = cls;
        cfg.dA = d;
        cfg.samples = n_d;
        cfg.seed = derive_seed(opt.seed, tag + 1 + class_index(cls));
        const MomentEstimate est = estimate(cfg, 1);
        p.cells[class_index(cls)].mc = est.variance();
        p.cells[class_index(cls)].se = est.se_variance();
      }
    }
    r.points[i] = std::move(p);
  };

  for_each_index(r.points.size(),
                 opt.mode == RunMode::Analytic ? 1 : opt.threads, compute_point);
  attach_fits(r, 0.2);
  return r;
}

ClassifyReport classify_point(Index dB, Index dA, double alpha1) {
  const FluctuationInputs in{dB, dA, alpha1, 1.0};
  ClassifyReport rep;
  rep.dB = dB;
  rep.dA = dA;
  rep.alpha1 = alpha1;
  rep.unitary = fluct_unitary(in);
  rep.cptp = fluct_cptp_fixed_dA(in);
  rep.general = fluct_general_fixed_dA(in);
  rep.ordering = classify_ordering_values(rep.unitary, rep.cptp, rep.general);
  rep.general_exceeds_unitary = cond_general_exceeds_unitary(dB, dA, alpha1);
  try {
    rep.unitary_exceeds_cptp = cond_unitary_exceeds_cptp(dB, dA, alpha1);
  } catch (const std::domain_error&) {
    rep.unitary_exceeds_cptp = std::nullopt;
  }
  return rep;
}

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifyReport verify_suite(std::uint64_t seed, std::int64_t samples) {
  require(samples >= 100, "verify: samples must be at least 100");
  VerifyReport rep;
  auto push = [&](std::string name, double dev, double tol) {
    rep.checks.push_back(VerifyCheck{std::move(name), dev, tol, dev <= tol});
  };

  // Permutation algebra on the swap operator.  Products of two 0/1
  // permutation matrices are exact; conjugations and traces go through
  // general matrix kernels and get an epsilon-scale allowance.
  {
    RandomStream rng(derive_seed(seed, 1), 0);
    const Index d1 = 3, d2 = 4;
    const Matrix a = ginibre(d1, d1, rng);
    const Matrix b = ginibre(d2, d2, rng);
    const Matrix s = swap_operator(d1, d2);
    push("swap conjugation exchanges tensor factors (3x4)",
         max_abs_diff(s * kron(a, b) * s.adjoint(), kron(b, a)), 1e-13);
    push("swapping forward and back is the identity (3x4)",
         max_abs_diff(swap_operator(d2, d1) * s,
                      Matrix::Identity(d1 * d2, d1 * d2)),
         0.0);
    const Matrix s3 = swap_operator(d1, d1);
    push("square swap is an involution (3x3)",
         max_abs_diff(s3 * s3, Matrix::Identity(d1 * d1, d1 * d1)), 0.0);
    const Matrix b3 = ginibre(d1, d1, rng);
    const std::complex<double> tdiff =
        (s3 * kron(a, b3)).trace() - (a * b3).trace();
    push("swap-contracted product trace equals the operator product trace "
         "(3x3)",
         std::abs(tdiff), 1e-12);
  }

  // Deterministic factorization of the doubled-system marginal.
  {
    RandomStream rng(derive_seed(seed, 2), 0);
    const Index dB = 2, dA = 3;
    const Matrix u = haar_unitary(dB * dA, rng);
    const DensityMatrix joint = hs_density(dB * dA, dB * dA, rng);
    const Matrix x = u * joint.mat * u.adjoint();
    const Matrix marginal = partial_trace(x, SubsystemDims{dB, dA}, {0});
    push("doubled-system marginal factorizes into a product",
         frobenius_distance(kron(marginal, marginal),
                            partial_trace(kron(x, x),
                                          SubsystemDims{dB, dA, dB, dA}, {0, 2})),
         1e-10);
  }

  // Second-moment normalization table: the direct Gamma sum reproduces the
  // closed form exactly for every square case up to dimension 8.
  for (Index d = 2; d <= 8; ++d) {
    const double direct = trace_J2(d, d, TraceJ2Method::Direct);
    const double closed = trace_J2(d, d, TraceJ2Method::Closed);
    push("second-moment normalization d=" + std::to_string(d) +
             " direct == closed == " + std::to_string(static_cast<long long>(closed)),
         std::abs(direct - closed), 0.0);
  }

  // Statistical: first and second Haar moments at d = 2 and 3.
  for (Index d : {Index{2}, Index{3}}) {
    RandomStream rng(derive_seed(seed, 16 + static_cast<std::uint64_t>(d)), 0);
    const DensityMatrix rho = hs_density(d, d, rng);
    std::vector<MomentEstimate> re(static_cast<std::size_t>(d * d));
    std::vector<MomentEstimate> im(static_cast<std::size_t>(d * d));
    MomentEstimate tr2, first_entry;
    for (std::int64_t k = 0; k < samples; ++k) {
      const Matrix u = haar_unitary(d, rng);
      const Matrix after = u * rho.mat * u.adjoint();
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
          re[static_cast<std::size_t>(i * d + j)].add(after(i, j).real());
          im[static_cast<std::size_t>(i * d + j)].add(after(i, j).imag());
        }
      tr2.add(std::norm(u.trace()));
      first_entry.add(std::norm(u(0, 0)));
    }
    double zmax = 0.0;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        const double re_target = i == j ? 1.0 / static_cast<double>(d) : 0.0;
        const auto& mre = re[static_cast<std::size_t>(i * d + j)];
        const auto& mim = im[static_cast<std::size_t>(i * d + j)];
        zmax = std::max(zmax, z_score(mre.mean(), re_target, mre.se_mean()));
        zmax = std::max(zmax, z_score(mim.mean(), 0.0, mim.se_mean()));
      }
    const std::string suffix = " (d=" + std::to_string(d) + ")";
    push("first-moment twirl flattens a fixed state" + suffix, zmax, 5.0);
    push("squared-trace moment of a random unitary is 1" + suffix,
         z_score(tr2.mean(), 1.0, tr2.se_mean()), 5.0);
    push("squared first entry of a random unitary is 1/d" + suffix,
         z_score(first_entry.mean(), 1.0 / static_cast<double>(d),
                 first_entry.se_mean()),
         5.0);
  }

  // Statistical: mean purity of the induced measure.
  {
    const std::pair<Index, Index> combos[] = {{2, 2}, {3, 3}, {2, 4}};
    std::uint64_t tag = 32;
    for (const auto& [dA, dC] : combos) {
      RandomStream rng(derive_seed(seed, tag++), 0);
      MomentEstimate purity;
      for (std::int64_t k = 0; k < samples; ++k)
        purity.add(hs_density(dA, dC, rng).purity());
      push("mean purity of the induced ensemble (" + std::to_string(dA) + "," +
               std::to_string(dC) + ")",
           z_score(purity.mean(), avg_purity_hs(dA, dC), purity.se_mean()), 5.0);
    }
  }

  // Pipeline-level: the average evolved battery marginal is maximally mixed.
  {
    McConfig cfg;
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.9;
    rho(1, 1) = 0.1;
    HamiltonianCoeffs hc;
    hc.a0 = 0.0;
    hc.a = Eigen::VectorXd::Zero(3);
    hc.a(2) = 1.0;
    cfg.battery = make_battery(make_density(std::move(rho)), hc);
    cfg.process = ProcessClass::Unitary;
    RandomStream rng(derive_seed(seed, 48), 0);
    std::vector<MomentEstimate> re(4), im(4);
    for (std::int64_t k = 0; k < samples; ++k) {
      ProcessRealization p = draw_process(cfg, rng);
      const Matrix after = reduced_after(cfg.battery, p);
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
          re[static_cast<std::size_t>(i * 2 + j)].add(after(i, j).real());
          im[static_cast<std::size_t>(i * 2 + j)].add(after(i, j).imag());
        }
    }
    double zmax = 0.0;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        const double target = i == j ? 0.5 : 0.0;
        const auto& mre = re[static_cast<std::size_t>(i * 2 + j)];
        const auto& mim = im[static_cast<std::size_t>(i * 2 + j)];
        zmax = std::max(zmax, z_score(mre.mean(), target, mre.se_mean()));
        zmax = std::max(zmax, z_score(mim.mean(), 0.0, mim.se_mean()));
      }
    push("mean evolved battery marginal is maximally mixed", zmax, 5.0);
  }

  // Pipeline-level: sampled fluctuation matches the closed form.
  {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    HamiltonianCoeffs hc;
    hc.a0 = 0.0;
    hc.a = Eigen::VectorXd::Zero(3);
    hc.a(2) = 1.0;
    McConfig cfg;
    cfg.battery = make_battery(make_density(std::move(rho)), hc);
    cfg.process = ProcessClass::Unitary;
    cfg.samples = samples;
    cfg.seed = derive_seed(seed, 49);
    const MomentEstimate est = estimate(cfg, 1);
    push("sampled unitary fluctuation matches the closed form",
         z_score(est.variance(), fluct_unitary({2, 0, 1.0, 1.0}),
                 est.se_variance()),
         4.0);
  }

  return rep;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

void write_csv(const ScanResult& r, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& p : r.points) {
    os << format_g17(p.axis);
    for (std::size_t c = 0; c < 3; ++c) {
      os << ',';
      if (const auto v = p.cells[c].column()) os << format_g17(*v);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      os << ',';
      if (p.cells[c].se) os << format_g17(*p.cells[c].se);
    }
    os << ',' << to_string(r.mode) << '\n';
  }
}

ScanResult read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kCsvHeader, "csv: unexpected header");
  ScanResult r;
  r.axis_name = "axis";
  bool first_row = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_row(line);
    require(f.size() == 8, "csv: row must have 8 fields");
    ScanPoint p;
    p.axis = parse_double_field(f[0]);
    const RunMode mode = parse_run_mode(f[7]);
    if (first_row) {
      r.mode = mode;
      first_row = false;
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (!f[1 + c].empty()) {
        const double v = parse_double_field(f[1 + c]);
        if (mode == RunMode::Mc)
          p.cells[c].mc = v;
        else
          p.cells[c].analytic = v;
      }
      if (!f[4 + c].empty()) p.cells[c].se = parse_double_field(f[4 + c]);
    }
    r.points.push_back(std::move(p));
  }
  return r;
}

void write_json(const ScanResult& r, const RunManifest& m, std::ostream& os) {
  nlohmann::ordered_json j;
  j["manifest"] = {{"tool_version", m.tool_version},
                   {"command", m.command},
                   {"config", m.config},
                   {"seed", m.seed},
                   {"timestamp_utc", m.timestamp_utc},
                   {"wall_ms", m.wall_ms}};
  j["axis"] = r.axis_name;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  static constexpr const char* kKeys[3] = {"unitary", "cptp", "general"};
  for (const auto& p : r.points) {
    nlohmann::ordered_json o;
    o["axis"] = p.axis;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& cell = p.cells[c];
      const auto v = cell.column();
      o[std::string("value_") + kKeys[c]] =
          v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
      if (cell.analytic && cell.mc)
        o[std::string("mc_") + kKeys[c]] = *cell.mc;
      o[std::string("se_") + kKeys[c]] =
          cell.se ? nlohmann::ordered_json(*cell.se)
                  : nlohmann::ordered_json(nullptr);
    }
    o["mode"] = to_string(r.mode);
    pts.push_back(std::move(o));
  }
  j["points"] = std::move(pts);

  std::optional<FitResult> primary;
  for (std::size_t c : {std::size_t{2}, std::size_t{1}, std::size_t{0}})
    if (r.fits[c]) {
      primary = r.fits[c];
      break;
    }
  j["fit"] = fit_json(primary);
  nlohmann::ordered_json fits;
  for (std::size_t c = 0; c < 3; ++c) fits[kKeys[c]] = fit_json(r.fits[c]);
  fits["general_log"] = fit_json(r.general_log_fit);
  j["fits"] = std::move(fits);
  os << j.dump(2) << '\n';
}

void print_verify_report(const VerifyReport& r, std::ostream& os) {
  int failed = 0;
  for (const auto& c : r.checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
       << " (deviation=" << format_g17(c.deviation)
       << ", tolerance=" << format_g17(c.tolerance) << ")\n";
    if (!c.pass) ++failed;
  }
  if (failed == 0)
    os << "verification: all " << r.checks.size() << " checks passed\n";
  else
    os << "verification: " << failed << " of " << r.checks.size()
       << " checks FAILED\n";
}

void print_classify_report(const ClassifyReport& r, std::ostream& os) {
  os << "dB=" << r.dB << " dA=" << r.dA << " alpha1=" << format_g17(r.alpha1)
     << '\n';
  os << "fluct_unitary=" << format_g17(r.unitary) << '\n';
  os << "fluct_cptp=" << format_g17(r.cptp) << '\n';
  os << "fluct_general=" << format_g17(r.general) << '\n';
  os << "ordering=" << to_string(r.ordering) << '\n';
  os << "general_exceeds_unitary="
     << (r.general_exceeds_unitary ? "true" : "false") << '\n';
  os << "unitary_exceeds_cptp=";
  if (r.unitary_exceeds_cptp)
    os << (*r.unitary_exceeds_cptp ? "true" : "false");
  else
    os << "out-of-regime";
  os << '\n';
}

}  // namespace qbf
