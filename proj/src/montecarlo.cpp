#include <qbf/montecarlo.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qbf {

namespace {

void validate(const McConfig& cfg) {
  require(cfg.samples >= 1, "mc config: samples must be at least 1");
  require(cfg.chunk >= 1, "mc config: chunk must be at least 1");
  if (cfg.process != ProcessClass::Unitary)
    require(cfg.dA >= 2, "mc config: dilated process classes need dA >= 2");
}

}  // namespace

void MomentEstimate::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n2 = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n2;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  // Update order matters: m4 and m3 consume the previous m3/m2.
  m4_ += term1 * delta_n2 * (n2 * n2 - 3.0 * n2 + 3.0) + 6.0 * delta_n2 * m2_ -
         4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n2 - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void MomentEstimate::merge(const MomentEstimate& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  const double delta2 = delta * delta;

  const double m2 = m2_ + other.m2_ + delta2 * na * nb / n;
  const double m3 = m3_ + other.m3_ +
                    delta * delta2 * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * other.m2_ - nb * m2_) / n;
  const double m4 =
      m4_ + other.m4_ +
      delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
      6.0 * delta2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
      4.0 * delta * (na * other.m3_ - nb * m3_) / n;

  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += other.n_;
}

double MomentEstimate::variance() const {
  return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0;
}

double MomentEstimate::se_mean() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double MomentEstimate::se_variance() const {
  if (n_ == 0) return 0.0;
  const double n = static_cast<double>(n_);
  const double v = m2_ / n;
  return std::sqrt(std::max(0.0, m4_ / n - v * v) / n);
}

MomentEstimate merge(MomentEstimate a, const MomentEstimate& b) {
  a.merge(b);
  return a;
}

ProcessRealization draw_process(const McConfig& cfg, RandomStream& rng) {
  ProcessRealization p;
  p.cls = cfg.process;
  const Index dB = cfg.battery.dim();
  switch (cfg.process) {
    case ProcessClass::Unitary:
      p.dA = 0;
      p.unitary = haar_unitary(dB, rng);
      return p;
    case ProcessClass::Cptp:
      p.dA = cfg.dA;
      p.aux_state = hs_density(cfg.dA, cfg.dA, rng);
      p.unitary = haar_unitary(dB * cfg.dA, rng);
      return p;
    case ProcessClass::General:
      p.dA = cfg.dA;
      p.joint_state = purify(cfg.battery.rho, cfg.dA);
      p.unitary = haar_unitary(dB * cfg.dA, rng);
      return p;
  }
  throw std::logic_error("draw_process: unknown process class");
}

double sample_one(const McConfig& cfg, RandomStream& rng) {
  ProcessRealization p = draw_process(cfg, rng);
  if (cfg.identity_hook) {
    p.unitary = Matrix::Identity(p.unitary.rows(), p.unitary.cols());
    const Matrix ref = reduced_after(cfg.battery, p);
    const Matrix same = reduced_after(cfg.battery, p);
    return ((ref - same) * cfg.battery.hamiltonian).trace().real();
  }
  return extracted_energy(cfg.battery, p);
}

double sample_at(const McConfig& cfg, std::int64_t index) {
  validate(cfg);
  require(index >= 0 && index < cfg.samples, "sample_at: index out of range");
  const std::int64_t k = index / cfg.chunk;
  RandomStream rng(cfg.seed, static_cast<std::uint64_t>(k));
  double x = 0.0;
  for (std::int64_t i = k * cfg.chunk; i <= index; ++i) x = sample_one(cfg, rng);
  return x;
}

MomentEstimate estimate(const McConfig& cfg, int threads) {
  validate(cfg);
  require(threads >= 1, "estimate: threads must be at least 1");

  const std::int64_t nsub = (cfg.samples + cfg.chunk - 1) / cfg.chunk;
  std::vector<MomentEstimate> parts(static_cast<std::size_t>(nsub));

  auto run_substream = [&](std::int64_t k) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    const std::int64_t count = std::min(cfg.chunk, cfg.samples - k * cfg.chunk);
    MomentEstimate acc;
    for (std::int64_t i = 0; i < count; ++i) acc.add(sample_one(cfg, rng));
    parts[static_cast<std::size_t>(k)] = acc;
  };

  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads, nsub));
  if (workers <= 1) {
    for (std::int64_t k = 0; k < nsub; ++k) run_substream(k);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::int64_t k = next.fetch_add(1); k < nsub;
               k = next.fetch_add(1))
            run_substream(k);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Merge in substream index order: the result is a pure function of
  // (cfg, chunk), never of scheduling.
  MomentEstimate total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace qbf
