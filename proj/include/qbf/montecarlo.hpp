#pragma once
// Streaming Monte-Carlo estimation of the mean and variance of extracted
// energy per process class, with standard errors and a deterministic
// substream decomposition that makes results independent of worker count.

#include <qbf/battery.hpp>

#include <cstdint>

namespace qbf {

// Single-pass central-moment accumulator through the fourth moment, with an
// exact pairwise merge.  Accumulating substreams separately and merging in a
// fixed order keeps the final estimate bitwise independent of parallelism.
class MomentEstimate {
 public:
  void add(double x);
  void merge(const MomentEstimate& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }  // sum (x - mean)^2
  double m3() const { return m3_; }  // sum (x - mean)^3
  double m4() const { return m4_; }  // sum (x - mean)^4
  double variance() const;           // population variance m2 / count
  double se_mean() const;            // sqrt(variance / count)
  // Large-sample (kurtosis-aware) standard error of the variance estimate:
  // sqrt((m4/n - (m2/n)^2) / n).
  double se_variance() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

MomentEstimate merge(MomentEstimate a, const MomentEstimate& b);

// One Monte-Carlo run: which battery, which process class, how many draws,
// and how the draw sequence is keyed.  Substream k of a run reproduces its
// draws from RandomStream(seed, k) alone, so any worker may own any chunk.
struct McConfig {
  BatterySpec battery;
  ProcessClass process = ProcessClass::Unitary;
  Index dA = 0;               // auxiliary dimension; ignored for Unitary
  std::int64_t samples = 1;
  std::uint64_t seed = 0;
  std::int64_t chunk = 4096;  // draws per substream (replay granularity)
  // Test hook: replace the drawn unitary with the identity and return the
  // difference of two evaluations of the same realization — every sample is
  // exactly 0.0, which pins down the do-nothing limit of the whole pipeline.
  bool identity_hook = false;
};

// One realization: Unitary draws U_B ~ Haar(dB); Cptp draws rho_A ~
// HS(dA, dA) then U_BA ~ Haar(dB*dA); General purifies the battery state
// (deterministic, consumes no randomness) then draws U_BA ~ Haar(dB*dA).
// The draw order is part of the replay contract.
ProcessRealization draw_process(const McConfig& cfg, RandomStream& rng);

// One extracted-energy draw.
double sample_one(const McConfig& cfg, RandomStream& rng);

// Replays draw `index` (0-based) of the run exactly as estimate() sees it.
double sample_at(const McConfig& cfg, std::int64_t index);

// Streaming moments over cfg.samples draws partitioned into substreams of
// cfg.chunk; bitwise identical for any thread count >= 1.
MomentEstimate estimate(const McConfig& cfg, int threads = 1);

}  // namespace qbf
