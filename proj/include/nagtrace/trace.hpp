#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nagtrace/witness.hpp"

namespace nagtrace {

class FewerThanThreeSamples : public Error {
 public:
  using Error::Error;
};

/// Parallel slices: every moving equation of `base` is shifted by tau * direction[k] times
/// the chart unit of its group (its constant term in the chart).
struct Pencil {
  Slice base;
  std::vector<Complex> direction;  // one entry per moving equation, in Slice::equations order

  Slice at(Complex tau) const;
};

struct TraceSample {
  Complex tau;
  CVector sum;
  int count = 0;
};

/// trace(tau) = c0 * tau + c1
struct TraceLine {
  CVector c0;
  CVector c1;

  CVector at(Complex tau) const { return c0 * tau + c1; }
};

struct TraceTestResult {
  bool complete = false;
  double residual = 0.0;
  TraceLine trace;
  std::vector<TraceSample> samples;
};

/// Pencil through `base` with a random complex direction of unit length.
Pencil random_pencil(const Slice& base, std::mt19937_64& rng);

/// Coordinate sums of the subset, tracked to each pencil slice; tau = 0 uses the points as given.
std::vector<TraceSample> trace_samples(const WitnessSet& w, const std::vector<int>& subset, const Pencil& pencil,
                                       const std::vector<Complex>& taus, const TrackerConfig& cfg = {},
                                       int threads = 1);

/// Second-difference test on three equally spaced samples:
/// max_k |s0 - 2 s1 + s2|_k / (1 + max |s|) < tol.
std::pair<bool, double> collinearity_test(const std::vector<TraceSample>& samples, double tol = 1e-6);

/// Line through the first two samples.
TraceLine fit_trace(const std::vector<TraceSample>& samples);

/// Random pencil, tau in {0, -1, -2} times a random unit complex, collinearity test.
TraceTestResult trace_test(const WitnessSet& w, const std::vector<int>& subset, std::uint64_t seed,
                           const TrackerConfig& cfg = {}, double tol = 1e-6, int threads = 1);

/// Same, on a caller-supplied pencil and taus.
TraceTestResult trace_test_on(const WitnessSet& w, const std::vector<int>& subset, const Pencil& pencil,
                              const std::vector<Complex>& taus, const TrackerConfig& cfg = {}, double tol = 1e-6,
                              int threads = 1);

std::vector<int> all_indices(std::size_t n);

}  // namespace nagtrace
