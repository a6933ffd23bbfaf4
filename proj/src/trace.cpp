#include "nagtrace/trace.hpp"

#include <numeric>

namespace nagtrace {

namespace {

LinearForm shifted(const LinearForm& f, const Slice& s, Complex amount) {
  const auto& chart = s.charts.at(f.group);
  if (chart) return f + *chart * amount;
  LinearForm r = f;
  r.constant += amount;
  return r;
}

}  // namespace

Slice Pencil::at(Complex tau) const {
  if (static_cast<int>(direction.size()) != base.num_moving())
    throw DimensionMismatch("pencil direction needs one entry per moving slice equation");
  Slice s = base;
  std::size_t k = 0;
  for (auto& group_forms : s.forms)
    for (auto& f : group_forms) f = shifted(f, base, tau * direction[k++]);
  if (s.merged) s.merged->second = shifted(s.merged->second, base, tau * direction[k++]);
  return s;
}

Pencil random_pencil(const Slice& base, std::mt19937_64& rng) {
  Pencil p{base, {}};
  double norm2 = 0.0;
  for (int k = 0; k < base.num_moving(); ++k) {
    p.direction.push_back(random_gaussian(rng));
    norm2 += std::norm(p.direction.back());
  }
  // Unit length: the second difference scales with |direction|^2, so this keeps residuals comparable.
  if (norm2 > 0.0)
    for (auto& d : p.direction) d /= std::sqrt(norm2);
  return p;
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<TraceSample> trace_samples(const WitnessSet& w, const std::vector<int>& subset, const Pencil& pencil,
                                       const std::vector<Complex>& taus, const TrackerConfig& cfg, int threads) {
  if (subset.empty()) throw Error("trace_samples: empty subset");
  for (std::size_t a = 0; a < taus.size(); ++a)
    for (std::size_t b = a + 1; b < taus.size(); ++b)
      if (taus[a] == taus[b]) throw Error("trace_samples: sample parameters must be distinct");
  WitnessSet sub{w.system, w.slice, {}};
  for (int i : subset) sub.points.push_back(w.points.at(i));

  std::vector<TraceSample> out;
  for (const Complex tau : taus) {
    const Slice target = pencil.at(tau);
    const WitnessSet moved = (tau == Complex(0.0) && target.approx_equal(w.slice)) ? sub : move_slice(sub, target, cfg, threads);
    TraceSample s{tau, CVector::Zero(w.system.num_variables()), static_cast<int>(moved.points.size())};
    for (const auto& p : moved.points) s.sum += p;
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<bool, double> collinearity_test(const std::vector<TraceSample>& samples, double tol) {
  if (samples.size() < 3) throw FewerThanThreeSamples("collinearity test needs three samples");
  const auto& s0 = samples[0];
  const auto& s1 = samples[1];
  const auto& s2 = samples[2];
  const Complex h1 = s1.tau - s0.tau, h2 = s2.tau - s1.tau;
  if (std::abs(h1 - h2) > 1e-12 * (std::abs(h1) + std::abs(h2)))
    throw Error("collinearity test needs equally spaced samples");
  double scale = 0.0;
  for (const auto* s : {&s0, &s1, &s2}) scale = std::max(scale, max_norm(s->sum));
  const double residual = max_norm(s0.sum - 2.0 * s1.sum + s2.sum) / (1.0 + scale);
  return {residual < tol, residual};
}

TraceLine fit_trace(const std::vector<TraceSample>& samples) {
  if (samples.size() < 2) throw Error("fitting a trace line needs two samples");
  TraceLine line;
  line.c0 = (samples[1].sum - samples[0].sum) / (samples[1].tau - samples[0].tau);
  line.c1 = samples[0].sum - line.c0 * samples[0].tau;
  return line;
}

TraceTestResult trace_test_on(const WitnessSet& w, const std::vector<int>& subset, const Pencil& pencil,
                              const std::vector<Complex>& taus, const TrackerConfig& cfg, double tol, int threads) {
  TraceTestResult r;
  r.samples = trace_samples(w, subset, pencil, taus, cfg, threads);
  std::tie(r.complete, r.residual) = collinearity_test(r.samples, tol);
  r.trace = fit_trace(r.samples);
  return r;
}

TraceTestResult trace_test(const WitnessSet& w, const std::vector<int>& subset, std::uint64_t seed,
                           const TrackerConfig& cfg, double tol, int threads) {
  std::mt19937_64 rng = make_rng(seed, "trace_test");
  constexpr int kAttempts = 3;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const Pencil pencil = random_pencil(w.slice, rng);
    const Complex unit = random_unit(rng);
    try {
      return trace_test_on(w, subset, pencil, {0.0, -1.0 * unit, -2.0 * unit}, cfg, tol, threads);
    } catch (const MoveFailure&) {
    }
  }
  throw GenericityFailure("trace test: path failures on " + std::to_string(kAttempts) + " random pencils");
}

}  // namespace nagtrace
