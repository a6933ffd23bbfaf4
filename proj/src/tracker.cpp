#include "nagtrace/tracker.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace nagtrace {

namespace {

// Corrector limits while tracking; the endpoint is polished separately with cfg.newton_tol.
constexpr int kCorrectorIters = 3;
constexpr double kCorrectorTol = 1e-9;
constexpr double kMaxFirstCorrection = 1e-2;
constexpr int kStreakToGrow = 5;
constexpr double kGrowthToDiverge = 1e3;

bool finite(const CVector& v) { return v.allFinite(); }

CVector tangent(const Homotopy& h, const Point& z, double t) {
  CVector val, ht;
  CMatrix hz;
  h.evaluate(z, t, val, hz, ht);
  return newton_step(hz, ht);  // solves Hz dz = -Ht
}

bool predict_correct(const Homotopy& h, const Point& z, double t, double dt, Point& out) {
  try {
    const CVector k1 = tangent(h, z, t);
    const CVector k2 = tangent(h, z + 0.5 * dt * k1, t + 0.5 * dt);
    const CVector k3 = tangent(h, z + 0.5 * dt * k2, t + 0.5 * dt);
    const CVector k4 = tangent(h, z + dt * k3, t + dt);
    Point w = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(w)) return false;

    const double t1 = t + dt;
    double prev = 0.0;
    for (int k = 0; k < kCorrectorIters; ++k) {
      CVector val, ht;
      CMatrix hz;
      h.evaluate(w, t1, val, hz, ht);
      const CVector delta = newton_step(hz, val);
      const double size = max_norm(delta);
      const double scale = 1.0 + max_norm(w);
      if (k == 0 && size > kMaxFirstCorrection * scale) return false;
      if (k > 0 && size > 0.5 * prev && size > kCorrectorTol * scale) return false;
      w += delta;
      if (!finite(w)) return false;
      if (size < kCorrectorTol * scale) {
        out = std::move(w);
        return true;
      }
      prev = size;
    }
    return false;
  } catch (const SingularJacobian&) {
    return false;
  }
}

std::uint64_t next_u53(std::mt19937_64& rng) { return rng() >> 11; }

}  // namespace

void TrackerConfig::validate() const {
  if (!(initial_step > 0 && min_step > 0 && newton_tol > 0 && divergence_norm > 0) || max_newton_iters <= 0 ||
      max_steps <= 0)
    throw Error("tracker configuration values must be positive");
  if (!(min_step < initial_step)) throw Error("tracker configuration needs min_step < initial_step");
}

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Success: return "success";
    case PathStatus::Diverged: return "diverged";
    case PathStatus::Failed: return "failed";
  }
  return "unknown";
}

Homotopy::Homotopy(PolySystem start, PolySystem target, Complex gamma)
    : start_(std::move(start)), target_(std::move(target)), gamma_(gamma) {
  if (start_.num_variables() != target_.num_variables() || start_.num_polynomials() != target_.num_polynomials())
    throw DimensionMismatch("homotopy start and target systems differ in shape");
  if (start_.num_polynomials() < start_.num_variables())
    throw DimensionMismatch("homotopy has fewer equations than unknowns");
  if (std::abs(std::abs(gamma_) - 1.0) > 1e-12) throw Error("homotopy gamma must have unit modulus");
}

void Homotopy::evaluate(const Point& z, double t, CVector& h, CMatrix& hz, CVector& ht) const {
  CVector gv, fv;
  CMatrix gj, fj;
  start_.evaluate_with_jacobian(z, gv, gj);
  target_.evaluate_with_jacobian(z, fv, fj);
  const Complex a = (1.0 - t) * gamma_;
  h = a * gv + t * fv;
  hz = a * gj + t * fj;
  ht = fv - gamma_ * gv;
}

CVector Homotopy::value(const Point& z, double t) const {
  return (1.0 - t) * gamma_ * start_.evaluate(z) + t * target_.evaluate(z);
}

double max_norm(const CVector& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

CVector newton_step(const CMatrix& jac, const CVector& f) {
  if (jac.rows() < jac.cols()) throw DimensionMismatch("Newton step on an underdetermined system");
  // Row equilibration: equations of very different degree have wildly different scales far from
  // the origin, which would otherwise make a regular Jacobian look singular.
  Eigen::VectorXd scale(jac.rows());
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    const double m = jac.row(i).cwiseAbs().maxCoeff();
    scale[i] = m > 0.0 ? 1.0 / m : 1.0;
  }
  const CMatrix a = scale.cast<Complex>().asDiagonal() * jac;
  const CVector b = scale.cast<Complex>().asDiagonal() * f;
  if (jac.rows() == jac.cols()) {
    Eigen::PartialPivLU<CMatrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc >= 1e-12)) throw SingularJacobian("Jacobian is numerically singular");
    return lu.solve(-b);
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(a);
  const auto& r = qr.matrixR();
  const double big = std::abs(r(0, 0));
  const double small = std::abs(r(jac.cols() - 1, jac.cols() - 1));
  if (!(big > 0) || !(small >= 1e-12 * big)) throw SingularJacobian("Jacobian is numerically rank deficient");
  return qr.solve(-b);
}

Point refine(const PolySystem& system, const Point& p, double tol, int max_iters) {
  Point z = p;
  CVector val;
  CMatrix jac;
  for (int k = 0; k <= max_iters; ++k) {
    system.evaluate_with_jacobian(z, val, jac);
    if (max_norm(val) < tol) return z;
    if (k == max_iters) break;
    const CVector dz = newton_step(jac, val);
    z += dz;
    if (!finite(z)) break;
    // Large points cannot reach an absolute residual; a relative step at roundoff level counts.
    if (max_norm(dz) < tol * (1.0 + max_norm(z))) return z;
  }
  throw NoConvergence("Newton refinement did not reach tolerance");
}

// Newton on H(., t) until the residual or the relative correction reaches newton_tol.
static bool polish(const Homotopy& h, Point& z, double t, const TrackerConfig& cfg) {
  CVector val, ht;
  CMatrix hz;
  try {
    for (int k = 0; k <= cfg.max_newton_iters; ++k) {
      h.evaluate(z, t, val, hz, ht);
      if (max_norm(val) < cfg.newton_tol) return true;
      if (k == cfg.max_newton_iters) return false;
      const CVector dz = newton_step(hz, val);
      z += dz;
      if (!finite(z)) return false;
      if (max_norm(dz) < cfg.newton_tol * (1.0 + max_norm(z))) return true;
    }
  } catch (const SingularJacobian&) {
  }
  return false;
}

PathResult track_path(const Homotopy& h, const Point& start, const TrackerConfig& cfg) {
  cfg.validate();
  PathResult result;
  if (start.size() != h.num_variables()) throw DimensionMismatch("start point does not match the homotopy");

  // A path that gives up far beyond where it started is heading to infinity: near a solution at
  // infinity the chart Jacobian degenerates long before |z| reaches divergence_norm.
  const double start_norm = max_norm(start);
  auto fail_status = [&](const Point& z) {
    const double n = max_norm(z);
    return n > std::sqrt(cfg.divergence_norm) || n > kGrowthToDiverge * (1.0 + start_norm) ? PathStatus::Diverged
                                                                                             : PathStatus::Failed;
  };

  Point z = start;
  if (!polish(h, z, 0.0, cfg)) {
    result.status = PathStatus::Failed;
    result.endpoint = start;
    result.final_residual = max_norm(h.value(start, 0.0));
    return result;
  }

  double t = 0.0;
  double step = cfg.initial_step;
  int streak = 0;
  while (t < 1.0) {
    if (result.steps_taken >= cfg.max_steps) {
      result.status = fail_status(z);
      result.endpoint = z;
      result.final_residual = max_norm(h.value(z, t));
      return result;
    }
    const bool last = step >= 1.0 - t;
    const double dt = last ? 1.0 - t : step;
    Point next;
    ++result.steps_taken;
    if (predict_correct(h, z, t, dt, next)) {
      z = std::move(next);
      t = last ? 1.0 : t + dt;
      if (++streak >= kStreakToGrow) {
        step = std::min(2.0 * step, cfg.initial_step);
        streak = 0;
      }
      if (max_norm(z) > cfg.divergence_norm) {
        result.status = PathStatus::Diverged;
        result.endpoint = z;
        result.final_residual = max_norm(h.value(z, t));
        return result;
      }
    } else {
      streak = 0;
      step = 0.5 * std::min(step, dt);
      if (step < cfg.min_step) {
        result.status = fail_status(z);
        result.endpoint = z;
        result.final_residual = max_norm(h.value(z, t));
        return result;
      }
    }
  }

  const bool converged = polish(h, z, 1.0, cfg);
  result.endpoint = z;
  result.final_residual = max_norm(h.value(z, 1.0));
  result.status = converged && finite(z) ? PathStatus::Success : fail_status(z);
  return result;
}

std::vector<PathResult> track_all(const Homotopy& h, const std::vector<Point>& starts, const TrackerConfig& cfg,
                                  int threads) {
  std::vector<PathResult> out(starts.size());
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(starts.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) out[i] = track_path(h, starts[i], cfg);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int k = 0; k < threads; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < starts.size(); i = next++) out[i] = track_path(h, starts[i], cfg);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

std::vector<Point> deduplicate(const std::vector<Point>& points, double tol) {
  std::vector<Point> out;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : out) {
      if (max_norm(p - q) <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

SolveReport solve_square(const PolySystem& system, const TrackerConfig& cfg, std::uint64_t seed, int threads) {
  if (system.num_polynomials() != system.num_variables())
    throw DimensionMismatch("solve_square needs as many polynomials as variables");
  std::mt19937_64 rng = make_rng(seed, "solve_square");
  SolveReport report;
  report.gamma = random_unit(rng);
  StartSystem start = make_start_system(system, rng);
  report.bezout = start.bezout;
  Homotopy h(start.system, system, report.gamma);
  report.paths = track_all(h, start.solutions, cfg, threads);
  std::vector<Point> finite_points;
  for (const auto& r : report.paths) {
    switch (r.status) {
      case PathStatus::Success:
        ++report.successes;
        finite_points.push_back(r.endpoint);
        break;
      case PathStatus::Diverged: ++report.diverged; break;
      case PathStatus::Failed: ++report.failed; break;
    }
  }
  report.points = deduplicate(finite_points);
  return report;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : stream) h = (h ^ c) * 1099511628211ull;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

Complex random_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(next_u53(rng)) * 0x1.0p-53;
  const double theta = 2.0 * M_PI * u;
  return {std::cos(theta), std::sin(theta)};
}

Complex random_gaussian(std::mt19937_64& rng) {
  // Box-Muller on 53-bit uniforms; std::normal_distribution differs between standard libraries.
  double u1 = 0.0;
  while (u1 == 0.0) u1 = static_cast<double>(next_u53(rng)) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u53(rng)) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1)) * M_SQRT1_2;
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

}  // namespace nagtrace
