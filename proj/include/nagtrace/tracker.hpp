#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "nagtrace/polysys.hpp"

namespace nagtrace {

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

struct TrackerConfig {
  double initial_step = 0.1;
  double min_step = 1e-7;
  double newton_tol = 1e-10;
  int max_newton_iters = 10;
  double divergence_norm = 1e8;
  int max_steps = 10000;

  void validate() const;
};

/// H(z, t) = (1 - t) * gamma * start(z) + t * target(z), t running from 0 to 1.
///
/// The two systems share variables. Rows may outnumber unknowns as long as the
/// equations stay consistent along the path; Newton steps then use least squares.
class Homotopy {
 public:
  Homotopy(PolySystem start, PolySystem target, Complex gamma);

  const PolySystem& start() const { return start_; }
  const PolySystem& target() const { return target_; }
  Complex gamma() const { return gamma_; }
  int num_variables() const { return start_.num_variables(); }
  int num_equations() const { return start_.num_polynomials(); }

  void evaluate(const Point& z, double t, CVector& h, CMatrix& hz, CVector& ht) const;
  CVector value(const Point& z, double t) const;

 private:
  PolySystem start_;
  PolySystem target_;
  Complex gamma_;
};

enum class PathStatus { Success, Diverged, Failed };

const char* to_string(PathStatus s);

struct PathResult {
  PathStatus status = PathStatus::Failed;
  Point endpoint;
  int steps_taken = 0;
  double final_residual = 0.0;
};

/// Continues `start` from t = 0 to t = 1: fourth-order Runge-Kutta prediction on
/// dz/dt = -Hz^{-1} Ht, Newton correction, step halving on failure and doubling
/// after five consecutive successes.
PathResult track_path(const Homotopy& h, const Point& start, const TrackerConfig& cfg = {});

/// Newton polishing on F (square or consistent overdetermined) until max |F| < tol.
Point refine(const PolySystem& system, const Point& p, double tol, int max_iters = 10);

/// Solves J dz = -f; square systems use LU with partial pivoting, taller ones least squares.
/// Throws SingularJacobian when the reciprocal condition estimate is below 1e-12.
CVector newton_step(const CMatrix& jac, const CVector& f);

double max_norm(const CVector& v);

struct StartSystem {
  PolySystem system;
  std::vector<Point> solutions;
  std::int64_t bezout = 0;
};

/// Start system matching the degree pattern of square `target`: x_i^{d_i} - 1 for a
/// single group, otherwise products of random affine forms (linear-product start system).
StartSystem make_start_system(const PolySystem& target, std::mt19937_64& rng);

struct SolveReport {
  std::vector<Point> points;  // deduplicated finite endpoints, start-index order
  std::vector<PathResult> paths;
  std::int64_t bezout = 0;
  int successes = 0;
  int diverged = 0;
  int failed = 0;
  Complex gamma;
};

/// Tracks every start solution to the square `system`; `threads` <= 0 means hardware concurrency.
SolveReport solve_square(const PolySystem& system, const TrackerConfig& cfg, std::uint64_t seed, int threads = 1);

/// Tracks a batch of start points through one homotopy, results in input order.
std::vector<PathResult> track_all(const Homotopy& h, const std::vector<Point>& starts, const TrackerConfig& cfg,
                                  int threads = 1);

/// Removes points within `tol` (max norm) of an earlier point.
std::vector<Point> deduplicate(const std::vector<Point>& points, double tol = 1e-6);

/// Generator for one named stream of a user seed, so operations sharing a seed draw unrelated values.
std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream);

Complex random_unit(std::mt19937_64& rng);
Complex random_gaussian(std::mt19937_64& rng);

}  // namespace nagtrace
