#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nagtrace/polysys.hpp"
#include "nagtrace/tracker.hpp"

namespace nagtrace {

class GenericityFailure : public Error {
 public:
  using Error::Error;
};

class MoveFailure : public Error {
 public:
  MoveFailure(const std::string& what, int index) : Error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class AmbiguousMatch : public Error {
 public:
  using Error::Error;
};

/// sum_k coeffs[k] * z_k + constant over the variables of one group.
struct LinearForm {
  int group = 0;
  std::vector<Complex> coeffs;
  Complex constant = 0.0;

  Polynomial to_polynomial(const PolySystem& system) const;
  Complex evaluate(const PolySystem& system, const Point& z) const;
  LinearForm operator+(const LinearForm& o) const;
  LinearForm operator*(Complex c) const;
};

/// g = h1 * second + first * h2 + h1 * h2, bilinear in the two groups and affine in the chart.
struct MergedForm {
  LinearForm first;   // group 0
  LinearForm second;  // group 1
};

/// The linear data cutting out a witness set: one chart form per homogeneous group
/// (equation h - 1 = 0), slice forms per group, and optionally a merged bilinear form.
struct Slice {
  std::vector<std::optional<LinearForm>> charts;
  std::vector<std::vector<LinearForm>> forms;
  std::optional<MergedForm> merged;

  std::vector<int> dims() const;
  /// Chart equations, then slice forms group by group, then the merged form.
  std::vector<Polynomial> equations(const PolySystem& system) const;
  /// Polynomial equal to 1 on the chart of group g (the chart form, or 1 for affine groups).
  Polynomial unit(const PolySystem& system, int g) const;
  /// Number of non-chart equations (slice forms plus the merged form).
  int num_moving() const;
  /// Straight-line interpolation (1 - s) * this + s * other of every coefficient.
  Slice lerp(const Slice& other, Complex s) const;
  bool same_shape(const Slice& other) const;
  bool approx_equal(const Slice& other, double tol = 0.0) const;
};

struct WitnessSet {
  PolySystem system;
  Slice slice;
  std::vector<Point> points;

  std::vector<int> dims() const { return slice.dims(); }
  std::size_t size() const { return points.size(); }
  /// System polynomials followed by the slice equations.
  PolySystem sliced_system() const;
  double residual(const Point& p) const;
};

struct Partition {
  std::vector<std::vector<int>> blocks;
  bool warning = false;
  int loops_run = 0;
  int loops_failed = 0;

  std::vector<int> block_sizes() const;
};

struct WitnessOptions {
  TrackerConfig tracker;
  int threads = 1;
  double membership_tol = 1e-8;
  double failure_fraction = 0.10;
};

/// Random chart (one per homogeneous group) and `count[g]` random forms per group.
Slice random_slice(const PolySystem& system, const std::vector<int>& count, std::mt19937_64& rng);
/// Same charts as `base`, fresh random forms of the same shape.
Slice rerandomize_forms(const Slice& base, const PolySystem& system, std::mt19937_64& rng);

/// Variety dimension implied by the system: declared, or unknowns - charts - polynomials.
int variety_dimension(const PolySystem& system);

/// Square polynomial system for solving `system` together with `slice`: the polynomials are
/// randomized down to the codimension (lower-degree rows padded with chart forms).
PolySystem square_sliced_system(const PolySystem& system, const Slice& slice, std::mt19937_64& rng);

/// All finite points of V(system) cut by `slice`, filtered against the full system.
WitnessSet witness_set_on(const PolySystem& system, const Slice& slice, std::uint64_t seed,
                          const WitnessOptions& opts = {});
WitnessSet witness_set(const PolySystem& system, const std::vector<int>& dims, std::uint64_t seed,
                       const WitnessOptions& opts = {});

/// Tracks every point along the straight segment from w.slice to target.
WitnessSet move_slice(const WitnessSet& w, const Slice& target, const TrackerConfig& cfg = {}, int threads = 1);

/// Matches `moved` back onto `origin`; result[i] is the origin index reached by moved[i].
std::vector<int> match_points(const std::vector<Point>& origin, const std::vector<Point>& moved, double tol = 1e-6);

/// Permutation induced by the closed loop w.slice -> waypoints... -> w.slice.
std::vector<int> monodromy_loop(const WitnessSet& w, const std::vector<Slice>& waypoints,
                                const TrackerConfig& cfg = {}, int threads = 1);

/// Union of orbits over random triangle loops; stops after `stable_window` loops without change.
Partition monodromy_partition(const WitnessSet& w, int budget, std::uint64_t seed, const TrackerConfig& cfg = {},
                              int threads = 1, int stable_window = 5);

}  // namespace nagtrace
