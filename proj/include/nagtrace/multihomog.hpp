#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nagtrace/trace.hpp"
#include "nagtrace/witness.hpp"

namespace nagtrace {

class RankAmbiguous : public Error {
 public:
  using Error::Error;
};

class ProductCase : public Error {
 public:
  using Error::Error;
};

class MergeFailure : public Error {
 public:
  using Error::Error;
};

using Slot = std::pair<int, int>;  // (m1, m2): slice codimensions in the two factors

std::string slot_key(const Slot& s);
Slot parse_slot_key(const std::string& key);

/// d_{m1, m - m1} for m1 = 0..m.
struct MultiDegree {
  int m = 0;
  std::vector<std::int64_t> values;

  std::int64_t at(int m1, int m2) const;
};

/// Witness sets W_{m1,m2} for every m1 + m2 = m, sharing one system and one chart.
struct WitnessCollection {
  PolySystem system;
  int m = 0;
  std::map<Slot, WitnessSet> sets;

  std::size_t total_points() const;
};

enum class SurfaceTag { Product, FiberedOverFirst, FiberedOverSecond, General };

const char* to_string(SurfaceTag t);

struct SurfaceCase {
  SurfaceTag tag = SurfaceTag::General;
  std::pair<int, int> ranks;  // ranks of the tangent projections onto each factor
  int dimension = 0;          // local dimension of the variety at the probe
};

struct SurfaceReduction {
  PolySystem surface;
  std::vector<LinearForm> appended;
  std::optional<MultiDegree> expected;  // of the surface, m = 2
};

struct PairReport {
  Slot pair;  // the (m1, m2) slot; its partner is (m1 + 1, m2 - 1)
  int merged_count = 0;
  double residual = 0.0;
  bool passed = false;
  std::string error;
};

struct MTraceReport {
  bool complete = false;
  std::string branch;  // "product", "curves" or "empty"
  std::vector<PairReport> pairs;
  std::optional<SurfaceCase> surface;
  std::vector<double> projection_residuals;
  bool product_equality = false;
  std::string error;
};

/// One shared random chart and m random forms per group; slot (m1, m2) uses the first m_i.
WitnessCollection witness_collection(const PolySystem& system, int m, std::uint64_t seed,
                                     const WitnessOptions& opts = {});

MultiDegree multidegree(const WitnessCollection& coll);

/// d_{m1,m2}^2 >= d_{m1-1,m2+1} * d_{m1+1,m2-1} for 1 <= m1 <= m - 1.
bool check_log_concavity(const MultiDegree& md);

/// sum_{m1+m2=m} d_{m1,m2} * m! / (m1! m2!)
boost::multiprecision::cpp_int segre_degree(const MultiDegree& md);

/// Appends `forms` to `system` as polynomial equations.
PolySystem append_forms(const PolySystem& system, const std::vector<LinearForm>& forms);

/// Appends m1 - 1 and m2 - 1 random forms on the two groups (identity for curves).
SurfaceReduction reduce_to_surface(const PolySystem& system, const Slot& dims, std::uint64_t seed,
                                   const std::optional<MultiDegree>& known = std::nullopt);

/// Tangent space = numerical kernel of the Jacobian at the probe; reports the ranks of its
/// projections to each factor (Euler directions removed for homogeneous groups).
SurfaceCase classify_surface(const PolySystem& system, const Point& probe, double tol = 1e-8);

/// Group whose hyperplane section keeps the reduction irreducible (rank-two projection).
int curve_slice_group(const SurfaceCase& c);

/// Appends one random hyperplane on the factor chosen by curve_slice_group; curves pass through.
PolySystem reduce_to_curve(const PolySystem& surface, const SurfaceCase& c, std::uint64_t seed);

/// Merges witness sets of a curve cut by one group-0 form (wx) and one group-1 form (wy)
/// through h(t) = (1 - t) * gamma * lx * ly + t * g.
WitnessSet merge_witness_homotopy(const WitnessSet& wx, const WitnessSet& wy, std::uint64_t seed,
                                  const TrackerConfig& cfg = {}, int threads = 1);
WitnessSet merge_witness_homotopy(const WitnessSet& wx, const WitnessSet& wy, const MergedForm& g, Complex gamma,
                                  const TrackerConfig& cfg = {}, int threads = 1);

/// Multihomogeneous trace test on a partial witness collection.
MTraceReport multihomogeneous_trace_test(const PolySystem& system, const WitnessCollection& partial,
                                         std::uint64_t seed, const TrackerConfig& cfg = {}, double tol = 1e-6,
                                         int threads = 1);

}  // namespace nagtrace
