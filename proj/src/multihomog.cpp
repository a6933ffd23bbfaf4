#include "nagtrace/multihomog.hpp"

#include <algorithm>
#include <sstream>

namespace nagtrace {

namespace {

constexpr double kPointTol = 1e-6;
constexpr int kMergeAttempts = 4;  // first draw plus three reseeds

void require_two_groups(const PolySystem& system) {
  if (system.num_groups() != 2) throw DimensionMismatch("multihomogeneous operations need exactly two variable groups");
}

LinearForm random_form(const PolySystem& system, int g, std::mt19937_64& rng) {
  LinearForm f;
  f.group = g;
  for (int k = 0; k < system.group_size(g); ++k) f.coeffs.push_back(random_gaussian(rng));
  if (!system.groups()[g].homogeneous) f.constant = random_gaussian(rng);
  return f;
}

CVector group_part(const PolySystem& system, const Point& p, int g) {
  return p.segment(system.group_offset(g), system.group_size(g));
}

std::vector<CVector> distinct_projections(const PolySystem& system, const std::vector<Point>& pts, int g) {
  std::vector<Point> proj;
  for (const auto& p : pts) proj.push_back(group_part(system, p, g));
  return deduplicate(proj, kPointTol);
}

bool product_of_projections(const PolySystem& system, const std::vector<Point>& pts) {
  const auto p0 = distinct_projections(system, pts, 0);
  const auto p1 = distinct_projections(system, pts, 1);
  if (deduplicate(pts, kPointTol).size() != pts.size() || pts.size() != p0.size() * p1.size()) return false;
  for (const auto& a : p0) {
    for (const auto& b : p1) {
      const bool found = std::any_of(pts.begin(), pts.end(), [&](const Point& p) {
        return max_norm(group_part(system, p, 0) - a) <= kPointTol && max_norm(group_part(system, p, 1) - b) <= kPointTol;
      });
      if (!found) return false;
    }
  }
  return true;
}

// Trace of the projection to factor g: distinct group-g parts summed along a pencil that
// moves only the group-g forms.
double projection_trace_residual(const WitnessSet& w, int g, std::mt19937_64& rng, const TrackerConfig& cfg,
                                 int threads) {
  if (w.slice.forms[g].empty()) return 0.0;
  Pencil pencil{w.slice, std::vector<Complex>(w.slice.num_moving(), 0.0)};
  std::size_t k = 0;
  for (int h = 0; h < static_cast<int>(w.slice.forms.size()); ++h)
    for (std::size_t j = 0; j < w.slice.forms[h].size(); ++j, ++k)
      if (h == g) pencil.direction[k] = random_gaussian(rng);
  const Complex unit = random_unit(rng);
  std::vector<TraceSample> samples;
  std::optional<std::size_t> count;
  for (const Complex tau : {Complex(0.0), -1.0 * unit, -2.0 * unit}) {
    const WitnessSet moved = tau == Complex(0.0) ? w : move_slice(w, pencil.at(tau), cfg, threads);
    const auto proj = distinct_projections(w.system, moved.points, g);
    if (count && *count != proj.size()) return std::numeric_limits<double>::infinity();
    count = proj.size();
    TraceSample s{tau, CVector::Zero(w.system.group_size(g)), static_cast<int>(proj.size())};
    for (const auto& p : proj) s.sum += p;
    samples.push_back(std::move(s));
  }
  return collinearity_test(samples, 1.0).second;
}

}  // namespace

std::string slot_key(const Slot& s) { return std::to_string(s.first) + "," + std::to_string(s.second); }

Slot parse_slot_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw Error("slot key '" + key + "' is not of the form m1,m2");
  try {
    std::size_t a = 0, b = 0;
    const int m1 = std::stoi(key.substr(0, comma), &a);
    const int m2 = std::stoi(key.substr(comma + 1), &b);
    if (a != comma || b != key.size() - comma - 1 || m1 < 0 || m2 < 0) throw Error("bad slot key");
    return {m1, m2};
  } catch (const std::exception&) {
    throw Error("slot key '" + key + "' is not of the form m1,m2");
  }
}

std::int64_t MultiDegree::at(int m1, int m2) const {
  if (m1 < 0 || m2 < 0 || m1 + m2 != m || m1 >= static_cast<int>(values.size())) return 0;
  return values[m1];
}

std::size_t WitnessCollection::total_points() const {
  std::size_t n = 0;
  for (const auto& [slot, w] : sets) n += w.points.size();
  return n;
}

const char* to_string(SurfaceTag t) {
  switch (t) {
    case SurfaceTag::Product: return "product";
    case SurfaceTag::FiberedOverFirst: return "fibered_over_first";
    case SurfaceTag::FiberedOverSecond: return "fibered_over_second";
    case SurfaceTag::General: return "general";
  }
  return "unknown";
}

WitnessCollection witness_collection(const PolySystem& system, int m, std::uint64_t seed, const WitnessOptions& opts) {
  require_two_groups(system);
  if (m < 1) throw DimensionMismatch("witness collection needs dimension m >= 1");
  if (m != variety_dimension(system))
    throw DimensionMismatch("requested m = " + std::to_string(m) + " but the variety has dimension " +
                            std::to_string(variety_dimension(system)));
  std::mt19937_64 rng = make_rng(seed, "witness_collection");
  const Slice family = random_slice(system, {m, m}, rng);
  WitnessCollection coll{system, m, {}};
  for (int m1 = 0; m1 <= m; ++m1) {
    const int m2 = m - m1;
    Slice s = family;
    s.forms[0].resize(m1);
    s.forms[1].resize(m2);
    const std::uint64_t slot_seed = rng();
    if (m1 > system.groups()[0].projective_dim() || m2 > system.groups()[1].projective_dim()) {
      coll.sets.emplace(Slot{m1, m2}, WitnessSet{system, s, {}});
    } else {
      coll.sets.emplace(Slot{m1, m2}, witness_set_on(system, s, slot_seed, opts));
    }
  }
  return coll;
}

MultiDegree multidegree(const WitnessCollection& coll) {
  MultiDegree md{coll.m, std::vector<std::int64_t>(coll.m + 1, 0)};
  for (int m1 = 0; m1 <= coll.m; ++m1) {
    auto it = coll.sets.find({m1, coll.m - m1});
    if (it != coll.sets.end()) md.values[m1] = static_cast<std::int64_t>(it->second.points.size());
  }
  return md;
}

bool check_log_concavity(const MultiDegree& md) {
  for (int m1 = 1; m1 + 1 < static_cast<int>(md.values.size()); ++m1) {
    const boost::multiprecision::cpp_int mid = md.values[m1];
    if (mid * mid < boost::multiprecision::cpp_int(md.values[m1 - 1]) * md.values[m1 + 1]) return false;
  }
  return true;
}

boost::multiprecision::cpp_int segre_degree(const MultiDegree& md) {
  using boost::multiprecision::cpp_int;
  auto factorial = [](int n) {
    cpp_int f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  cpp_int total = 0;
  for (int m1 = 0; m1 < static_cast<int>(md.values.size()); ++m1)
    total += cpp_int(md.values[m1]) * factorial(md.m) / (factorial(m1) * factorial(md.m - m1));
  return total;
}

PolySystem append_forms(const PolySystem& system, const std::vector<LinearForm>& forms) {
  std::vector<Polynomial> polys;
  for (const auto& f : forms) polys.push_back(f.to_polynomial(system));
  return system.append(polys, "l");
}

SurfaceReduction reduce_to_surface(const PolySystem& system, const Slot& dims, std::uint64_t seed,
                                   const std::optional<MultiDegree>& known) {
  require_two_groups(system);
  const auto [m1, m2] = dims;
  SurfaceReduction out{system, {}, std::nullopt};
  if (m1 + m2 <= 1) return out;
  if (m1 < 1 || m2 < 1 || m1 > system.groups()[0].projective_dim() || m2 > system.groups()[1].projective_dim())
    throw DimensionMismatch("reduce_to_surface needs 1 <= m_i <= n_i");
  std::mt19937_64 rng = make_rng(seed, "reduce_to_surface");
  for (int k = 0; k < m1 - 1; ++k) out.appended.push_back(random_form(system, 0, rng));
  for (int k = 0; k < m2 - 1; ++k) out.appended.push_back(random_form(system, 1, rng));
  out.surface = append_forms(system, out.appended);
  if (system.declared_dim()) out.surface = out.surface.with_declared_dim(*system.declared_dim() - (m1 + m2 - 2));
  if (known) {
    out.expected = MultiDegree{2, {known->at(m1 - 1, m2 + 1), known->at(m1, m2), known->at(m1 + 1, m2 - 1)}};
  }
  return out;
}

SurfaceCase classify_surface(const PolySystem& system, const Point& probe, double tol) {
  require_two_groups(system);
  const CMatrix jac = system.jacobian(probe);
  const int n = system.num_variables();
  Eigen::JacobiSVD<CMatrix> svd(jac, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (!(smax > 0.0)) throw RankAmbiguous("Jacobian vanishes at the probe point");
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > 0.1 * tol * smax && sv[k] < 10.0 * tol * smax)
      throw RankAmbiguous("singular value " + std::to_string(sv[k] / smax) + " (relative) is too close to the rank tolerance");
    if (sv[k] >= tol * smax) ++rank;
  }
  const CMatrix kernel = svd.matrixV().rightCols(n - rank);

  SurfaceCase c;
  c.dimension = static_cast<int>(kernel.cols()) - system.num_homogeneous_groups();
  int ranks[2] = {0, 0};
  for (int g = 0; g < 2; ++g) {
    const CMatrix block = kernel.middleRows(system.group_offset(g), system.group_size(g));
    int r = 0;
    if (block.size() > 0) {
      Eigen::JacobiSVD<CMatrix> bsvd(block);
      for (Eigen::Index k = 0; k < bsvd.singularValues().size(); ++k)
        if (bsvd.singularValues()[k] >= tol) ++r;
    }
    if (system.groups()[g].homogeneous) r = std::max(0, r - 1);
    ranks[g] = r;
  }
  c.ranks = {ranks[0], ranks[1]};
  const bool deg0 = ranks[0] < c.dimension, deg1 = ranks[1] < c.dimension;
  c.tag = deg0 && deg1 ? SurfaceTag::Product
          : deg0       ? SurfaceTag::FiberedOverFirst
          : deg1       ? SurfaceTag::FiberedOverSecond
                       : SurfaceTag::General;
  return c;
}

int curve_slice_group(const SurfaceCase& c) {
  switch (c.tag) {
    case SurfaceTag::Product: throw ProductCase("product surface: decompose its factors instead of slicing");
    case SurfaceTag::FiberedOverFirst: return 1;
    case SurfaceTag::FiberedOverSecond:
    case SurfaceTag::General: return 0;
  }
  return 0;
}

PolySystem reduce_to_curve(const PolySystem& surface, const SurfaceCase& c, std::uint64_t seed) {
  require_two_groups(surface);
  if (variety_dimension(surface) <= 1) return surface;
  const int g = curve_slice_group(c);
  std::mt19937_64 rng = make_rng(seed, "reduce_to_curve");
  PolySystem out = append_forms(surface, {random_form(surface, g, rng)});
  if (surface.declared_dim()) out = out.with_declared_dim(*surface.declared_dim() - 1);
  return out;
}

WitnessSet merge_witness_homotopy(const WitnessSet& wx, const WitnessSet& wy, const MergedForm& g, Complex gamma,
                                  const TrackerConfig& cfg, int threads) {
  const PolySystem& system = wx.system;
  require_two_groups(system);
  if (wx.slice.dims() != std::vector<int>{1, 0} || wy.slice.dims() != std::vector<int>{0, 1})
    throw DimensionMismatch("merge needs a (1,0) and a (0,1) curve witness set");
  if (!wx.slice.approx_equal(Slice{wy.slice.charts, wx.slice.forms, wx.slice.merged}))
    throw DimensionMismatch("merge inputs use different charts");

  Slice target{wx.slice.charts, {{}, {}}, g};
  WitnessSet out{system, target, {}};
  std::vector<Point> starts = wx.points;
  starts.insert(starts.end(), wy.points.begin(), wy.points.end());
  if (starts.empty()) return out;

  std::vector<Polynomial> start_eqs;
  for (const auto& c : target.charts)
    if (c) start_eqs.push_back(c->to_polynomial(system) - Polynomial::constant(1.0));
  start_eqs.push_back(wx.slice.forms[0][0].to_polynomial(system) * wy.slice.forms[1][0].to_polynomial(system));
  Homotopy h(system.append(start_eqs, "slice"), out.sliced_system(), gamma);
  const auto results = track_all(h, starts, cfg, threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].status != PathStatus::Success)
      throw MergeFailure("merge path " + std::to_string(i) + " " + to_string(results[i].status));
    out.points.push_back(results[i].endpoint);
  }
  if (deduplicate(out.points, kPointTol).size() != out.points.size())
    throw MergeFailure("merge paths converged to coincident endpoints");
  return out;
}

WitnessSet merge_witness_homotopy(const WitnessSet& wx, const WitnessSet& wy, std::uint64_t seed,
                                  const TrackerConfig& cfg, int threads) {
  std::mt19937_64 rng = make_rng(seed, "merge");
  std::string last;
  for (int attempt = 0; attempt < kMergeAttempts; ++attempt) {
    MergedForm g{random_form(wx.system, 0, rng), random_form(wx.system, 1, rng)};
    const Complex gamma = random_unit(rng);
    try {
      return merge_witness_homotopy(wx, wy, g, gamma, cfg, threads);
    } catch (const MergeFailure& e) {
      last = e.what();
    }
  }
  throw MergeFailure("merge failed after reseeding: " + last);
}

namespace {

PairReport run_pair(const PolySystem& system, const WitnessCollection& partial, int m1, std::mt19937_64& rng,
                    const TrackerConfig& cfg, double tol, int threads) {
  const int m = partial.m;
  const int m2 = m - m1;
  PairReport pr;
  pr.pair = {m1, m2};
  const auto a_it = partial.sets.find({m1, m2});
  const auto b_it = partial.sets.find({m1 + 1, m2 - 1});
  const WitnessSet* a = a_it == partial.sets.end() ? nullptr : &a_it->second;
  const WitnessSet* b = b_it == partial.sets.end() ? nullptr : &b_it->second;
  const std::uint64_t merge_seed = rng();
  const std::uint64_t trace_seed = rng();
  const std::uint64_t form_seed = rng();
  if ((!a || a->points.empty()) && (!b || b->points.empty())) {
    pr.passed = true;
    return pr;
  }
  try {
    std::mt19937_64 form_rng(form_seed);
    // Forms shared by both slots define the curve.
    const Slice& ref = a ? a->slice : b->slice;
    std::vector<LinearForm> common0(ref.forms[0].begin(), ref.forms[0].begin() + m1);
    std::vector<LinearForm> common1(ref.forms[1].begin(), ref.forms[1].begin() + (m2 - 1));
    const LinearForm ly = a ? a->slice.forms[1][m2 - 1] : random_form(system, 1, form_rng);
    const LinearForm lx = b ? b->slice.forms[0][m1] : random_form(system, 0, form_rng);
    std::vector<LinearForm> common = common0;
    common.insert(common.end(), common1.begin(), common1.end());
    const PolySystem curve = append_forms(system, common).with_declared_dim(1);

    std::vector<Point> bpoints;
    if (b && !b->points.empty()) {
      Slice aligned{b->slice.charts, {common0, common1}, std::nullopt};
      aligned.forms[0].push_back(lx);
      bpoints = move_slice(*b, aligned, cfg, threads).points;
    }
    const WitnessSet wx{curve, Slice{ref.charts, {{lx}, {}}, std::nullopt}, bpoints};
    const WitnessSet wy{curve, Slice{ref.charts, {{}, {ly}}, std::nullopt}, a ? a->points : std::vector<Point>{}};
    const WitnessSet merged = merge_witness_homotopy(wx, wy, merge_seed, cfg, threads);
    pr.merged_count = static_cast<int>(merged.points.size());
    const TraceTestResult tr = trace_test(merged, all_indices(merged.points.size()), trace_seed, cfg, tol, threads);
    pr.residual = tr.residual;
    pr.passed = tr.complete;
  } catch (const Error& e) {
    pr.error = e.what();
    pr.passed = false;
  }
  return pr;
}

}  // namespace

MTraceReport multihomogeneous_trace_test(const PolySystem& system, const WitnessCollection& partial,
                                         std::uint64_t seed, const TrackerConfig& cfg, double tol, int threads) {
  require_two_groups(system);
  MTraceReport report;
  std::mt19937_64 rng = make_rng(seed, "mtrace");
  std::vector<Slot> nonempty;
  for (const auto& [slot, w] : partial.sets)
    if (!w.points.empty()) nonempty.push_back(slot);

  if (nonempty.empty()) {
    report.branch = "empty";
    report.error = "no witness points supplied";
    return report;
  }

  if (nonempty.size() == 1) {
    report.branch = "product";
    const WitnessSet& w = partial.sets.at(nonempty.front());
    try {
      report.surface = classify_surface(system, w.points.front());
    } catch (const Error& e) {
      report.error = e.what();
      return report;
    }
    if (report.surface->tag != SurfaceTag::Product) return report;
    report.product_equality = product_of_projections(system, w.points);
    bool traces = true;
    for (int g = 0; g < 2; ++g) {
      try {
        const double r = projection_trace_residual(w, g, rng, cfg, threads);
        report.projection_residuals.push_back(r);
        traces = traces && r < tol;
      } catch (const Error& e) {
        report.error = e.what();
        report.projection_residuals.push_back(std::numeric_limits<double>::infinity());
        traces = false;
      }
    }
    report.complete = traces && report.product_equality;
    return report;
  }

  report.branch = "curves";
  report.complete = true;
  for (int m1 = 0; m1 < partial.m; ++m1) {
    report.pairs.push_back(run_pair(system, partial, m1, rng, cfg, tol, threads));
    report.complete = report.complete && report.pairs.back().passed;
  }
  return report;
}

}  // namespace nagtrace
