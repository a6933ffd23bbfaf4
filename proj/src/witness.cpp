#include "nagtrace/witness.hpp"

#include <algorithm>
#include <numeric>

namespace nagtrace {

Polynomial LinearForm::to_polynomial(const PolySystem& system) const {
  if (static_cast<int>(coeffs.size()) != system.group_size(group))
    throw DimensionMismatch("linear form size does not match its variable group");
  return Polynomial::linear(system.group_offset(group), coeffs, constant);
}

Complex LinearForm::evaluate(const PolySystem& system, const Point& z) const {
  Complex v = constant;
  const int off = system.group_offset(group);
  for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * z[off + static_cast<int>(k)];
  return v;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
  if (group != o.group || coeffs.size() != o.coeffs.size()) throw DimensionMismatch("adding incompatible linear forms");
  LinearForm r = *this;
  for (std::size_t k = 0; k < coeffs.size(); ++k) r.coeffs[k] += o.coeffs[k];
  r.constant += o.constant;
  return r;
}

LinearForm LinearForm::operator*(Complex c) const {
  LinearForm r = *this;
  for (auto& a : r.coeffs) a *= c;
  r.constant *= c;
  return r;
}

std::vector<int> Slice::dims() const {
  std::vector<int> d;
  for (const auto& f : forms) d.push_back(static_cast<int>(f.size()));
  return d;
}

Polynomial Slice::unit(const PolySystem& system, int g) const {
  if (g < static_cast<int>(charts.size()) && charts[g]) return charts[g]->to_polynomial(system);
  return Polynomial::constant(1.0);
}

std::vector<Polynomial> Slice::equations(const PolySystem& system) const {
  std::vector<Polynomial> eqs;
  for (const auto& c : charts)
    if (c) eqs.push_back(c->to_polynomial(system) - Polynomial::constant(1.0));
  for (const auto& group_forms : forms)
    for (const auto& f : group_forms) eqs.push_back(f.to_polynomial(system));
  if (merged) {
    const Polynomial h0 = unit(system, merged->first.group);
    const Polynomial h1 = unit(system, merged->second.group);
    eqs.push_back(h0 * merged->second.to_polynomial(system) + merged->first.to_polynomial(system) * h1 + h0 * h1);
  }
  return eqs;
}

int Slice::num_moving() const {
  int n = merged ? 1 : 0;
  for (const auto& f : forms) n += static_cast<int>(f.size());
  return n;
}

bool Slice::same_shape(const Slice& other) const {
  if (charts.size() != other.charts.size() || forms.size() != other.forms.size()) return false;
  for (std::size_t g = 0; g < charts.size(); ++g)
    if (charts[g].has_value() != other.charts[g].has_value()) return false;
  for (std::size_t g = 0; g < forms.size(); ++g)
    if (forms[g].size() != other.forms[g].size()) return false;
  return merged.has_value() == other.merged.has_value();
}

namespace {

LinearForm lerp_form(const LinearForm& a, const LinearForm& b, Complex s) { return a * (1.0 - s) + b * s; }

bool forms_close(const LinearForm& a, const LinearForm& b, double tol) {
  if (a.group != b.group || a.coeffs.size() != b.coeffs.size()) return false;
  for (std::size_t k = 0; k < a.coeffs.size(); ++k)
    if (std::abs(a.coeffs[k] - b.coeffs[k]) > tol) return false;
  return std::abs(a.constant - b.constant) <= tol;
}

}  // namespace

Slice Slice::lerp(const Slice& other, Complex s) const {
  if (!same_shape(other)) throw DimensionMismatch("slices have different shapes");
  Slice r = *this;
  for (std::size_t g = 0; g < charts.size(); ++g)
    if (charts[g]) r.charts[g] = lerp_form(*charts[g], *other.charts[g], s);
  for (std::size_t g = 0; g < forms.size(); ++g)
    for (std::size_t k = 0; k < forms[g].size(); ++k) r.forms[g][k] = lerp_form(forms[g][k], other.forms[g][k], s);
  if (merged) {
    r.merged->first = lerp_form(merged->first, other.merged->first, s);
    r.merged->second = lerp_form(merged->second, other.merged->second, s);
  }
  return r;
}

bool Slice::approx_equal(const Slice& other, double tol) const {
  if (!same_shape(other)) return false;
  for (std::size_t g = 0; g < charts.size(); ++g)
    if (charts[g] && !forms_close(*charts[g], *other.charts[g], tol)) return false;
  for (std::size_t g = 0; g < forms.size(); ++g)
    for (std::size_t k = 0; k < forms[g].size(); ++k)
      if (!forms_close(forms[g][k], other.forms[g][k], tol)) return false;
  if (merged)
    return forms_close(merged->first, other.merged->first, tol) && forms_close(merged->second, other.merged->second, tol);
  return true;
}

PolySystem WitnessSet::sliced_system() const { return system.append(slice.equations(system), "slice"); }

double WitnessSet::residual(const Point& p) const { return max_norm(sliced_system().evaluate(p)); }

std::vector<int> Partition::block_sizes() const {
  std::vector<int> s;
  for (const auto& b : blocks) s.push_back(static_cast<int>(b.size()));
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

LinearForm random_form(const PolySystem& system, int g, bool with_constant, std::mt19937_64& rng) {
  LinearForm f;
  f.group = g;
  for (int k = 0; k < system.group_size(g); ++k) f.coeffs.push_back(random_gaussian(rng));
  if (with_constant) f.constant = random_gaussian(rng);
  return f;
}

}  // namespace

Slice random_slice(const PolySystem& system, const std::vector<int>& count, std::mt19937_64& rng) {
  if (static_cast<int>(count.size()) != system.num_groups()) throw DimensionMismatch("slice needs one count per group");
  Slice s;
  for (int g = 0; g < system.num_groups(); ++g) {
    const bool hom = system.groups()[g].homogeneous;
    s.charts.push_back(hom ? std::optional<LinearForm>(random_form(system, g, false, rng)) : std::nullopt);
    std::vector<LinearForm> fs;
    for (int k = 0; k < count[g]; ++k) fs.push_back(random_form(system, g, !hom, rng));
    s.forms.push_back(std::move(fs));
  }
  return s;
}

Slice rerandomize_forms(const Slice& base, const PolySystem& system, std::mt19937_64& rng) {
  Slice s = base;
  for (auto& group_forms : s.forms)
    for (auto& f : group_forms) f = random_form(system, f.group, !system.groups()[f.group].homogeneous, rng);
  if (s.merged) {
    s.merged->first = random_form(system, s.merged->first.group, !system.groups()[s.merged->first.group].homogeneous, rng);
    s.merged->second = random_form(system, s.merged->second.group, !system.groups()[s.merged->second.group].homogeneous, rng);
  }
  return s;
}

int variety_dimension(const PolySystem& system) {
  if (system.declared_dim()) return *system.declared_dim();
  const int m = system.num_variables() - system.num_homogeneous_groups() - system.num_polynomials();
  if (m < 0) throw Error("system is overdetermined; declare its dimension with 'dimension m;'");
  return m;
}

PolySystem square_sliced_system(const PolySystem& system, const Slice& slice, std::mt19937_64& rng) {
  const auto eqs = slice.equations(system);
  const int codim = system.num_variables() - static_cast<int>(eqs.size());
  if (codim < 0) throw DimensionMismatch("slice has more equations than the ambient dimension");
  const auto plan = square_up_plan(system, codim);
  std::vector<Polynomial> rows;
  std::vector<Polynomial> units;
  for (int g = 0; g < system.num_groups(); ++g) units.push_back(slice.unit(system, g));
  auto pad = [&](const Polynomial& p, const std::vector<int>& target) {
    const auto deg = system.degree_vector(p);
    Polynomial r = p;
    for (int g = 0; g < system.num_groups(); ++g)
      if (system.groups()[g].homogeneous && target[g] > deg[g]) r = r * units[g].pow(target[g] - deg[g]);
    return r;
  };
  for (const auto& r : plan) {
    Polynomial row = pad(system.polynomials()[r.row], r.degree);
    for (int e : r.extras) row = row + pad(system.polynomials()[e], r.degree) * random_gaussian(rng);
    rows.push_back(std::move(row));
  }
  rows.insert(rows.end(), eqs.begin(), eqs.end());
  return system.with_polynomials(std::move(rows)).with_declared_dim(std::nullopt);
}

WitnessSet witness_set_on(const PolySystem& system, const Slice& slice, std::uint64_t seed, const WitnessOptions& opts) {
  std::mt19937_64 rng = make_rng(seed, "witness_set_on");
  const PolySystem square = square_sliced_system(system, slice, rng);
  const SolveReport report = solve_square(square, opts.tracker, rng(), opts.threads);
  if (report.failed > opts.failure_fraction * static_cast<double>(report.bezout))
    throw GenericityFailure(std::to_string(report.failed) + " of " + std::to_string(report.bezout) +
                            " paths failed; reseed the slice");
  WitnessSet w{system, slice, {}};
  const PolySystem full = w.sliced_system();
  const bool randomized = system.num_polynomials() != square.num_polynomials() - static_cast<int>(slice.equations(system).size());
  std::vector<Point> kept;
  for (const auto& p : report.points) {
    Point q = p;
    if (randomized) {
      try {
        q = refine(full, p, opts.tracker.newton_tol, opts.tracker.max_newton_iters);
      } catch (const Error&) {
        continue;
      }
    }
    if (max_norm(full.evaluate(q)) < opts.membership_tol) kept.push_back(q);
  }
  w.points = deduplicate(kept);
  return w;
}

WitnessSet witness_set(const PolySystem& system, const std::vector<int>& dims, std::uint64_t seed,
                       const WitnessOptions& opts) {
  if (static_cast<int>(dims.size()) != system.num_groups()) throw DimensionMismatch("dims need one entry per group");
  int m = 0;
  for (int g = 0; g < system.num_groups(); ++g) {
    if (dims[g] < 0 || dims[g] > system.groups()[g].projective_dim())
      throw DimensionMismatch("slice dimension exceeds the projective dimension of group " + std::to_string(g));
    m += dims[g];
  }
  if (m != variety_dimension(system))
    throw DimensionMismatch("dims sum to " + std::to_string(m) + " but the variety has dimension " +
                            std::to_string(variety_dimension(system)));
  std::mt19937_64 rng = make_rng(seed, "witness_set");
  const Slice slice = random_slice(system, dims, rng);
  return witness_set_on(system, slice, rng(), opts);
}

WitnessSet move_slice(const WitnessSet& w, const Slice& target, const TrackerConfig& cfg, int threads) {
  if (!w.slice.same_shape(target)) throw DimensionMismatch("move_slice: target slice has a different shape");
  WitnessSet out{w.system, target, {}};
  if (w.slice.approx_equal(target) || w.points.empty()) {
    out.points = w.points;
    return out;
  }
  Homotopy h(w.sliced_system(), out.sliced_system(), 1.0);
  const auto results = track_all(h, w.points, cfg, threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].status != PathStatus::Success)
      throw MoveFailure("move_slice: path " + std::to_string(i) + " " + to_string(results[i].status),
                        static_cast<int>(i));
    out.points.push_back(results[i].endpoint);
  }
  return out;
}

std::vector<int> match_points(const std::vector<Point>& origin, const std::vector<Point>& moved, double tol) {
  if (origin.size() != moved.size()) throw AmbiguousMatch("point counts differ");
  std::vector<int> perm(moved.size(), -1);
  std::vector<bool> used(origin.size(), false);
  for (std::size_t i = 0; i < moved.size(); ++i) {
    int best = -1;
    double best_d = 0.0;
    for (std::size_t j = 0; j < origin.size(); ++j) {
      const double d = max_norm(moved[i] - origin[j]);
      if (best < 0 || d < best_d) {
        best = static_cast<int>(j);
        best_d = d;
      }
    }
    if (best < 0 || best_d > tol) throw AmbiguousMatch("endpoint " + std::to_string(i) + " matches no origin point");
    if (used[best]) throw AmbiguousMatch("two endpoints claim origin point " + std::to_string(best));
    used[best] = true;
    perm[i] = best;
  }
  return perm;
}

std::vector<int> monodromy_loop(const WitnessSet& w, const std::vector<Slice>& waypoints, const TrackerConfig& cfg,
                                int threads) {
  WitnessSet cur = w;
  for (const auto& wp : waypoints) cur = move_slice(cur, wp, cfg, threads);
  if (!cur.slice.approx_equal(w.slice)) cur = move_slice(cur, w.slice, cfg, threads);
  return match_points(w.points, cur.points);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

Partition monodromy_partition(const WitnessSet& w, int budget, std::uint64_t seed, const TrackerConfig& cfg,
                              int threads, int stable_window) {
  if (budget < 1) throw Error("monodromy budget must be at least one loop");
  const int n = static_cast<int>(w.points.size());
  UnionFind uf(n);
  std::mt19937_64 rng = make_rng(seed, "monodromy");
  Partition out;
  int stable = 0;
  for (int loop = 0; loop < budget && stable < stable_window; ++loop) {
    const Slice a = rerandomize_forms(w.slice, w.system, rng);
    const Slice b = rerandomize_forms(w.slice, w.system, rng);
    ++out.loops_run;
    try {
      const auto perm = monodromy_loop(w, {a, b}, cfg, threads);
      bool changed = false;
      for (int i = 0; i < n; ++i) changed = uf.unite(i, perm[i]) || changed;
      stable = changed ? 0 : stable + 1;
    } catch (const Error&) {
      ++out.loops_failed;  // a failed loop says nothing about stability
    }
  }
  out.warning = out.loops_failed >= 3;
  std::vector<std::vector<int>> by_root(n);
  for (int i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  for (auto& b : by_root)
    if (!b.empty()) out.blocks.push_back(std::move(b));
  return out;
}

}  // namespace nagtrace
