// One line per acceptance criterion; exit status is the number of failures.
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "nagtrace/multihomog.hpp"
#include "support.hpp"

using namespace nagtrace;
using testing::fixture;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes << " [exception: " << e.what() << "]";
  }
  if (!c.ok) ++failures;
  const std::string notes = c.notes.str();
  std::printf("%s %2d %s%s%s\n", c.ok ? "PASS" : "FAIL", id, title, notes.empty() ? "" : " |", notes.c_str());
  std::fflush(stdout);
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) < tol; }

std::vector<std::vector<int>> proper_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n; ++k)
      if (mask & (1 << k)) s.push_back(k);
    out.push_back(s);
  }
  return out;
}

LinearForm form(int g, std::vector<Complex> c) { return LinearForm{g, std::move(c), 0.0}; }

// x0 y0^2 - x1 y1^2 with the chart x0 = y0 = 1 and hand-picked slice forms.
struct ExampleCurve {
  PolySystem system = load_system(fixture("curve12.sys"));
  std::vector<std::optional<LinearForm>> charts{form(0, {1.0, 0.0}), form(1, {1.0, 0.0})};
  LinearForm lx = form(0, {-3.5, 1.0});
  LinearForm ly = form(1, {1.0, 1.0});
  MergedForm g{form(0, {-1.0, 1.5}), form(1, {-10.0 / 3.0, -4.0 / 3.0})};

  WitnessSet wx() const { return witness_set_on(system, Slice{charts, {{lx}, {}}, std::nullopt}, 1); }
  WitnessSet wy() const { return witness_set_on(system, Slice{charts, {{}, {ly}}, std::nullopt}, 1); }
  // slot (m1, m2) counts slice forms per factor, so the lx set sits in (1, 0)
  WitnessCollection collection() const { return {system, 1, {{{1, 0}, wx()}, {{0, 1}, wy()}}}; }
};

std::vector<WitnessCollection> deletions(const WitnessCollection& c) {
  std::vector<WitnessCollection> out;
  for (const auto& [slot, w] : c.sets)
    for (std::size_t i = 0; i < w.points.size(); ++i) {
      WitnessCollection d = c;
      d.sets.at(slot).points.erase(d.sets.at(slot).points.begin() + static_cast<long>(i));
      out.push_back(std::move(d));
    }
  return out;
}

// Points of {chart = 1, form = 0, q = 0} in P^2 by the quadratic formula along the line.
std::vector<CVector> conic_on_line(const LinearForm& chart, const LinearForm& l,
                                   const std::function<Complex(const CVector&)>& q) {
  Eigen::Matrix<Complex, 2, 3> a;
  for (int k = 0; k < 3; ++k) {
    a(0, k) = chart.coeffs[k];
    a(1, k) = l.coeffs[k];
  }
  const Eigen::Vector2cd b(1.0 - chart.constant, -l.constant);
  const Eigen::Vector3cd p = a.colPivHouseholderQr().solve(b);
  const Eigen::Vector3cd v = Eigen::FullPivLU<Eigen::Matrix<Complex, 2, 3>>(a).kernel().col(0);
  // q(p + s v) = q(v) s^2 + (q(p + v) - q(p - v)) / 2 s + q(p)
  const Complex c2 = q(v), c1 = (q(p + v) - q(p - v)) / 2.0, c0 = q(p);
  const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
  return {p + (-c1 + disc) / (2.0 * c2) * v, p + (-c1 - disc) / (2.0 * c2) * v};
}

}  // namespace

int main() {
  criterion(1, "folium witness cardinality over five seeds", [](Check& c) {
    const PolySystem f = load_system(fixture("folium.sys"));
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3, 17, 2024}) {
      const WitnessSet w = witness_set(f, {1}, seed);
      c.require(w.size() == 3, "seed " + std::to_string(seed) + " gave " + std::to_string(w.size()) + " points");
      c.require(deduplicate(w.points).size() == w.size(), "repeated points");
      for (const auto& p : w.points) worst = std::max(worst, w.residual(p));
    }
    c.require(worst < 1e-10, "residual");
    c.notes << " max residual " << worst;
  });

  criterion(2, "folium trace along the coordinate pencil", [](Check& c) {
    const PolySystem s = load_system(fixture("folium_transformed.sys"));
    // base line t = 7 moved to t = 7 + tau
    const Slice base{{std::nullopt}, {{LinearForm{0, {0.0, 1.0}, -7.0}}}, std::nullopt};
    const WitnessSet w = witness_set_on(s, base, 3);
    c.require(w.size() == 3, "three points on the base line");
    const Complex u = std::polar(1.0, 0.7);
    const TraceTestResult r = trace_test_on(w, all_indices(3), Pencil{base, {-1.0}}, {0.0, -u, -2.0 * u});
    const Complex slope = r.trace.c0[0], intercept = r.trace.c1[0] - 7.0 * r.trace.c0[0];
    c.require(r.complete, "collinear");
    c.require(close(slope, -1.0 / 3.0, 1e-6) && close(intercept, 13.0 / 3.0, 1e-6), "sum trace");
    c.require(close(slope / 3.0, -1.0 / 9.0, 1e-6) && close(intercept / 3.0, 13.0 / 9.0, 1e-6), "average trace");
    c.notes << " sum trace " << slope.real() << " t + " << intercept.real();
  });

  criterion(3, "folium proper subsets fail, full set passes", [](Check& c) {
    const WitnessSet w = witness_set(load_system(fixture("folium.sys")), {1}, 42);
    c.require(w.size() == 3, "three points");
    double lowest = 1e300;
    for (const auto& sub : proper_subsets(3)) {
      const TraceTestResult r = trace_test(w, sub, 1);
      c.require(!r.complete && r.residual > 1e-2, "subset residual " + std::to_string(r.residual));
      lowest = std::min(lowest, r.residual);
    }
    const TraceTestResult full = trace_test(w, all_indices(3), 1);
    c.require(full.complete && full.residual < 1e-6, "full set");
    c.notes << " smallest subset residual " << lowest << ", full " << full.residual;
  });

  criterion(4, "ellipse and folium decompose into blocks {2,3}", [](Check& c) {
    const WitnessSet w = witness_set(load_system(fixture("ellipse_folium.sys")), {1}, 42);
    c.require(w.size() == 5, "five points");
    const Partition p = monodromy_partition(w, 30, 42);
    c.require(p.block_sizes() == std::vector<int>{2, 3}, "block sizes");
    c.require(p.loops_run <= 30, "loop budget");
    for (const auto& block : p.blocks) c.require(trace_test(w, block, 5).complete, "block certified");
    c.notes << " " << p.loops_run << " loops";
  });

  criterion(5, "bidegree (1,2) curve end to end", [](Check& c) {
    const ExampleCurve ex;
    const WitnessSet wx = ex.wx(), wy = ex.wy();
    c.require(wy.size() == 1 && wx.size() == 2, "sizes: ly slice 1, lx slice 2");
    c.require(wy.size() == 1 && close(wy.points[0][1], 1.0, 1e-10) && close(wy.points[0][3], -1.0, 1e-10),
              "ly point (1, -1)");
    for (const auto& p : wx.points)
      c.require(close(p[1], 3.5, 1e-10) && close(std::abs(p[3]), std::sqrt(2.0 / 7.0), 1e-10), "lx points");
    const WitnessCollection random = witness_collection(ex.system, 1, 7);
    c.require(random.sets.at({0, 1}).size() == 1 && random.sets.at({1, 0}).size() == 2, "random collection sizes");

    const WitnessSet merged = merge_witness_homotopy(wx, wy, ex.g, 1.0);
    c.require(merged.size() == 3, "merge yields 3 points");
    for (const auto& p : merged.points) c.require(merged.residual(p) < 1e-10, "merged point on V(g)");

    const auto samples = trace_samples(merged, all_indices(3), Pencil{merged.slice, {1.0}}, {0.0, -1.0, -2.0});
    const double table[3][2] = {{1.48148, -0.83333}, {1.92592, -1.08333}, {2.37037, -1.33333}};
    for (int k = 0; k < 3; ++k) {
      const CVector avg = samples[k].sum / 3.0;
      c.require(close(avg[1], table[k][0], 1e-4) && close(avg[3], table[k][1], 1e-4), "table row");
      // 8y^3 + (20 - 6 tau) y^2 - 9 = 0, x = 1/y^2: sum y = -b/8, sum 1/y = 0, sum 1/(yi yj) = b/(-9)
      const Complex b = 20.0 - 6.0 * samples[k].tau;
      const Complex sum_y = -b / 8.0, sum_x = 0.0 - 2.0 * (b / -9.0);
      c.require(close(samples[k].sum[1], sum_x, 1e-9) && close(samples[k].sum[3], sum_y, 1e-9), "univariate oracle");
    }
    const auto [collinear, residual] = collinearity_test(samples);
    c.require(collinear, "collinear");
    const TraceLine line = fit_trace(samples);
    c.require(close(line.c1[1] / 3.0, 40.0 / 27.0, 1e-6) && close(line.c0[1] / 3.0, -4.0 / 9.0, 1e-6), "x trace");
    c.require(close(line.c1[3] / 3.0, -5.0 / 6.0, 1e-6) && close(line.c0[3] / 3.0, 0.25, 1e-6), "y trace");
    c.notes << " residual " << residual;
  });

  criterion(6, "multihomogeneous trace test on the bidegree (1,2) curve", [](Check& c) {
    const ExampleCurve ex;
    const MTraceReport full = multihomogeneous_trace_test(ex.system, ex.collection(), 1);
    c.require(full.complete, "complete collection accepted");
    const auto cut = deletions(ex.collection());
    c.require(cut.size() == 3, "three deletions");
    for (const auto& d : cut) c.require(!multihomogeneous_trace_test(ex.system, d, 1).complete, "deletion rejected");
  });

  std::vector<MultiDegree> computed;
  criterion(7, "multidegrees and Segre degrees", [&computed](Check& c) {
    const MultiDegree cremona = multidegree(witness_collection(load_system(fixture("cremona2.sys")), 2, 42));
    const MultiDegree lg2 = multidegree(witness_collection(load_system(fixture("lineargraph2.sys")), 2, 42));
    const MultiDegree lg3 = multidegree(witness_collection(load_system(fixture("lineargraph3.sys")), 3, 42));
    c.require(cremona.values == std::vector<std::int64_t>{1, 2, 1} && segre_degree(cremona) == 6, "Cremona");
    c.require(lg2.values == std::vector<std::int64_t>{1, 1, 1} && segre_degree(lg2) == 4, "linear graph m=2");
    c.require(segre_degree(lg3) == 8, "linear graph m=3");
    computed = {cremona, lg2, lg3};
    c.notes << " Segre " << segre_degree(cremona) << ", " << segre_degree(lg2) << ", " << segre_degree(lg3);
  });

  criterion(8, "log-concavity", [&computed](Check& c) {
    const PolySystem curve = load_system(fixture("curve12.sys"));
    const PolySystem conics = load_system(fixture("conic_product.sys"));
    computed.push_back(multidegree(witness_collection(curve, 1, 42)));
    computed.push_back(multidegree(witness_collection(conics, 2, 42)));
    c.require(computed.size() == 5, "all multidegrees computed");
    for (const auto& md : computed) c.require(check_log_concavity(md), "computed vector");
    c.require(!check_log_concavity({2, {1, 1, 2}}), "(1,1,2) rejected");
  });

  criterion(9, "product branch on two conics", [](Check& c) {
    const PolySystem s = load_system(fixture("conic_product.sys"));
    const WitnessSet w11 = witness_collection(s, 2, 8).sets.at({1, 1});
    c.require(w11.size() == 4, "four points");
    // independent solve: each conic on its own line, then the product
    const auto c1 = [](const CVector& x) { return x[0] * x[0] + 2.0 * x[1] * x[1] - 3.0 * x[2] * x[2] + x[0] * x[1]; };
    const auto c2 = [](const CVector& y) { return y[0] * y[0] - y[1] * y[2] + 2.0 * y[2] * y[2] + y[0] * y[2]; };
    std::vector<Point> oracle;
    for (const auto& x : conic_on_line(*w11.slice.charts[0], w11.slice.forms[0][0], c1))
      for (const auto& y : conic_on_line(*w11.slice.charts[1], w11.slice.forms[1][0], c2)) {
        Point p(6);
        p << x, y;
        oracle.push_back(p);
      }
    c.require(testing::same_points(w11.points, oracle, 1e-8), "matches the direct solve");

    const WitnessCollection only{s, 2, {{{1, 1}, w11}}};
    const MTraceReport r = multihomogeneous_trace_test(s, only, 3);
    c.require(r.complete && r.branch == "product" && r.product_equality, "four points certified");
    for (const auto& d : deletions(only)) c.require(!multihomogeneous_trace_test(s, d, 3).complete, "three points rejected");
  });

  criterion(10, "property suite", [](Check& c) {
    // tracker determinism
    const PolySystem ef = load_system(fixture("ellipse_folium.sys"));
    const PolySystem square = ef.append({parse_system("variable_group x y; l = x + 3*y - 0.5;").polynomials()[0]});
    const SolveReport one = solve_square(square, {}, 77, 1);
    for (int threads : {2, 4, 0}) {
      const SolveReport many = solve_square(square, {}, 77, threads);
      bool same = many.paths.size() == one.paths.size();
      for (std::size_t i = 0; same && i < one.paths.size(); ++i)
        same = many.paths[i].status == one.paths[i].status &&
               (many.paths[i].endpoint.array() == one.paths[i].endpoint.array()).all();
      c.require(same, "bit identical with " + std::to_string(threads) + " threads");
    }

    // jacobian against central differences
    std::mt19937_64 rng(3);
    double worst_fd = 0.0;
    for (const char* name : {"folium.sys", "cremona2.sys", "lineargraph3.sys", "p4p4_stretch.sys"}) {
      const PolySystem s = load_system(fixture(name));
      const Point z = testing::random_point(s.num_variables(), rng);
      const CMatrix jac = s.jacobian(z);
      for (int v = 0; v < s.num_variables(); ++v) {
        Point zp = z, zm = z;
        zp[v] += 1e-5;
        zm[v] -= 1e-5;
        const CVector fd = (s.evaluate(zp) - s.evaluate(zm)) / 2e-5;
        for (int p = 0; p < s.num_polynomials(); ++p)
          worst_fd = std::max(worst_fd, std::abs(fd[p] - jac(p, v)) / std::max(1.0, std::abs(jac(p, v))));
      }
    }
    c.require(worst_fd < 1e-6, "jacobian");

    // move_slice round trip
    double worst_move = 0.0;
    for (const char* name : {"folium.sys", "ellipse_folium.sys", "cremona2.sys"}) {
      const PolySystem s = load_system(fixture(name));
      const WitnessSet w = witness_set(s, s.num_groups() == 1 ? std::vector<int>{1} : std::vector<int>{1, 1}, 5);
      const WitnessSet back = move_slice(move_slice(w, rerandomize_forms(w.slice, s, rng)), w.slice);
      c.require(back.size() == w.size(), "round trip keeps every point");
      for (std::size_t i = 0; i < std::min(w.size(), back.size()); ++i)
        worst_move = std::max(worst_move, max_norm(back.points[i] - w.points[i]));
    }
    c.require(worst_move < 1e-8, "round trip");

    // monodromy loops permute the witness points
    const WitnessSet w = witness_set(ef, {1}, 6);
    for (int loop = 0; loop < 10; ++loop) {
      std::vector<int> perm = monodromy_loop(w, {rerandomize_forms(w.slice, ef, rng), rerandomize_forms(w.slice, ef, rng)});
      std::sort(perm.begin(), perm.end());
      c.require(perm == all_indices(w.size()), "bijection");
    }
    c.notes << " fd " << worst_fd << ", round trip " << worst_move;
  });

  return failures;
}
