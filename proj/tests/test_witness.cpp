#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "nagtrace/witness.hpp"
#include "support.hpp"

using namespace nagtrace;
using testing::fixture;

namespace {

LinearForm affine_line(Complex a, Complex b, Complex c) { return LinearForm{0, {a, b}, c}; }

Slice line_slice(Complex a, Complex b, Complex c) { return Slice{{std::nullopt}, {{affine_line(a, b, c)}}, std::nullopt}; }

bool is_permutation(const std::vector<int>& p) {
  std::vector<int> s = p;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != static_cast<int>(i)) return false;
  return true;
}

Complex ellipse(const Point& p) {
  const Complex x = p[0], y = p[1];
  return 8.0 * (x + 1.0) * (x + 1.0) + 3.0 * (2.0 * y + x + 1.0) * (2.0 * y + x + 1.0) - 8.0;
}

}  // namespace

TEST_CASE("witness set sizes") {
  CHECK(witness_set(load_system(fixture("folium.sys")), {1}, 42).size() == 3);
  CHECK(witness_set(load_system(fixture("ellipse_folium.sys")), {1}, 42).size() == 5);
  CHECK(witness_set(load_system(fixture("two_lines.sys")), {1}, 42).size() == 2);
  const PolySystem c = load_system(fixture("curve12.sys"));
  CHECK(witness_set(c, {1, 0}, 42).size() == 2);  // cut by a form in x: two values of y
  CHECK(witness_set(c, {0, 1}, 42).size() == 1);
}

TEST_CASE("witness cardinality does not depend on the seed") {
  for (const char* name : {"folium.sys", "ellipse_folium.sys", "folium_transformed.sys"}) {
    const PolySystem s = load_system(fixture(name));
    std::set<std::size_t> sizes;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) sizes.insert(witness_set(s, {1}, seed).size());
    CHECK(sizes.size() == 1);
  }
  const PolySystem g = load_system(fixture("lineargraph2.sys"));
  for (const std::vector<int>& dims : {std::vector<int>{2, 0}, {1, 1}, {0, 2}}) {
    std::set<std::size_t> sizes;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) sizes.insert(witness_set(g, dims, seed).size());
    CHECK(sizes == std::set<std::size_t>{1});
  }
}

TEST_CASE("witness points lie on the variety and the slice") {
  for (const char* name : {"folium.sys", "ellipse_folium.sys"}) {
    const WitnessSet w = witness_set(load_system(fixture(name)), {1}, 8);
    for (const auto& p : w.points) CHECK(w.residual(p) < 1e-10);
  }
  const WitnessSet w = witness_set(load_system(fixture("cremona2.sys")), {1, 1}, 8);
  CHECK(w.size() == 2);
  for (const auto& p : w.points) CHECK(w.residual(p) < 1e-10);
}

TEST_CASE("dimension checks") {
  const PolySystem f = load_system(fixture("folium.sys"));
  CHECK_THROWS_AS(witness_set(f, {2}, 1), DimensionMismatch);
  CHECK_THROWS_AS(witness_set(f, {1, 0}, 1), DimensionMismatch);
  CHECK(variety_dimension(f) == 1);
  CHECK(variety_dimension(load_system(fixture("cremona2.sys"))) == 2);
  CHECK(variety_dimension(load_system(fixture("lineargraph3.sys"))) == 3);
}

TEST_CASE("random slices") {
  std::mt19937_64 rng(1);
  const PolySystem c = load_system(fixture("cremona2.sys"));
  const Slice s = random_slice(c, {2, 1}, rng);
  CHECK(s.dims() == std::vector<int>{2, 1});
  REQUIRE(s.charts[0]);
  CHECK(s.charts[0]->constant == Complex(0.0));
  CHECK(s.forms[0][0].constant == Complex(0.0));  // homogeneous group: no constant
  CHECK(s.num_moving() == 3);
  const Slice r = rerandomize_forms(s, c, rng);
  CHECK(r.same_shape(s));
  CHECK_FALSE(r.approx_equal(s));
  CHECK(r.charts[0]->coeffs == s.charts[0]->coeffs);
}

TEST_CASE("move_slice to the same slice is the identity") {
  const WitnessSet w = witness_set(load_system(fixture("folium.sys")), {1}, 3);
  const WitnessSet m = move_slice(w, w.slice);
  REQUIRE(m.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK((m.points[i].array() == w.points[i].array()).all());
}

TEST_CASE("folium on four parallel lines") {
  const PolySystem f = load_system(fixture("folium.sys"));
  const WitnessSet w = witness_set_on(f, line_slice(-1.0, 2.0, -7.0), 1);
  REQUIRE(w.size() == 3);
  for (double c : {-4.0, -1.0, 2.0, 5.0}) {
    // A real segment of real lines can cross a tangent line; detour through a complex one.
    const WitnessSet detour = move_slice(w, line_slice(-1.0, 2.0, Complex(0.5 * (c - 7.0), 2.0)));
    const WitnessSet m = move_slice(detour, line_slice(-1.0, 2.0, c));
    CHECK(m.size() == 3);
    for (const auto& p : m.points) CHECK(m.residual(p) < 1e-10);
    CHECK(deduplicate(m.points).size() == 3);
  }
}

TEST_CASE("move_slice round trip") {
  std::mt19937_64 rng(12);
  for (const char* name : {"folium.sys", "ellipse_folium.sys", "cremona2.sys"}) {
    const PolySystem s = load_system(fixture(name));
    const WitnessSet w = witness_set(s, s.num_groups() == 1 ? std::vector<int>{1} : std::vector<int>{1, 1}, 5);
    const Slice other = rerandomize_forms(w.slice, s, rng);
    const WitnessSet there = move_slice(w, other);
    for (const auto& p : there.points) CHECK(there.residual(p) < 1e-10);
    const WitnessSet back = move_slice(there, w.slice);
    REQUIRE(back.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(max_norm(back.points[i] - w.points[i]) < 1e-8);
  }
}

TEST_CASE("match_points") {
  Point a(1), b(1), c(1);
  a << 0.0;
  b << 1.0;
  c << 1.0 + 1e-9;
  CHECK(match_points({a, b}, {b, a}) == std::vector<int>{1, 0});
  CHECK_THROWS_AS(match_points({a, b}, {b, c}), AmbiguousMatch);
  CHECK_THROWS_AS(match_points({a, b}, {a}), AmbiguousMatch);
}

TEST_CASE("constant loop gives the identity") {
  const WitnessSet w = witness_set(load_system(fixture("folium.sys")), {1}, 3);
  CHECK(monodromy_loop(w, {w.slice, w.slice}) == std::vector<int>{0, 1, 2});
}

TEST_CASE("monodromy on the folium is nontrivial") {
  const PolySystem f = load_system(fixture("folium.sys"));
  const WitnessSet w = witness_set(f, {1}, 4);
  std::mt19937_64 rng(4);
  int nontrivial = 0;
  for (int loop = 0; loop < 20; ++loop) {
    const auto perm = monodromy_loop(w, {rerandomize_forms(w.slice, f, rng), rerandomize_forms(w.slice, f, rng)});
    CHECK(is_permutation(perm));
    if (perm != std::vector<int>{0, 1, 2}) ++nontrivial;
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("loop legs compose to the loop permutation") {
  const PolySystem f = load_system(fixture("ellipse_folium.sys"));
  const WitnessSet w = witness_set(f, {1}, 6);
  std::mt19937_64 rng(6);
  for (int loop = 0; loop < 5; ++loop) {
    const Slice a = rerandomize_forms(w.slice, f, rng), b = rerandomize_forms(w.slice, f, rng);
    const WitnessSet back = move_slice(move_slice(move_slice(w, a), b), w.slice);
    CHECK(match_points(w.points, back.points) == monodromy_loop(w, {a, b}));
  }
}

TEST_CASE("ellipse and folium points never mix") {
  const PolySystem f = load_system(fixture("ellipse_folium.sys"));
  const WitnessSet w = witness_set(f, {1}, 2);
  std::vector<bool> on_ellipse;
  for (const auto& p : w.points) on_ellipse.push_back(std::abs(ellipse(p)) < 1e-8);
  CHECK(std::count(on_ellipse.begin(), on_ellipse.end(), true) == 2);
  std::mt19937_64 rng(2);
  for (int loop = 0; loop < 10; ++loop) {
    const auto perm = monodromy_loop(w, {rerandomize_forms(w.slice, f, rng), rerandomize_forms(w.slice, f, rng)});
    REQUIRE(is_permutation(perm));
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(on_ellipse[i] == on_ellipse[perm[i]]);
  }
}

TEST_CASE("monodromy partitions") {
  auto sizes = [](const char* name, std::uint64_t seed) {
    const WitnessSet w = witness_set(load_system(fixture(name)), {1}, seed);
    auto s = monodromy_partition(w, 30, seed).block_sizes();
    std::sort(s.begin(), s.end());
    return s;
  };
  for (std::uint64_t seed : {1, 2, 3}) {
    CHECK(sizes("folium.sys", seed) == std::vector<int>{3});
    CHECK(sizes("ellipse_folium.sys", seed) == std::vector<int>{2, 3});
    CHECK(sizes("two_lines.sys", seed) == std::vector<int>{1, 1});
  }
}

TEST_CASE("partitions only coarsen as the budget grows") {
  const WitnessSet w = witness_set(load_system(fixture("ellipse_folium.sys")), {1}, 9);
  std::vector<std::vector<int>> previous;
  for (int budget = 1; budget <= 8; ++budget) {
    const Partition p = monodromy_partition(w, budget, 9, {}, 1, 1000);
    CHECK(p.loops_run == budget);
    for (const auto& block : previous) {
      const bool contained = std::any_of(p.blocks.begin(), p.blocks.end(), [&](const std::vector<int>& b) {
        return std::includes(b.begin(), b.end(), block.begin(), block.end());
      });
      CHECK(contained);
    }
    previous = p.blocks;
  }
}
