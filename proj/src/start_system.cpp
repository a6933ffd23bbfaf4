#include <cmath>

#include "nagtrace/tracker.hpp"

namespace nagtrace {

namespace {

struct AffineForm {
  std::vector<Complex> coeffs;
  Complex constant;
};

StartSystem total_degree(const PolySystem& target) {
  const int n = target.num_variables();
  StartSystem out;
  std::vector<Polynomial> polys;
  std::vector<int> degs;
  for (int j = 0; j < n; ++j) {
    const int d = target.degree_vector(j)[0];
    if (d == 0) throw Error("start system: polynomial " + target.names()[j] + " is constant");
    degs.push_back(d);
    polys.push_back(Polynomial({Term{1.0, {{j, d}}}, Term{-1.0, {}}}));
  }
  out.system = target.with_polynomials(std::move(polys));
  out.bezout = 1;
  for (int d : degs) out.bezout *= d;
  std::vector<int> idx(n, 0);
  while (true) {
    Point p(n);
    for (int j = 0; j < n; ++j) p[j] = std::polar(1.0, 2.0 * M_PI * idx[j] / degs[j]);
    out.solutions.push_back(p);
    int k = n - 1;
    while (k >= 0 && ++idx[k] == degs[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

StartSystem linear_product(const PolySystem& target, std::mt19937_64& rng) {
  const int ng = target.num_groups();
  const int neq = target.num_polynomials();
  // factors[j][g] holds the d_{j,g} affine forms of equation j in group g
  std::vector<std::vector<std::vector<AffineForm>>> factors(neq, std::vector<std::vector<AffineForm>>(ng));
  std::vector<Polynomial> polys;
  std::vector<std::vector<int>> degrees;
  for (int j = 0; j < neq; ++j) {
    const auto deg = target.degree_vector(j);
    degrees.push_back(deg);
    Polynomial prod = Polynomial::constant(1.0);
    for (int g = 0; g < ng; ++g) {
      for (int k = 0; k < deg[g]; ++k) {
        AffineForm f;
        for (int v = 0; v < target.group_size(g); ++v) f.coeffs.push_back(random_gaussian(rng));
        f.constant = random_gaussian(rng);
        prod = prod * Polynomial::linear(target.group_offset(g), f.coeffs, f.constant);
        factors[j][g].push_back(std::move(f));
      }
    }
    polys.push_back(std::move(prod));
  }
  StartSystem out;
  out.system = target.with_polynomials(std::move(polys));
  std::vector<int> sizes;
  for (int g = 0; g < ng; ++g) sizes.push_back(target.group_size(g));
  out.bezout = bezout_number(degrees, sizes);

  // Enumerate (group, factor) choices per equation with each group receiving exactly its size.
  std::vector<int> cap = sizes;
  std::vector<std::pair<int, int>> choice(neq);
  auto solve_leaf = [&]() {
    Point p(target.num_variables());
    for (int g = 0; g < ng; ++g) {
      const int n = target.group_size(g);
      CMatrix a(n, n);
      CVector b(n);
      int row = 0;
      for (int j = 0; j < neq; ++j) {
        if (choice[j].first != g) continue;
        const auto& f = factors[j][g][choice[j].second];
        for (int v = 0; v < n; ++v) a(row, v) = f.coeffs[v];
        b[row] = -f.constant;
        ++row;
      }
      p.segment(target.group_offset(g), n) = a.partialPivLu().solve(b);
    }
    out.solutions.push_back(std::move(p));
  };
  auto rec = [&](auto&& self, int j) -> void {
    if (j == neq) {
      solve_leaf();
      return;
    }
    for (int g = 0; g < ng; ++g) {
      if (cap[g] == 0) continue;
      --cap[g];
      for (int k = 0; k < degrees[j][g]; ++k) {
        choice[j] = {g, k};
        self(self, j + 1);
      }
      ++cap[g];
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

StartSystem make_start_system(const PolySystem& target, std::mt19937_64& rng) {
  if (target.num_polynomials() != target.num_variables())
    throw DimensionMismatch("start system needs a square target");
  if (target.num_groups() == 1) return total_degree(target);
  return linear_product(target, rng);
}

}  // namespace nagtrace
