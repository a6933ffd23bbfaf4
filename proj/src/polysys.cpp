#include "nagtrace/polysys.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace nagtrace {

namespace {

Complex ipow(Complex base, int e) {
  Complex r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<int, int>> merge_exponents(const std::vector<std::pair<int, int>>& a,
                                                 const std::vector<std::pair<int, int>>& b) {
  std::vector<std::pair<int, int>> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

int Term::degree() const {
  int d = 0;
  for (const auto& [v, e] : exponents) d += e;
  return d;
}

Polynomial::Polynomial(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

Polynomial Polynomial::constant(Complex c) { return Polynomial({Term{c, {}}}); }

Polynomial Polynomial::variable(int index, Complex c) { return Polynomial({Term{c, {{index, 1}}}}); }

Polynomial Polynomial::linear(int offset, const std::vector<Complex>& coeffs, Complex constant) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k) terms.push_back(Term{coeffs[k], {{offset + static_cast<int>(k), 1}}});
  terms.push_back(Term{constant, {}});
  return Polynomial(std::move(terms));
}

void Polynomial::normalize() {
  std::map<std::vector<std::pair<int, int>>, std::size_t> index;
  std::vector<Term> merged;
  for (auto& t : terms_) {
    std::sort(t.exponents.begin(), t.exponents.end());
    auto [it, inserted] = index.emplace(t.exponents, merged.size());
    if (inserted) {
      merged.push_back(t);
    } else {
      merged[it->second].coefficient += t.coefficient;
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return t.coefficient == Complex(0.0); }),
               merged.end());
  terms_ = std::move(merged);
}

Complex Polynomial::evaluate(const CVector& z) const {
  Complex sum = 0.0;
  for (const auto& t : terms_) {
    Complex v = t.coefficient;
    for (const auto& [var, e] : t.exponents) v *= ipow(z[var], e);
    sum += v;
  }
  return sum;
}

Complex Polynomial::evaluate_with_gradient(const CVector& z, CMatrix& jac, int row) const {
  Complex sum = 0.0;
  for (const auto& t : terms_) {
    Complex v = t.coefficient;
    for (const auto& [var, e] : t.exponents) v *= ipow(z[var], e);
    sum += v;
    for (std::size_t k = 0; k < t.exponents.size(); ++k) {
      Complex d = t.coefficient * static_cast<double>(t.exponents[k].second);
      for (std::size_t l = 0; l < t.exponents.size(); ++l) {
        const auto& [var, e] = t.exponents[l];
        d *= ipow(z[var], l == k ? e - 1 : e);
      }
      jac(row, t.exponents[k].first) += d;
    }
  }
  return sum;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<Term> terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return Polynomial(std::move(terms));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * Complex(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : other.terms_)
      terms.push_back(Term{a.coefficient * b.coefficient, merge_exponents(a.exponents, b.exponents)});
  return Polynomial(std::move(terms));
}

Polynomial Polynomial::operator*(Complex c) const {
  std::vector<Term> terms = terms_;
  for (auto& t : terms) t.coefficient *= c;
  return Polynomial(std::move(terms));
}

Polynomial Polynomial::pow(int e) const {
  Polynomial r = constant(1.0);
  for (int k = 0; k < e; ++k) r = r * *this;
  return r;
}

PolySystem::PolySystem(std::vector<VarGroup> groups, std::vector<Polynomial> polynomials,
                       std::vector<std::string> names, std::optional<int> declared_dim)
    : groups_(std::move(groups)), polys_(std::move(polynomials)), names_(std::move(names)), declared_dim_(declared_dim) {
  if (groups_.empty()) throw Error("polynomial system has no variable groups");
  std::set<std::string> seen;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    offsets_.push_back(num_vars_);
    if (groups_[g].variables.empty()) throw Error("variable group '" + groups_[g].name + "' is empty");
    for (const auto& v : groups_[g].variables) {
      if (!seen.insert(v).second) throw Error("duplicate variable '" + v + "'");
      var_group_.push_back(static_cast<int>(g));
    }
    num_vars_ += static_cast<int>(groups_[g].variables.size());
    if (groups_[g].projective_dim() < 1) throw Error("variable group '" + groups_[g].name + "' has dimension < 1");
  }
  for (const auto& p : polys_)
    for (const auto& t : p.terms())
      for (const auto& [v, e] : t.exponents)
        if (v < 0 || v >= num_vars_) throw Error("term references an undeclared variable");
  if (names_.size() < polys_.size()) {
    for (std::size_t k = names_.size(); k < polys_.size(); ++k) names_.push_back("f" + std::to_string(k));
  }
  names_.resize(polys_.size());
}

int PolySystem::group_of(int var) const { return var_group_.at(var); }

int PolySystem::num_homogeneous_groups() const {
  return static_cast<int>(std::count_if(groups_.begin(), groups_.end(), [](const VarGroup& g) { return g.homogeneous; }));
}

std::vector<std::string> PolySystem::variable_names() const {
  std::vector<std::string> out;
  for (const auto& g : groups_) out.insert(out.end(), g.variables.begin(), g.variables.end());
  return out;
}

std::vector<int> PolySystem::degree_vector(int p) const { return degree_vector(polys_.at(p)); }

std::vector<int> PolySystem::degree_vector(const Polynomial& p) const {
  std::vector<int> deg(groups_.size(), 0);
  for (const auto& t : p.terms()) {
    std::vector<int> d(groups_.size(), 0);
    for (const auto& [v, e] : t.exponents) d[var_group_[v]] += e;
    for (std::size_t g = 0; g < d.size(); ++g) deg[g] = std::max(deg[g], d[g]);
  }
  return deg;
}

bool PolySystem::is_homogeneous_in(const Polynomial& p, int group) const {
  std::optional<int> deg;
  for (const auto& t : p.terms()) {
    int d = 0;
    for (const auto& [v, e] : t.exponents)
      if (var_group_[v] == group) d += e;
    if (deg && *deg != d) return false;
    deg = d;
  }
  return true;
}

void PolySystem::check_point(const Point& z) const {
  if (z.size() != num_vars_)
    throw DimensionMismatch("point has " + std::to_string(z.size()) + " coordinates, system has " +
                            std::to_string(num_vars_) + " variables");
}

CVector PolySystem::evaluate(const Point& z) const {
  check_point(z);
  CVector out(polys_.size());
  for (std::size_t i = 0; i < polys_.size(); ++i) out[i] = polys_[i].evaluate(z);
  return out;
}

CMatrix PolySystem::jacobian(const Point& z) const {
  CVector values;
  CMatrix jac;
  evaluate_with_jacobian(z, values, jac);
  return jac;
}

void PolySystem::evaluate_with_jacobian(const Point& z, CVector& values, CMatrix& jac) const {
  check_point(z);
  values.resize(polys_.size());
  jac = CMatrix::Zero(polys_.size(), num_vars_);
  for (std::size_t i = 0; i < polys_.size(); ++i) values[i] = polys_[i].evaluate_with_gradient(z, jac, static_cast<int>(i));
}

PolySystem PolySystem::with_polynomials(std::vector<Polynomial> polys, std::vector<std::string> names) const {
  return PolySystem(groups_, std::move(polys), std::move(names), declared_dim_);
}

PolySystem PolySystem::append(const std::vector<Polynomial>& extra, const std::string& prefix) const {
  auto polys = polys_;
  auto names = names_;
  for (std::size_t k = 0; k < extra.size(); ++k) {
    polys.push_back(extra[k]);
    names.push_back(prefix + std::to_string(polys.size() - 1));
  }
  return PolySystem(groups_, std::move(polys), std::move(names), declared_dim_);
}

PolySystem PolySystem::with_declared_dim(std::optional<int> m) const {
  return PolySystem(groups_, polys_, names_, m);
}

std::string PolySystem::render() const {
  std::ostringstream out;
  for (const auto& g : groups_) {
    out << (g.homogeneous ? "hom_variable_group" : "affine_variable_group");
    for (const auto& v : g.variables) out << ' ' << v;
    out << ";\n";
  }
  if (declared_dim_) out << "dimension " << *declared_dim_ << ";\n";
  const auto vars = variable_names();
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    out << names_[i] << " =";
    if (polys_[i].is_zero()) out << " 0";
    bool first = true;
    for (const auto& t : polys_[i].terms()) {
      out << (first ? " " : " + ") << '(' << format_double(t.coefficient.real()) << " + "
          << format_double(t.coefficient.imag()) << "*i)";
      first = false;
      for (const auto& [v, e] : t.exponents) {
        out << '*' << vars[v];
        if (e != 1) out << '^' << e;
      }
    }
    out << ";\n";
  }
  return out.str();
}

PolySystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

PolySystem multihomogenize(const PolySystem& system, const std::vector<VarGroup>& new_groups) {
  if (new_groups.size() != system.groups().size()) throw Error("multihomogenize: group count mismatch");
  // old variable index -> new variable index; homogenizing variable index per group
  std::vector<int> remap(system.num_variables());
  std::vector<int> hom_var(system.num_groups(), -1);
  std::vector<VarGroup> groups;
  int next = 0;
  for (int g = 0; g < system.num_groups(); ++g) {
    const auto& old = system.groups()[g];
    VarGroup ng = new_groups[g];
    ng.homogeneous = true;
    if (old.homogeneous) {
      if (ng.variables.size() != old.variables.size()) throw Error("multihomogenize: homogeneous group resized");
      for (std::size_t k = 0; k < old.variables.size(); ++k) remap[system.group_offset(g) + k] = next + k;
    } else {
      if (ng.variables.size() != old.variables.size() + 1)
        throw Error("multihomogenize: group '" + old.name + "' needs exactly one homogenizing variable");
      hom_var[g] = next;
      for (std::size_t k = 0; k < old.variables.size(); ++k) remap[system.group_offset(g) + k] = next + 1 + k;
    }
    next += static_cast<int>(ng.variables.size());
    groups.push_back(std::move(ng));
  }
  std::set<std::string> seen;
  for (const auto& g : groups)
    for (const auto& v : g.variables)
      if (!seen.insert(v).second) throw Error("multihomogenize: variable name collision on '" + v + "'");

  std::vector<Polynomial> polys;
  for (int p = 0; p < system.num_polynomials(); ++p) {
    const auto deg = system.degree_vector(p);
    std::vector<Term> terms;
    for (const auto& t : system.polynomials()[p].terms()) {
      std::vector<int> d(system.num_groups(), 0);
      Term nt{t.coefficient, {}};
      for (const auto& [v, e] : t.exponents) {
        d[system.group_of(v)] += e;
        nt.exponents.emplace_back(remap[v], e);
      }
      for (int g = 0; g < system.num_groups(); ++g)
        if (hom_var[g] >= 0 && deg[g] > d[g]) nt.exponents.emplace_back(hom_var[g], deg[g] - d[g]);
      terms.push_back(std::move(nt));
    }
    polys.emplace_back(std::move(terms));
  }
  return PolySystem(std::move(groups), std::move(polys), system.names(), system.declared_dim());
}

PolySystem multihomogenize(const PolySystem& system) {
  std::vector<VarGroup> groups;
  for (const auto& g : system.groups()) {
    VarGroup ng = g;
    if (!g.homogeneous) ng.variables.insert(ng.variables.begin(), g.name + "_h");
    groups.push_back(std::move(ng));
  }
  return multihomogenize(system, groups);
}

Point embed_chart_one(const PolySystem& affine, const Point& p) {
  if (p.size() != affine.num_variables()) throw DimensionMismatch("embed_chart_one: wrong point size");
  std::vector<Complex> out;
  for (int g = 0; g < affine.num_groups(); ++g) {
    if (!affine.groups()[g].homogeneous) out.push_back(1.0);
    for (int k = 0; k < affine.group_size(g); ++k) out.push_back(p[affine.group_offset(g) + k]);
  }
  return Eigen::Map<CVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

std::vector<SquareUpRow> square_up_plan(const PolySystem& system, int count) {
  const int n = system.num_polynomials();
  if (count > n) throw Error("system is underdetermined for the requested dimension");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> deg(n);
  for (int p = 0; p < n; ++p) deg[p] = system.degree_vector(p);
  auto total = [&](int p) { return std::accumulate(deg[p].begin(), deg[p].end(), 0); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (total(a) != total(b)) return total(a) > total(b);
    return deg[a] > deg[b];
  });
  std::vector<SquareUpRow> rows;
  for (int k = 0; k < count; ++k) rows.push_back({order[k], {}, deg[order[k]]});
  auto dominates = [](const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t g = 0; g < a.size(); ++g)
      if (a[g] < b[g]) return false;
    return true;
  };
  for (int k = count; k < n; ++k) {
    const int extra = order[k];
    bool placed = false;
    for (auto& r : rows) {
      if (dominates(r.degree, deg[extra])) {
        r.extras.push_back(extra);
        placed = true;
      }
    }
    if (!placed) {
      for (auto& r : rows) {
        r.extras.push_back(extra);
        for (std::size_t g = 0; g < r.degree.size(); ++g) r.degree[g] = std::max(r.degree[g], deg[extra][g]);
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SquareUpRow& a, const SquareUpRow& b) { return a.row < b.row; });
  return rows;
}

std::int64_t bezout_number(const std::vector<std::vector<int>>& degrees, const std::vector<int>& group_sizes) {
  const std::size_t ngroups = group_sizes.size();
  // memoized over (equation index, remaining capacity per group)
  std::map<std::pair<std::size_t, std::vector<int>>, std::int64_t> memo;
  auto rec = [&](auto&& self, std::size_t j, std::vector<int>& cap) -> std::int64_t {
    if (j == degrees.size()) {
      for (int c : cap)
        if (c != 0) return 0;
      return 1;
    }
    auto key = std::make_pair(j, cap);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::int64_t total = 0;
    for (std::size_t g = 0; g < ngroups; ++g) {
      if (cap[g] == 0 || degrees[j][g] == 0) continue;
      --cap[g];
      total += degrees[j][g] * self(self, j + 1, cap);
      ++cap[g];
    }
    memo.emplace(std::move(key), total);
    return total;
  };
  std::vector<int> cap = group_sizes;
  int eqs = static_cast<int>(degrees.size());
  if (std::accumulate(cap.begin(), cap.end(), 0) != eqs) return 0;
  return rec(rec, 0, cap);
}

std::int64_t multidegree_bound(const PolySystem& system, const std::vector<int>& dims) {
  if (static_cast<int>(dims.size()) != system.num_groups()) throw DimensionMismatch("dims must have one entry per group");
  int m = 0;
  for (int g = 0; g < system.num_groups(); ++g) {
    if (dims[g] < 0 || dims[g] > system.groups()[g].projective_dim())
      throw DimensionMismatch("slice dimension exceeds the projective dimension of group " + std::to_string(g));
    m += dims[g];
  }
  const int codim = system.num_variables() - system.num_homogeneous_groups() - m;
  std::vector<std::vector<int>> degrees;
  for (const auto& r : square_up_plan(system, codim)) degrees.push_back(r.degree);
  for (int g = 0; g < system.num_groups(); ++g) {
    std::vector<int> unit(system.num_groups(), 0);
    unit[g] = 1;
    const int linear = dims[g] + (system.groups()[g].homogeneous ? 1 : 0);
    for (int k = 0; k < linear; ++k) degrees.push_back(unit);
  }
  std::vector<int> sizes;
  for (int g = 0; g < system.num_groups(); ++g) sizes.push_back(system.group_size(g));
  return bezout_number(degrees, sizes);
}

}  // namespace nagtrace
