#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nagtrace {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A point in the system's coordinates, ordered as the variables are declared.
using Point = CVector;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

struct VarGroup {
  std::string name;
  std::vector<std::string> variables;
  /// Homogeneous coordinates on P^n (n+1 variables) versus an affine chart C^n.
  bool homogeneous = false;

  int projective_dim() const {
    return homogeneous ? static_cast<int>(variables.size()) - 1 : static_cast<int>(variables.size());
  }
};

struct Term {
  Complex coefficient;
  /// (variable index, power) pairs, sorted by index, powers > 0.
  std::vector<std::pair<int, int>> exponents;

  int degree() const;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Term> terms);

  static Polynomial constant(Complex c);
  static Polynomial variable(int index, Complex c = 1.0);
  /// sum_k coeffs[k] * z[offset + k] + constant
  static Polynomial linear(int offset, const std::vector<Complex>& coeffs, Complex constant = 0.0);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Complex evaluate(const CVector& z) const;
  /// Accumulates the gradient into row `row` of `jac` and returns the value.
  Complex evaluate_with_gradient(const CVector& z, CMatrix& jac, int row) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(Complex c) const;
  Polynomial pow(int e) const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

class PolySystem {
 public:
  PolySystem() = default;
  PolySystem(std::vector<VarGroup> groups, std::vector<Polynomial> polynomials,
             std::vector<std::string> names = {}, std::optional<int> declared_dim = std::nullopt);

  const std::vector<VarGroup>& groups() const { return groups_; }
  const std::vector<Polynomial>& polynomials() const { return polys_; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> declared_dim() const { return declared_dim_; }

  int num_groups() const { return static_cast<int>(groups_.size()); }
  int num_variables() const { return num_vars_; }
  int num_polynomials() const { return static_cast<int>(polys_.size()); }
  int group_offset(int g) const { return offsets_[g]; }
  int group_size(int g) const { return static_cast<int>(groups_[g].variables.size()); }
  int group_of(int var) const;
  int num_homogeneous_groups() const;
  std::vector<std::string> variable_names() const;

  /// Total degree of polynomial `p` in each group's variables.
  std::vector<int> degree_vector(int p) const;
  std::vector<int> degree_vector(const Polynomial& p) const;
  bool is_homogeneous_in(const Polynomial& p, int group) const;

  CVector evaluate(const Point& z) const;
  CMatrix jacobian(const Point& z) const;
  void evaluate_with_jacobian(const Point& z, CVector& values, CMatrix& jac) const;

  /// Same groups, polynomials replaced.
  PolySystem with_polynomials(std::vector<Polynomial> polys, std::vector<std::string> names = {}) const;
  /// Same groups, `extra` appended after the existing polynomials.
  PolySystem append(const std::vector<Polynomial>& extra, const std::string& prefix = "s") const;
  PolySystem with_declared_dim(std::optional<int> m) const;

  /// Source text accepted by parse_system; coefficients printed with round-trip precision.
  std::string render() const;

 private:
  void check_point(const Point& z) const;

  std::vector<VarGroup> groups_;
  std::vector<Polynomial> polys_;
  std::vector<std::string> names_;
  std::optional<int> declared_dim_;
  std::vector<int> offsets_;
  std::vector<int> var_group_;
  int num_vars_ = 0;
};

/// Parses the system source grammar. `variable_group` groups are homogeneous when every
/// polynomial is homogeneous in them; `hom_variable_group` / `affine_variable_group` force it.
PolySystem parse_system(const std::string& text);
PolySystem load_system(const std::string& path);

/// Homogenizes each affine group. `new_groups[g]` lists the homogenizing variable first,
/// followed by the (possibly renamed) original variables; homogeneous groups pass through.
PolySystem multihomogenize(const PolySystem& system, const std::vector<VarGroup>& new_groups);
/// Same, naming the homogenizing variable of group g `<name>_h`.
PolySystem multihomogenize(const PolySystem& system);

/// Embeds an affine point into homogeneous coordinates with every homogenizing variable 1.
Point embed_chart_one(const PolySystem& affine, const Point& p);

/// Rows of a randomized square-up: kept polynomial `row` plus random multiples of `extras`.
struct SquareUpRow {
  int row;
  std::vector<int> extras;
  std::vector<int> degree;
};

/// Chooses `count` rows of `system` to keep and assigns the remaining polynomials to rows whose
/// degree dominates theirs (falling back to all rows).
std::vector<SquareUpRow> square_up_plan(const PolySystem& system, int count);

/// Multihomogeneous Bezout number of a square system given per-equation degree vectors
/// and the number of unknowns in each group.
std::int64_t bezout_number(const std::vector<std::vector<int>>& degrees, const std::vector<int>& group_sizes);

/// Bezout bound on |V ∩ (M1 x M2)|: polynomials squared up to the codimension, plus one chart
/// per homogeneous group and dims[g] slice forms per group.
std::int64_t multidegree_bound(const PolySystem& system, const std::vector<int>& dims);

}  // namespace nagtrace
