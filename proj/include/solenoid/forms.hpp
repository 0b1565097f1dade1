#ifndef SOLENOID_FORMS_HPP
#define SOLENOID_FORMS_HPP

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sol {

/// Strictly increasing multi-index I subset {0..n-1}, stored as a bit mask.
using IndexSet = std::uint32_t;

int index_size(IndexSet s);
std::vector<int> index_list(IndexSet s);
IndexSet index_from_list(const std::vector<int>& idx);
/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<IndexSet> lex_subsets(int n, int k);
/// Sign of the shuffle putting the concatenation (I, J) in increasing order;
/// 0 when I and J overlap.
int shuffle_sign(IndexSet i, IndexSet j);
std::string index_name(IndexSet s);

/// Trigonometric polynomial on T^n:
///   sum over (k, p) of (2 pi)^p (a cos(2 pi k.x) + b sin(2 pi k.x)).
/// The power of 2 pi is tracked separately so differentiation multiplies
/// coefficients by integers only.
class TrigPoly {
public:
  struct Key {
    std::vector<int> freq;
    int twopi_power = 0;
    auto operator<=>(const Key&) const = default;
  };
  struct Coeff {
    double cos = 0.0;
    double sin = 0.0;
  };

  TrigPoly() = default;
  explicit TrigPoly(int n) : n_(n) {}
  static TrigPoly constant(int n, double c);

  int dim() const { return n_; }
  const std::map<Key, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(std::vector<int> freq, double cos_coeff, double sin_coeff, int twopi_power = 0);

  double value(const Eigen::VectorXd& x) const;
  TrigPoly derivative(int axis) const;
  /// True when only the zero frequency occurs.
  bool is_constant() const;

  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly scaled(double s) const;
  bool operator==(const TrigPoly& o) const;

private:
  void prune();

  int n_ = 0;
  std::map<Key, Coeff> terms_;
};

/// Compactly supported closed factor prod_{j in Q} b_rho(x_j - c_j), used for
/// Thom forms.  Every term of a form carrying this factor contains dx_Q.
struct BumpFactor {
  IndexSet fixed = 0;
  std::vector<double> centers;
  double width = 0.25;
  bool periodic = true;

  double value(const Eigen::VectorXd& x) const;
  bool operator==(const BumpFactor&) const = default;
};

/// Normalized bump on [-1,1]: exp(-1/(1-s^2)) / Z, unit integral.
double unit_bump(double s);
double unit_bump_normalizer();

class DifferentialForm {
public:
  DifferentialForm() = default;
  DifferentialForm(int n, int k);

  static DifferentialForm constant(int n, IndexSet idx, double value);
  static DifferentialForm monomial(int n, IndexSet idx, TrigPoly coeff);
  static DifferentialForm function(TrigPoly f);

  int ambient_dim() const { return n_; }
  int degree() const { return k_; }
  const std::map<IndexSet, TrigPoly>& terms() const { return terms_; }
  const std::optional<BumpFactor>& bump() const { return bump_; }
  /// False once a bump factor is attached: such forms are evaluated
  /// pointwise and are not trigonometric polynomials.
  bool exact() const { return !bump_.has_value(); }
  bool is_zero() const { return terms_.empty(); }

  void add(IndexSet idx, const TrigPoly& c);
  DifferentialForm with_bump(BumpFactor b) const;

  /// sum_I c_I(p) det(frame rows I); frame is n x k.
  double evaluate(const Eigen::VectorXd& p, const Eigen::MatrixXd& frame) const;

  DifferentialForm& operator+=(const DifferentialForm& o);
  DifferentialForm operator+(const DifferentialForm& o) const;
  DifferentialForm operator-(const DifferentialForm& o) const;
  DifferentialForm scaled(double s) const;
  bool operator==(const DifferentialForm& o) const;

private:
  int n_ = 0;
  int k_ = 0;
  std::map<IndexSet, TrigPoly> terms_;
  std::optional<BumpFactor> bump_;
};

DifferentialForm exterior_derivative(const DifferentialForm& w);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

/// Constant forms dx_I, |I| = k, in lexicographic order of I.
std::vector<DifferentialForm> harmonic_basis(int n, int k);

/// Coordinate subtorus {x_j = c_j : j in fixed}.
struct Subtorus {
  int n = 2;
  std::vector<int> fixed;
  std::vector<double> values;

  IndexSet mask() const { return index_from_list(fixed); }
  int codim() const { return static_cast<int>(fixed.size()); }
  void check() const;
};

struct ThomForm {
  Subtorus submanifold;
  double width = 0.125;
  DifferentialForm form;
};

/// tau_rho = prod b_rho(x_j - c_j) dx_Q; requires 0 < rho < 1/4.
ThomForm thom_form(const Subtorus& n, double width);

} // namespace sol

#endif
