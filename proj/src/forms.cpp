#include "solenoid/forms.hpp"

#include "solenoid/core.hpp"
#include "solenoid/quadrature.hpp"

#include <bit>
#include <cmath>

namespace sol {

int index_size(IndexSet s)
{
  return std::popcount(s);
}

std::vector<int> index_list(IndexSet s)
{
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (s & (IndexSet{1} << i))
      out.push_back(i);
  return out;
}

IndexSet index_from_list(const std::vector<int>& idx)
{
  IndexSet s = 0;
  for (int i : idx) {
    if (i < 0 || i >= 32)
      throw InputError("coordinate index out of range");
    s |= IndexSet{1} << i;
  }
  return s;
}

std::vector<IndexSet> lex_subsets(int n, int k)
{
  std::vector<IndexSet> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(index_from_list(cur));
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  if (k >= 0 && k <= n)
    rec(rec, 0);
  return out;
}

int shuffle_sign(IndexSet i, IndexSet j)
{
  if (i & j)
    return 0;
  int inversions = 0;
  for (int a : index_list(i))
    for (int b : index_list(j))
      if (a > b)
        ++inversions;
  return inversions % 2 ? -1 : 1;
}

std::string index_name(IndexSet s)
{
  if (s == 0)
    return "1";
  std::string out;
  for (int i : index_list(s)) {
    if (!out.empty())
      out += "^";
    out += "dx" + std::to_string(i + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

TrigPoly TrigPoly::constant(int n, double c)
{
  TrigPoly t(n);
  t.add_term(std::vector<int>(static_cast<std::size_t>(n), 0), c, 0.0);
  return t;
}

void TrigPoly::add_term(std::vector<int> freq, double cos_coeff, double sin_coeff, int twopi_power)
{
  if (static_cast<int>(freq.size()) != n_)
    throw InputError("frequency vector has wrong dimension");
  auto first = std::find_if(freq.begin(), freq.end(), [](int v) { return v != 0; });
  if (first == freq.end()) {
    sin_coeff = 0.0;
  } else if (*first < 0) {
    for (int& v : freq)
      v = -v;
    sin_coeff = -sin_coeff;
  }
  if (cos_coeff == 0.0 && sin_coeff == 0.0)
    return;
  Coeff& c = terms_[Key{std::move(freq), twopi_power}];
  c.cos += cos_coeff;
  c.sin += sin_coeff;
  prune();
}

void TrigPoly::prune()
{
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.cos == 0.0 && it->second.sin == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

double TrigPoly::value(const Eigen::VectorXd& x) const
{
  double s = 0.0;
  for (const auto& [key, c] : terms_) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i)
      phase += key.freq[static_cast<std::size_t>(i)] * x[i];
    phase *= two_pi;
    double scale = 1.0;
    for (int p = 0; p < key.twopi_power; ++p)
      scale *= two_pi;
    s += scale * (c.cos * std::cos(phase) + c.sin * std::sin(phase));
  }
  return s;
}

TrigPoly TrigPoly::derivative(int axis) const
{
  TrigPoly out(n_);
  for (const auto& [key, c] : terms_) {
    const int kj = key.freq[static_cast<std::size_t>(axis)];
    if (kj == 0)
      continue;
    out.add_term(key.freq, kj * c.sin, -kj * c.cos, key.twopi_power + 1);
  }
  return out;
}

bool TrigPoly::is_constant() const
{
  for (const auto& [key, c] : terms_)
    for (int v : key.freq)
      if (v != 0)
        return false;
  return true;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o)
{
  if (n_ == 0)
    n_ = o.n_;
  for (const auto& [key, c] : o.terms_)
    add_term(key.freq, c.cos, c.sin, key.twopi_power);
  return *this;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const
{
  TrigPoly out(n_);
  for (const auto& [k1, c1] : terms_) {
    for (const auto& [k2, c2] : o.terms_) {
      std::vector<int> plus(k1.freq), minus(k1.freq);
      for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] += k2.freq[i];
        minus[i] -= k2.freq[i];
      }
      const int p = k1.twopi_power + k2.twopi_power;
      out.add_term(plus, 0.5 * (c1.cos * c2.cos - c1.sin * c2.sin), 0.5 * (c1.cos * c2.sin + c1.sin * c2.cos),
                   p);
      out.add_term(minus, 0.5 * (c1.cos * c2.cos + c1.sin * c2.sin), 0.5 * (c1.sin * c2.cos - c1.cos * c2.sin),
                   p);
    }
  }
  return out;
}

TrigPoly TrigPoly::scaled(double s) const
{
  TrigPoly out(n_);
  for (const auto& [key, c] : terms_)
    out.add_term(key.freq, s * c.cos, s * c.sin, key.twopi_power);
  return out;
}

bool TrigPoly::operator==(const TrigPoly& o) const
{
  if (terms_.size() != o.terms_.size())
    return false;
  for (auto a = terms_.begin(), b = o.terms_.begin(); a != terms_.end(); ++a, ++b)
    if (a->first != b->first || a->second.cos != b->second.cos || a->second.sin != b->second.sin)
      return false;
  return true;
}

// ---------------------------------------------------------------------------

double unit_bump_normalizer()
{
  static const double z = [] {
    const QuadratureRule r = composite_gauss_legendre(20, 64, -1.0, 1.0);
    return integrate(r, [](double s) { return std::exp(-1.0 / (1.0 - s * s)); });
  }();
  return z;
}

double unit_bump(double s)
{
  if (!(std::abs(s) < 1.0))
    return 0.0;
  return std::exp(-1.0 / (1.0 - s * s)) / unit_bump_normalizer();
}

double BumpFactor::value(const Eigen::VectorXd& x) const
{
  double v = 1.0;
  for (int j : index_list(fixed)) {
    double s = x[j] - centers[static_cast<std::size_t>(j)];
    if (periodic)
      s = wrap_centered(s);
    v *= unit_bump(s / width) / width;
    if (v == 0.0)
      break;
  }
  return v;
}

// ---------------------------------------------------------------------------

DifferentialForm::DifferentialForm(int n, int k) : n_(n), k_(k)
{
  if (n < 0 || n > 16 || k < 0 || k > n)
    throw DegreeError("form degree " + std::to_string(k) + " invalid on T^" + std::to_string(n));
}

DifferentialForm DifferentialForm::constant(int n, IndexSet idx, double value)
{
  return monomial(n, idx, TrigPoly::constant(n, value));
}

DifferentialForm DifferentialForm::monomial(int n, IndexSet idx, TrigPoly coeff)
{
  DifferentialForm w(n, index_size(idx));
  w.add(idx, coeff);
  return w;
}

DifferentialForm DifferentialForm::function(TrigPoly f)
{
  const int n = f.dim();
  return monomial(n, 0, std::move(f));
}

void DifferentialForm::add(IndexSet idx, const TrigPoly& c)
{
  if (index_size(idx) != k_ || (n_ < 32 && (idx >> n_) != 0))
    throw DegreeError("multi-index " + index_name(idx) + " does not fit a " + std::to_string(k_) + "-form on T^" +
                      std::to_string(n_));
  if (bump_ && (idx & bump_->fixed) != bump_->fixed)
    throw InputError("terms of a Thom-type form must contain the normal directions");
  TrigPoly& slot = terms_.try_emplace(idx, TrigPoly(n_)).first->second;
  slot += c;
  if (slot.is_zero())
    terms_.erase(idx);
}

DifferentialForm DifferentialForm::with_bump(BumpFactor b) const
{
  for (const auto& [idx, c] : terms_)
    if ((idx & b.fixed) != b.fixed)
      throw InputError("terms of a Thom-type form must contain the normal directions");
  if (bump_)
    throw InputError("form already carries a bump factor");
  DifferentialForm out = *this;
  out.bump_ = std::move(b);
  return out;
}

double DifferentialForm::evaluate(const Eigen::VectorXd& p, const Eigen::MatrixXd& frame) const
{
  if (frame.cols() != k_ || (k_ > 0 && frame.rows() != n_))
    throw DegreeError("frame has " + std::to_string(frame.cols()) + " vectors for a " + std::to_string(k_) +
                      "-form");
  double factor = 1.0;
  if (bump_) {
    factor = bump_->value(p);
    if (factor == 0.0)
      return 0.0;
  }
  double s = 0.0;
  for (const auto& [idx, c] : terms_) {
    double det = 1.0;
    if (k_ > 0) {
      const std::vector<int> rows = index_list(idx);
      Eigen::MatrixXd sub(k_, k_);
      for (int r = 0; r < k_; ++r)
        sub.row(r) = frame.row(rows[static_cast<std::size_t>(r)]);
      det = k_ == 1 ? sub(0, 0) : (k_ == 2 ? sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0) : sub.determinant());
    }
    s += c.value(p) * det;
  }
  return factor * s;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o)
{
  if (o.n_ != n_ || o.k_ != k_)
    throw DegreeError("adding forms of different type");
  if (o.bump_ != bump_)
    throw InputError("adding forms with different bump factors");
  for (const auto& [idx, c] : o.terms_)
    add(idx, c);
  return *this;
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm& o) const
{
  DifferentialForm out = *this;
  out += o;
  return out;
}

DifferentialForm DifferentialForm::operator-(const DifferentialForm& o) const
{
  return *this + o.scaled(-1.0);
}

DifferentialForm DifferentialForm::scaled(double s) const
{
  DifferentialForm out(n_, k_);
  out.bump_ = bump_;
  for (const auto& [idx, c] : terms_)
    out.add(idx, c.scaled(s));
  return out;
}

bool DifferentialForm::operator==(const DifferentialForm& o) const
{
  return n_ == o.n_ && k_ == o.k_ && bump_ == o.bump_ && terms_ == o.terms_;
}

DifferentialForm exterior_derivative(const DifferentialForm& w)
{
  const int n = w.ambient_dim(), k = w.degree();
  if (k >= n)
    throw DegreeError("exterior derivative of a top-degree form");
  DifferentialForm out(n, k + 1);
  if (w.bump())
    out = out.with_bump(*w.bump());
  for (const auto& [idx, c] : w.terms()) {
    for (int j = 0; j < n; ++j) {
      const IndexSet dj = IndexSet{1} << j;
      if (idx & dj)
        continue;
      TrigPoly dc = c.derivative(j);
      if (dc.is_zero())
        continue;
      out.add(idx | dj, dc.scaled(shuffle_sign(dj, idx)));
    }
  }
  return out;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b)
{
  if (a.ambient_dim() != b.ambient_dim())
    throw DegreeError("wedge of forms on different tori");
  const int n = a.ambient_dim();
  if (a.degree() + b.degree() > n)
    throw DegreeError("wedge degree " + std::to_string(a.degree() + b.degree()) + " exceeds dimension " +
                      std::to_string(n));
  if (a.bump() && b.bump())
    throw InputError("wedge of two bump-carrying forms is not supported");
  DifferentialForm out(n, a.degree() + b.degree());
  if (a.bump())
    out = out.with_bump(*a.bump());
  if (b.bump())
    out = out.with_bump(*b.bump());
  for (const auto& [i, ci] : a.terms()) {
    for (const auto& [j, cj] : b.terms()) {
      const int sign = shuffle_sign(i, j);
      if (sign == 0)
        continue;
      out.add(i | j, (ci * cj).scaled(sign));
    }
  }
  return out;
}

std::vector<DifferentialForm> harmonic_basis(int n, int k)
{
  if (k < 0 || k > n)
    throw DegreeError("harmonic basis needs 0 <= k <= n");
  std::vector<DifferentialForm> out;
  for (IndexSet idx : lex_subsets(n, k))
    out.push_back(DifferentialForm::constant(n, idx, 1.0));
  return out;
}

void Subtorus::check() const
{
  if (fixed.empty() || fixed.size() != values.size())
    throw InputError("subtorus needs matching fixed coordinates and values");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i] < 0 || fixed[i] >= n)
      throw InputError("subtorus coordinate out of range");
    if (i > 0 && fixed[i] <= fixed[i - 1])
      throw InputError("subtorus coordinates must be strictly increasing");
  }
}

ThomForm thom_form(const Subtorus& n, double width)
{
  n.check();
  if (!(width > 0.0 && width < 0.25))
    throw InputError("Thom form width must lie in (0, 1/4), got " + std::to_string(width));
  BumpFactor b;
  b.fixed = n.mask();
  b.centers.assign(static_cast<std::size_t>(n.n), 0.0);
  for (std::size_t i = 0; i < n.fixed.size(); ++i)
    b.centers[static_cast<std::size_t>(n.fixed[i])] = n.values[i];
  b.width = width;
  ThomForm t;
  t.submanifold = n;
  t.width = width;
  t.form = DifferentialForm::constant(n.n, b.fixed, 1.0).with_bump(b);
  return t;
}

} // namespace sol
