#include "freqlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>
#include <utility>

#include "freqlab/detail/field_impl.hpp"

namespace freqlab {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::vector<Monomial> canonicalize(const std::vector<Monomial>& terms) {
  std::map<std::tuple<int, int, int>, double> acc;
  for (const auto& t : terms) acc[{t.ex, t.ey, t.ez}] += t.coef;
  std::vector<Monomial> out;
  for (const auto& [exps, c] : acc) {
    if (c != 0.0) out.push_back({c, std::get<0>(exps), std::get<1>(exps), std::get<2>(exps)});
  }
  return out;
}

std::vector<Monomial> differentiate(const std::vector<Monomial>& terms, int axis) {
  std::vector<Monomial> out;
  for (const auto& t : terms) {
    int e[3] = {t.ex, t.ey, t.ez};
    if (e[axis] == 0) continue;
    double c = t.coef * e[axis];
    e[axis] -= 1;
    out.push_back({c, e[0], e[1], e[2]});
  }
  return canonicalize(out);
}

double eval_terms(const std::vector<Monomial>& terms, const Point& x) {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * ipow(x[0], t.ex) * ipow(x[1], t.ey) * ipow(x[2], t.ez);
  return s;
}

// ---------------------------------------------------------------------------

class PolynomialField final : public detail::FieldImpl {
 public:
  PolynomialField(std::vector<Monomial> terms, int n, std::string name)
      : n_(n), name_(std::move(name)), terms_(canonicalize(terms)) {
    require_dim(n, "PolynomialField");
    for (int a = 0; a < 3; ++a) grad_[a] = differentiate(terms_, a);
    std::vector<Monomial> lap;
    for (int a = 0; a < n_; ++a) {
      auto second = differentiate(grad_[a], a);
      lap.insert(lap.end(), second.begin(), second.end());
    }
    lap_ = canonicalize(lap);
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) hess_[a][b] = differentiate(grad_[a], b);
  }

  int dim() const override { return n_; }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override { return eval_terms(terms_, x); }
  Point gradient(const Point& x) const override {
    Point g;
    g.n = n_;
    for (int a = 0; a < n_; ++a) g[a] = eval_terms(grad_[a], x);
    return g;
  }
  double laplacian(const Point& x) const override { return eval_terms(lap_, x); }
  Mat3 hessian(const Point& x) const override {
    Mat3 h;
    for (int a = 0; a < n_; ++a)
      for (int b = a; b < n_; ++b) {
        double v = eval_terms(hess_[a][b], x);
        h(a, b) = v;
        h(b, a) = v;
      }
    return h;
  }
  Equation natural_equation() const override {
    if (lap_.empty()) return EquationLaplace{};
    return EquationNone{};
  }

 private:
  int n_;
  std::string name_;
  std::vector<Monomial> terms_;
  std::vector<Monomial> grad_[3];
  std::vector<Monomial> lap_;
  std::vector<Monomial> hess_[3][3];
};

// ---------------------------------------------------------------------------

class DriftExpField final : public detail::FieldImpl {
 public:
  DriftExpField(Point b, int n, std::string name) : b_(b), n_(n), name_(std::move(name)) {
    b_.n = n;
    bsq_ = dot(b_, b_);
  }

  int dim() const override { return n_; }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override { return std::exp(dot(b_, x)); }
  Point gradient(const Point& x) const override { return value(x) * b_; }
  double laplacian(const Point& x) const override { return bsq_ * value(x); }
  Mat3 hessian(const Point& x) const override {
    Mat3 h;
    double u = value(x);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) h(i, j) = b_[i] * b_[j] * u;
    return h;
  }
  EvalBundle eval(const Point& x) const override {
    double u = value(x);
    return EvalBundle{u, u * b_, bsq_ * u};
  }
  Equation natural_equation() const override { return EquationDrift{b_}; }

 private:
  Point b_;
  int n_;
  std::string name_;
  double bsq_ = 0.0;
};

// ---------------------------------------------------------------------------

class PRadialField final : public detail::FieldImpl {
 public:
  PRadialField(double p, double r_min, int n, std::string name)
      : p_(p), r_min_(r_min), n_(n), name_(std::move(name)) {
    exponent_ = (p - n) / (p - 1.0);
  }

  int dim() const override { return n_; }
  const std::string& name() const override { return name_; }

  bool admissible(const Point& x) const override {
    return norm(x) >= r_min_ * (1.0 - 1e-12);
  }
  bool ball_admissible(const Point& center, double r) const override {
    double c = norm(center);
    if (c <= 1e-15) return r >= r_min_;  // annulus convention about the origin
    return c - r >= r_min_ * (1.0 - 1e-12);
  }
  double inner_cutoff() const override { return r_min_; }

  double value(const Point& x) const override { return std::pow(check(x), exponent_); }
  Point gradient(const Point& x) const override {
    double rr = check(x);
    double f = exponent_ * std::pow(rr, exponent_ - 2.0);
    return f * x;
  }
  double laplacian(const Point& x) const override {
    double rr = check(x);
    return exponent_ * (exponent_ + n_ - 2.0) * std::pow(rr, exponent_ - 2.0);
  }
  Mat3 hessian(const Point& x) const override {
    double rr = check(x);
    double f = exponent_ * std::pow(rr, exponent_ - 2.0);
    double g = exponent_ * (exponent_ - 2.0) * std::pow(rr, exponent_ - 4.0);
    Mat3 h;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) h(i, j) = g * x[i] * x[j];
      h(i, i) += f;
    }
    return h;
  }
  Equation natural_equation() const override { return EquationPLaplace{p_, 0.0}; }

 private:
  double check(const Point& x) const {
    double rr = norm(x);
    if (rr < r_min_ * (1.0 - 1e-12))
      throw DomainError(name_ + ": point inside the excluded ball |x| < " +
                        std::to_string(r_min_));
    return rr;
  }

  double p_;
  double r_min_;
  int n_;
  std::string name_;
  double exponent_;
};

// ---------------------------------------------------------------------------

class RampField final : public detail::FieldImpl {
 public:
  RampField(Point e, int n, std::string name) : e_(e), n_(n), name_(std::move(name)) {
    e_.n = n;
  }

  int dim() const override { return n_; }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override { return std::max(dot(e_, x), 0.0); }
  Point gradient(const Point& x) const override {
    if (dot(e_, x) > 0.0) return e_;
    Point z;
    z.n = n_;
    return z;
  }
  double laplacian(const Point&) const override { return 0.0; }  // a.e.
  Mat3 hessian(const Point&) const override { return Mat3{}; }
  Equation natural_equation() const override { return EquationNone{}; }

 private:
  Point e_;
  int n_;
  std::string name_;
};

// ---------------------------------------------------------------------------

class HarmonicExpField final : public detail::FieldImpl {
 public:
  HarmonicExpField(double kappa, std::string name) : kappa_(kappa), name_(std::move(name)) {}

  int dim() const override { return 2; }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override {
    return std::exp(kappa_ * x[0]) * std::cos(kappa_ * x[1]);
  }
  Point gradient(const Point& x) const override {
    double e = std::exp(kappa_ * x[0]);
    return Point(kappa_ * e * std::cos(kappa_ * x[1]), -kappa_ * e * std::sin(kappa_ * x[1]));
  }
  double laplacian(const Point&) const override { return 0.0; }  // analytic cancellation
  Mat3 hessian(const Point& x) const override {
    double e = std::exp(kappa_ * x[0]);
    double k2 = kappa_ * kappa_;
    Mat3 h;
    h(0, 0) = k2 * e * std::cos(kappa_ * x[1]);
    h(1, 1) = -h(0, 0);
    h(0, 1) = h(1, 0) = -k2 * e * std::sin(kappa_ * x[1]);
    return h;
  }
  Equation natural_equation() const override { return EquationLaplace{}; }

 private:
  double kappa_;
  std::string name_;
};

// ---------------------------------------------------------------------------

class ScaledField final : public detail::FieldImpl {
 public:
  ScaledField(std::shared_ptr<const detail::FieldImpl> base, double tau)
      : base_(std::move(base)), tau_(tau) {
    name_ = base_->name() + ":scaled(tau=" + std::to_string(tau) + ")";
  }

  int dim() const override { return base_->dim(); }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override { return base_->value(tau_ * x); }
  Point gradient(const Point& x) const override { return tau_ * base_->gradient(tau_ * x); }
  double laplacian(const Point& x) const override {
    return tau_ * tau_ * base_->laplacian(tau_ * x);
  }
  Mat3 hessian(const Point& x) const override {
    Mat3 h = base_->hessian(tau_ * x);
    for (auto& v : h.a) v *= tau_ * tau_;
    return h;
  }
  bool admissible(const Point& x) const override { return base_->admissible(tau_ * x); }
  bool ball_admissible(const Point& c, double r) const override {
    return base_->ball_admissible(tau_ * c, tau_ * r);
  }
  double inner_cutoff() const override { return base_->inner_cutoff() / tau_; }
  Equation natural_equation() const override {
    Equation eq = base_->natural_equation();
    if (auto* d = std::get_if<EquationDrift>(&eq)) {
      // v(x) = u(tau x) solves lap v = (tau b) . grad v
      return EquationDrift{tau_ * d->b};
    }
    return eq;
  }

 private:
  std::shared_ptr<const detail::FieldImpl> base_;
  double tau_;
  std::string name_;
};

// ---------------------------------------------------------------------------

class CombinationField final : public detail::FieldImpl {
 public:
  CombinationField(std::shared_ptr<const detail::FieldImpl> u, double cu,
                   std::shared_ptr<const detail::FieldImpl> v, double cv)
      : u_(std::move(u)), cu_(cu), v_(std::move(v)), cv_(cv) {
    name_ = "combo(" + u_->name() + "," + v_->name() + ")";
  }

  int dim() const override { return u_->dim(); }
  const std::string& name() const override { return name_; }
  double value(const Point& x) const override { return cu_ * u_->value(x) + cv_ * v_->value(x); }
  Point gradient(const Point& x) const override {
    Point a = u_->gradient(x), b = v_->gradient(x);
    Point g;
    g.n = dim();
    for (int i = 0; i < g.n; ++i) g[i] = cu_ * a[i] + cv_ * b[i];
    return g;
  }
  double laplacian(const Point& x) const override {
    return cu_ * u_->laplacian(x) + cv_ * v_->laplacian(x);
  }
  Mat3 hessian(const Point& x) const override {
    Mat3 a = u_->hessian(x), b = v_->hessian(x);
    Mat3 h;
    for (size_t i = 0; i < h.a.size(); ++i) h.a[i] = cu_ * a.a[i] + cv_ * b.a[i];
    return h;
  }
  bool admissible(const Point& x) const override {
    return u_->admissible(x) && v_->admissible(x);
  }
  bool ball_admissible(const Point& c, double r) const override {
    return u_->ball_admissible(c, r) && v_->ball_admissible(c, r);
  }
  double inner_cutoff() const override {
    return std::max(u_->inner_cutoff(), v_->inner_cutoff());
  }
  Equation natural_equation() const override {
    bool both_harmonic = std::holds_alternative<EquationLaplace>(u_->natural_equation()) &&
                         std::holds_alternative<EquationLaplace>(v_->natural_equation());
    if (both_harmonic) return EquationLaplace{};
    return EquationNone{};
  }

 private:
  std::shared_ptr<const detail::FieldImpl> u_;
  double cu_;
  std::shared_ptr<const detail::FieldImpl> v_;
  double cv_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Harmonic catalogs
// ---------------------------------------------------------------------------

long binomial(int k, int j) {
  long r = 1;
  for (int i = 0; i < j; ++i) r = r * (k - i) / (i + 1);
  return r;
}

// Re/Im of (x + i y)^k: the 2D homogeneous harmonic pair r^k cos(k t), r^k sin(k t).
std::vector<Monomial> harmonic2d(int k, bool sine) {
  std::vector<Monomial> terms;
  for (int j = sine ? 1 : 0; j <= k; j += 2) {
    double sign = ((sine ? (j - 1) / 2 : j / 2) % 2 == 0) ? 1.0 : -1.0;
    terms.push_back({sign * static_cast<double>(binomial(k, j)), k - j, j, 0});
  }
  if (terms.empty()) terms.push_back({sine ? 0.0 : 1.0, 0, 0, 0});
  return terms;
}

// Tabulated real solid harmonics of degree <= 4 (unnormalized Cartesian forms).
const std::vector<std::vector<std::vector<Monomial>>>& solid_harmonics3d() {
  static const std::vector<std::vector<std::vector<Monomial>>> table = {
      // degree 0
      {{{1, 0, 0, 0}}},
      // degree 1
      {{{1, 1, 0, 0}}, {{1, 0, 1, 0}}, {{1, 0, 0, 1}}},
      // degree 2
      {{{1, 1, 1, 0}},
       {{1, 0, 1, 1}},
       {{1, 1, 0, 1}},
       {{1, 2, 0, 0}, {-1, 0, 2, 0}},
       {{2, 0, 0, 2}, {-1, 2, 0, 0}, {-1, 0, 2, 0}}},
      // degree 3
      {{{2, 0, 0, 3}, {-3, 2, 0, 1}, {-3, 0, 2, 1}},
       {{4, 1, 0, 2}, {-1, 3, 0, 0}, {-1, 1, 2, 0}},
       {{4, 0, 1, 2}, {-1, 2, 1, 0}, {-1, 0, 3, 0}},
       {{1, 2, 0, 1}, {-1, 0, 2, 1}},
       {{1, 1, 1, 1}},
       {{1, 3, 0, 0}, {-3, 1, 2, 0}},
       {{3, 2, 1, 0}, {-1, 0, 3, 0}}},
      // degree 4
      {{{3, 4, 0, 0}, {3, 0, 4, 0}, {8, 0, 0, 4}, {6, 2, 2, 0}, {-24, 2, 0, 2}, {-24, 0, 2, 2}},
       {{4, 1, 0, 3}, {-3, 3, 0, 1}, {-3, 1, 2, 1}},
       {{4, 0, 1, 3}, {-3, 2, 1, 1}, {-3, 0, 3, 1}},
       {{6, 2, 0, 2}, {-6, 0, 2, 2}, {-1, 4, 0, 0}, {1, 0, 4, 0}},
       {{6, 1, 1, 2}, {-1, 3, 1, 0}, {-1, 1, 3, 0}},
       {{1, 3, 0, 1}, {-3, 1, 2, 1}},
       {{3, 2, 1, 1}, {-1, 0, 3, 1}},
       {{1, 4, 0, 0}, {-6, 2, 2, 0}, {1, 0, 4, 0}},
       {{1, 3, 1, 0}, {-1, 1, 3, 0}}},
  };
  return table;
}

bool all_finite(const Point& v) {
  for (int i = 0; i < v.n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

std::string join_coords(const Point& v) {
  std::ostringstream os;
  for (int i = 0; i < v.n; ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarField wrapper
// ---------------------------------------------------------------------------

ScalarField::ScalarField(std::shared_ptr<const detail::FieldImpl> impl)
    : impl_(std::move(impl)) {}

int ScalarField::dim() const { return impl_->dim(); }
const std::string& ScalarField::name() const { return impl_->name(); }

namespace {
void check_point(const detail::FieldImpl& impl, const Point& x) {
  if (x.n != impl.dim())
    throw ParameterError(impl.name() + ": point dimension " + std::to_string(x.n) +
                         " does not match field dimension " + std::to_string(impl.dim()));
  if (!impl.admissible(x)) throw DomainError(impl.name() + ": point outside admissible domain");
}
}  // namespace

double ScalarField::value(const Point& x) const {
  check_point(*impl_, x);
  return impl_->value(x);
}
Point ScalarField::gradient(const Point& x) const {
  check_point(*impl_, x);
  return impl_->gradient(x);
}
double ScalarField::laplacian(const Point& x) const {
  check_point(*impl_, x);
  return impl_->laplacian(x);
}
Mat3 ScalarField::hessian(const Point& x) const {
  check_point(*impl_, x);
  return impl_->hessian(x);
}
EvalBundle ScalarField::eval(const Point& x) const {
  check_point(*impl_, x);
  return impl_->eval(x);
}
bool ScalarField::admissible(const Point& x) const {
  return x.n == impl_->dim() && impl_->admissible(x);
}
bool ScalarField::ball_admissible(const Point& center, double r) const {
  return center.n == impl_->dim() && r > 0.0 && impl_->ball_admissible(center, r);
}
double ScalarField::inner_cutoff() const { return impl_->inner_cutoff(); }
double ScalarField::discretization_scale() const { return impl_->discretization_scale(); }
Equation ScalarField::natural_equation() const { return impl_->natural_equation(); }

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

ScalarField make_field(const FieldSpec& spec, int n) {
  require_dim(n, "make_field");
  if (const auto* h = std::get_if<HarmonicPolynomialSpec>(&spec)) {
    if (h->degree < 0) throw ParameterError("harmonic: degree must be >= 0");
    if (n == 2) {
      if (h->index != 0 && h->index != 1)
        throw ParameterError("harmonic 2d: basis index must be 0 (cos) or 1 (sin)");
      if (h->index == 1 && h->degree == 0)
        throw ParameterError("harmonic 2d: sin basis requires degree >= 1");
      std::string nm = "harmonic:2d:k=" + std::to_string(h->degree) +
                       (h->index == 0 ? ":cos" : ":sin");
      return make_polynomial_field(harmonic2d(h->degree, h->index == 1), 2, nm);
    }
    const auto& table = solid_harmonics3d();
    if (h->degree >= static_cast<int>(table.size()))
      throw ParameterError("harmonic 3d: catalog holds degrees 0..4");
    const auto& level = table[static_cast<size_t>(h->degree)];
    if (h->index < 0 || h->index >= static_cast<int>(level.size()))
      throw ParameterError("harmonic 3d: degree " + std::to_string(h->degree) + " has " +
                           std::to_string(level.size()) + " basis entries");
    std::string nm =
        "harmonic:3d:deg=" + std::to_string(h->degree) + ":m=" + std::to_string(h->index);
    return make_polynomial_field(level[static_cast<size_t>(h->index)], 3, nm);
  }
  if (const auto* a = std::get_if<AffineSpec>(&spec)) {
    if (!all_finite(a->coeffs) || !std::isfinite(a->constant))
      throw ParameterError("affine: coefficients must be finite");
    std::vector<Monomial> terms{{a->constant, 0, 0, 0}};
    Point c = a->coeffs;
    c.n = n;
    terms.push_back({c[0], 1, 0, 0});
    terms.push_back({c[1], 0, 1, 0});
    if (n == 3) terms.push_back({c[2], 0, 0, 1});
    std::string nm = "affine:a=" + join_coords(c) + ":c=" + std::to_string(a->constant);
    return make_polynomial_field(std::move(terms), n, nm);
  }
  if (const auto* d = std::get_if<DriftExponentialSpec>(&spec)) {
    if (!all_finite(d->b)) throw ParameterError("drift-exp: b must be finite");
    Point b = d->b;
    b.n = n;
    return ScalarField(
        std::make_shared<DriftExpField>(b, n, "drift-exp:b=" + join_coords(b)));
  }
  if (const auto* pr = std::get_if<PRadialSpec>(&spec)) {
    if (!(pr->p > 1.0)) throw ParameterError("p-radial: p must be > 1");
    if (std::abs(pr->p - n) < 1e-12)
      throw ParameterError("p-radial: p == n is excluded (logarithmic solution)");
    if (!(pr->r_min > 0.0)) throw ParameterError("p-radial: r_min must be > 0");
    std::string nm = "p-radial:p=" + std::to_string(pr->p);
    return ScalarField(std::make_shared<PRadialField>(pr->p, pr->r_min, n, nm));
  }
  if (const auto* rp = std::get_if<RampSpec>(&spec)) {
    Point e = rp->direction;
    e.n = n;
    double len = norm(e);
    if (!(len > 0.0) || !all_finite(e)) throw ParameterError("ramp: direction must be nonzero");
    e = (1.0 / len) * e;
    return ScalarField(std::make_shared<RampField>(e, n, "ramp:e=" + join_coords(e)));
  }
  if (const auto* he = std::get_if<HarmonicExpSpec>(&spec)) {
    if (n != 2) throw ParameterError("harmonic-exp: 2D only");
    if (!std::isfinite(he->kappa) || he->kappa == 0.0)
      throw ParameterError("harmonic-exp: kappa must be finite and nonzero");
    return ScalarField(std::make_shared<HarmonicExpField>(
        he->kappa, "harmonic-exp:kappa=" + std::to_string(he->kappa)));
  }
  throw ParameterError("make_field: unknown spec");
}

ScalarField make_polynomial_field(std::vector<Monomial> terms, int n, std::string name) {
  if (name.empty()) name = "polynomial";
  return ScalarField(std::make_shared<PolynomialField>(std::move(terms), n, std::move(name)));
}

ScalarField make_linear_combination(const ScalarField& u0, double c_u, const ScalarField& v0,
                                    double c_v) {
  if (u0.dim() != v0.dim())
    throw ParameterError("make_linear_combination: dimension mismatch");
  return ScalarField(
      std::make_shared<CombinationField>(u0.backend(), c_u, v0.backend(), c_v));
}

ScalarField make_scaled(const ScalarField& u, double tau) {
  if (!(tau > 0.0)) throw ParameterError("make_scaled: tau must be > 0");
  return ScalarField(std::make_shared<ScaledField>(u.backend(), tau));
}

// ---------------------------------------------------------------------------
// Catalog string parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("field catalog: cannot parse number '" + s + "' in " + what);
  }
}

Point parse_vector(const std::string& s, const std::string& what) {
  auto parts = split(s, ',');
  if (parts.size() != 2 && parts.size() != 3)
    throw ParameterError("field catalog: vector '" + s + "' in " + what +
                         " must have 2 or 3 components");
  Point v;
  v.n = static_cast<int>(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) v[static_cast<int>(i)] = parse_num(parts[i], what);
  return v;
}

// "key=value" -> value for an expected key
std::string expect_kv(const std::string& seg, const std::string& key, const std::string& name) {
  auto eq = seg.find('=');
  if (eq == std::string::npos || seg.substr(0, eq) != key)
    throw ParameterError("field catalog: expected '" + key + "=...' in '" + name + "'");
  return seg.substr(eq + 1);
}

}  // namespace

ScalarField parse_field(const std::string& name) {
  auto seg = split(name, ':');
  const std::string& family = seg[0];
  if (family == "harmonic") {
    if (seg.size() != 4) throw ParameterError("harmonic field: '" + name + "' is malformed");
    if (seg[1] == "2d") {
      int k = static_cast<int>(parse_num(expect_kv(seg[2], "k", name), name));
      if (seg[3] != "cos" && seg[3] != "sin")
        throw ParameterError("harmonic 2d: basis must be cos or sin in '" + name + "'");
      return make_field(HarmonicPolynomialSpec{k, seg[3] == "sin" ? 1 : 0}, 2);
    }
    if (seg[1] == "3d") {
      int deg = static_cast<int>(parse_num(expect_kv(seg[2], "deg", name), name));
      int m = static_cast<int>(parse_num(expect_kv(seg[3], "m", name), name));
      return make_field(HarmonicPolynomialSpec{deg, m}, 3);
    }
    throw ParameterError("harmonic field: dimension tag must be 2d or 3d in '" + name + "'");
  }
  if (family == "affine") {
    if (seg.size() < 2) throw ParameterError("affine field: '" + name + "' is malformed");
    Point a = parse_vector(expect_kv(seg[1], "a", name), name);
    double c = seg.size() > 2 ? parse_num(expect_kv(seg[2], "c", name), name) : 0.0;
    return make_field(AffineSpec{a, c}, a.n);
  }
  if (family == "const") {
    if (seg.size() < 2) throw ParameterError("const field: '" + name + "' is malformed");
    double c = parse_num(seg[1], name);
    int n = (seg.size() > 2 && seg[2] == "3d") ? 3 : 2;
    Point zero;
    zero.n = n;
    return make_field(AffineSpec{zero, c}, n);
  }
  if (family == "drift-exp") {
    if (seg.size() != 2) throw ParameterError("drift-exp field: '" + name + "' is malformed");
    Point b = parse_vector(expect_kv(seg[1], "b", name), name);
    return make_field(DriftExponentialSpec{b}, b.n);
  }
  if (family == "p-radial") {
    if (seg.size() < 2) throw ParameterError("p-radial field: '" + name + "' is malformed");
    PRadialSpec spec;
    spec.p = parse_num(expect_kv(seg[1], "p", name), name);
    int n = 2;
    for (size_t i = 2; i < seg.size(); ++i) {
      if (seg[i] == "3d") {
        n = 3;
      } else {
        spec.r_min = parse_num(expect_kv(seg[i], "rmin", name), name);
      }
    }
    return make_field(spec, n);
  }
  if (family == "ramp") {
    if (seg.size() != 2) throw ParameterError("ramp field: '" + name + "' is malformed");
    Point e = parse_vector(expect_kv(seg[1], "e", name), name);
    return make_field(RampSpec{e}, e.n);
  }
  if (family == "harmonic-exp") {
    if (seg.size() != 2)
      throw ParameterError("harmonic-exp field: '" + name + "' is malformed");
    double kappa = parse_num(expect_kv(seg[1], "kappa", name), name);
    return make_field(HarmonicExpSpec{kappa}, 2);
  }
  throw ParameterError("unknown field '" + name + "'; see `freqlab describe` for the catalog");
}

std::vector<std::string> field_catalog() {
  return {
      "harmonic:2d:k=K:cos|sin       homogeneous harmonic r^K cos/sin(K t), K >= 0",
      "harmonic:3d:deg=D:m=M         solid harmonics, D in 0..4, M in 0..2D",
      "affine:a=a1,a2[,a3]:c=C       a . x + C (p-harmonic for every p)",
      "const:C[:3d]                  constant field",
      "drift-exp:b=b1,b2[,b3]        exp(b . x), solves lap u = b . grad u",
      "p-radial:p=P[:rmin=R][:3d]    |x|^((P-n)/(P-1)), P > 1, P != n, annulus |x| >= R",
      "ramp:e=e1,e2[,e3]             max(e . x, 0), Poincare-ratio witness",
      "harmonic-exp:kappa=K          exp(K x1) cos(K x2), entire harmonic, 2D",
      "solve:laplace|drift|plaplace  grid-backed solve, configured in [solver]",
  };
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

double pde_residual(const ScalarField& field, const Point& x, const Equation& eq) {
  if (std::holds_alternative<EquationLaplace>(eq)) return std::abs(field.laplacian(x));
  if (const auto* d = std::get_if<EquationDrift>(&eq)) {
    EvalBundle e = field.eval(x);
    Point b = d->b;
    b.n = field.dim();
    return std::abs(e.lap - dot(b, e.grad));
  }
  if (const auto* pl = std::get_if<EquationPLaplace>(&eq)) {
    const double p = pl->p;
    Point g = field.gradient(x);
    double gsq = dot(g, g);
    double s = gsq + pl->epsilon * pl->epsilon;
    if (s <= 0.0 || (gsq < 1e-28 && pl->epsilon == 0.0 && p != 2.0))
      throw DegenerateError(field.name() +
                            ": p-laplace residual at a critical point needs regularization");
    Mat3 h = field.hessian(x);
    double lap = field.laplacian(x);
    return std::abs(std::pow(s, 0.5 * p - 1.0) * lap +
                    (p - 2.0) * std::pow(s, 0.5 * p - 2.0) * quad_form(h, g));
  }
  throw ParameterError("pde_residual: field has no associated equation");
}

EvalBundle eval_bundle(const ScalarField& field, const Point& x) { return field.eval(x); }

}  // namespace freqlab
