#include "freqlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freqlab/detail/field_impl.hpp"
#include "freqlab/report.hpp"

namespace freqlab {

namespace {

void validate(const BVP& bvp) {
  if (!(bvp.b > bvp.a)) throw ParameterError("solve: domain requires a < b");
  if (bvp.nodes < 5) throw ParameterError("solve: grid needs >= 9 interior points");
  if (!bvp.boundary) throw ParameterError("solve: boundary data is required");
  if (const auto* d = std::get_if<EquationDrift>(&bvp.equation)) {
    double peclet = norm(d->b) * bvp.spacing() / 2.0;
    if (peclet >= 1.0)
      throw ParameterError("solve: mesh Peclet number " + std::to_string(peclet) +
                           " >= 1; refine the grid");
  }
  if (const auto* p = std::get_if<EquationPLaplace>(&bvp.equation)) {
    if (!(p->p > 1.0)) throw ParameterError("solve: p-laplace requires p > 1");
    if (!(p->epsilon >= 0.0)) throw ParameterError("solve: regularization must be >= 0");
  }
}

// Full grid with boundary data filled in and zero interior.
std::vector<double> boundary_grid(const BVP& bvp) {
  const int N = bvp.nodes;
  const double h = bvp.spacing();
  std::vector<double> g(static_cast<size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i) {
    double x = bvp.a + i * h;
    g[static_cast<size_t>(0) * N + i] = bvp.boundary(x, bvp.a);
    g[static_cast<size_t>(N - 1) * N + i] = bvp.boundary(x, bvp.b);
    g[static_cast<size_t>(i) * N + 0] = bvp.boundary(bvp.a, bvp.a + i * h);
    g[static_cast<size_t>(i) * N + (N - 1)] = bvp.boundary(bvp.b, bvp.a + i * h);
  }
  return g;
}

// Matrix-free stencil for the (possibly drift-augmented) 5-point operator,
// acting on the interior unknowns, scaled by h^2:
//   4u - uE - uW - uN - uS + (h bx / 2)(uE - uW) + (h by / 2)(uN - uS)
struct StencilOp {
  int N;
  double cE, cW, cN, cS;

  StencilOp(int nodes, double h, const Point& b)
      : N(nodes),
        cE(-1.0 + 0.5 * h * b[0]),
        cW(-1.0 - 0.5 * h * b[0]),
        cN(-1.0 + 0.5 * h * b[1]),
        cS(-1.0 - 0.5 * h * b[1]) {}

  int m() const { return (N - 2) * (N - 2); }
  int idx(int i, int j) const { return (j - 1) * (N - 2) + (i - 1); }

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    for (int j = 1; j < N - 1; ++j) {
      for (int i = 1; i < N - 1; ++i) {
        double v = 4.0 * u[idx(i, j)];
        if (i + 1 < N - 1) v += cE * u[idx(i + 1, j)];
        if (i - 1 > 0) v += cW * u[idx(i - 1, j)];
        if (j + 1 < N - 1) v += cN * u[idx(i, j + 1)];
        if (j - 1 > 0) v += cS * u[idx(i, j - 1)];
        out[idx(i, j)] = v;
      }
    }
  }

  std::vector<double> rhs(const std::vector<double>& bgrid) const {
    std::vector<double> b(m(), 0.0);
    auto gid = [&](int i, int j) { return bgrid[static_cast<size_t>(j) * N + i]; };
    for (int j = 1; j < N - 1; ++j) {
      for (int i = 1; i < N - 1; ++i) {
        double v = 0.0;
        if (i + 1 == N - 1) v -= cE * gid(i + 1, j);
        if (i - 1 == 0) v -= cW * gid(i - 1, j);
        if (j + 1 == N - 1) v -= cN * gid(i, j + 1);
        if (j - 1 == 0) v -= cS * gid(i, j - 1);
        b[idx(i, j)] = v;
      }
    }
    return b;
  }
};

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_vec(const std::vector<double>& a) { return std::sqrt(dot_vec(a, a)); }

struct IterResult {
  int iterations = 0;
  double residual = 0.0;  // relative to |rhs|
};

template <typename Apply>
IterResult conjugate_gradient(const Apply& apply, const std::vector<double>& rhs,
                              std::vector<double>& x, double tol, int max_iter) {
  const size_t m = rhs.size();
  x.assign(m, 0.0);
  std::vector<double> r = rhs, p = rhs, ap(m);
  double bn = norm_vec(rhs);
  if (bn == 0.0) return {0, 0.0};
  double rs = dot_vec(r, r);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    double alpha = rs / dot_vec(p, ap);
    for (size_t i = 0; i < m; ++i) x[i] += alpha * p[i];
    for (size_t i = 0; i < m; ++i) r[i] -= alpha * ap[i];
    double rs_new = dot_vec(r, r);
    if (std::sqrt(rs_new) <= tol * bn) return {it, std::sqrt(rs_new) / bn};
    double beta = rs_new / rs;
    rs = rs_new;
    for (size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
  }
  throw NonconvergenceError("conjugate gradients: max iterations reached",
                            std::sqrt(rs) / bn);
}

template <typename Apply>
IterResult bicgstab(const Apply& apply, const std::vector<double>& rhs, std::vector<double>& x,
                    double tol, int max_iter) {
  const size_t m = rhs.size();
  x.assign(m, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> rhat = rhs, p(m, 0.0), v(m, 0.0), s(m), t(m);
  double bn = norm_vec(rhs);
  if (bn == 0.0) return {0, 0.0};
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rn = bn;
  for (int it = 1; it <= max_iter; ++it) {
    double rho_new = dot_vec(rhat, r);
    if (std::abs(rho_new) < 1e-300)
      throw NonconvergenceError("bicgstab: breakdown (rho ~ 0)", rn / bn);
    double beta = (rho_new / rho) * (alpha / omega);
    for (size_t i = 0; i < m; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    apply(p, v);
    alpha = rho_new / dot_vec(rhat, v);
    for (size_t i = 0; i < m; ++i) s[i] = r[i] - alpha * v[i];
    if (norm_vec(s) <= tol * bn) {
      for (size_t i = 0; i < m; ++i) x[i] += alpha * p[i];
      return {it, norm_vec(s) / bn};
    }
    apply(s, t);
    omega = dot_vec(t, s) / dot_vec(t, t);
    if (std::abs(omega) < 1e-300)
      throw NonconvergenceError("bicgstab: breakdown (omega ~ 0)", rn / bn);
    for (size_t i = 0; i < m; ++i) x[i] += alpha * p[i] + omega * s[i];
    for (size_t i = 0; i < m; ++i) r[i] = s[i] - omega * t[i];
    rn = norm_vec(r);
    if (rn <= tol * bn) return {it, rn / bn};
    rho = rho_new;
  }
  throw NonconvergenceError("bicgstab: max iterations reached", rn / bn);
}

// ---------------------------------------------------------------------------
// P1 energy machinery for the p-laplace solver. Each cell splits into two
// right triangles with axis-aligned legs; gradients are constant per
// triangle, and for p = 2 the Euler-Lagrange system is exactly the 5-point
// stencil.
// ---------------------------------------------------------------------------

struct P1Grid {
  int N;
  double h, p, eps2;

  double psi(double s) const { return std::pow(s, 0.5 * p); }
  double dpsi(double s) const { return 0.5 * p * std::pow(s, 0.5 * p - 1.0); }
  double ddpsi(double s) const {
    return 0.5 * p * (0.5 * p - 1.0) * std::pow(s, 0.5 * p - 2.0);
  }

  size_t gid(int i, int j) const { return static_cast<size_t>(j) * N + i; }

  // Visits both triangles of every cell; the bool distinguishes which
  // legs carry the x- and y-differences.
  template <typename Fn>
  void for_each_triangle(Fn&& fn) const {
    for (int j = 0; j + 1 < N; ++j) {
      for (int i = 0; i + 1 < N; ++i) {
        size_t a = gid(i, j), b = gid(i + 1, j), c = gid(i + 1, j + 1), d = gid(i, j + 1);
        // lower: gx from a->b, gy from b->c
        fn(a, b, c, /*lower=*/true);
        // upper: gx from d->c, gy from a->d
        fn(a, d, c, /*lower=*/false);
      }
    }
  }

  void gradients(const std::vector<double>& u, size_t n0, size_t n1, size_t n2, bool lower,
                 double& gx, double& gy) const {
    if (lower) {  // n0=a, n1=b, n2=c
      gx = (u[n1] - u[n0]) / h;
      gy = (u[n2] - u[n1]) / h;
    } else {  // n0=a, n1=d, n2=c
      gx = (u[n2] - u[n1]) / h;
      gy = (u[n1] - u[n0]) / h;
    }
  }

  double energy(const std::vector<double>& u) const {
    double e = 0.0;
    const double area = 0.5 * h * h;
    for_each_triangle([&](size_t a, size_t b, size_t c, bool lower) {
      double gx, gy;
      gradients(u, a, b, c, lower, gx, gy);
      e += area * psi(gx * gx + gy * gy + eps2);
    });
    return e;
  }

  // dE/du at every node (boundary entries included; caller masks them).
  void gradient(const std::vector<double>& u, std::vector<double>& g) const {
    g.assign(u.size(), 0.0);
    const double w0 = h * h;  // area * psi'(s) * 2 -> h^2 psi'
    for_each_triangle([&](size_t a, size_t b, size_t c, bool lower) {
      double gx, gy;
      gradients(u, a, b, c, lower, gx, gy);
      double wg = w0 * dpsi(gx * gx + gy * gy + eps2) / h;
      if (lower) {
        g[a] += -wg * gx;
        g[b] += wg * (gx - gy);
        g[c] += wg * gy;
      } else {
        g[a] += -wg * gy;
        g[b] += wg * (gy - gx);
        g[c] += wg * gx;
      }
    });
  }

  // Hessian-vector product restricted to interior nodes (z has zero
  // boundary entries).
  void hessian_apply(const std::vector<double>& u, const std::vector<double>& z,
                     std::vector<double>& out) const {
    out.assign(u.size(), 0.0);
    const double w0 = h * h;
    for_each_triangle([&](size_t a, size_t b, size_t c, bool lower) {
      double gx, gy, zx, zy;
      gradients(u, a, b, c, lower, gx, gy);
      gradients(z, a, b, c, lower, zx, zy);
      double s = gx * gx + gy * gy + eps2;
      double d1 = dpsi(s), d2 = ddpsi(s);
      double gdotz = gx * zx + gy * zy;
      // H z = 2 psi'' (g . z) g + psi' z, per gradient component
      double hx = 2.0 * d2 * gdotz * gx + d1 * zx;
      double hy = 2.0 * d2 * gdotz * gy + d1 * zy;
      double wx = w0 * hx / h, wy = w0 * hy / h;
      if (lower) {
        out[a] += -wx;
        out[b] += wx - wy;
        out[c] += wy;
      } else {
        out[a] += -wy;
        out[b] += wy - wx;
        out[c] += wx;
      }
    });
  }
};

GridSolution solve_linear(const BVP& bvp, const SolveOptions& options, const Point& drift) {
  const int N = bvp.nodes;
  const double h = bvp.spacing();
  StencilOp op(N, h, drift);
  auto bgrid = boundary_grid(bvp);
  auto rhs = op.rhs(bgrid);
  std::vector<double> u;
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    op.apply(in, out);
  };
  const bool symmetric = drift[0] == 0.0 && drift[1] == 0.0;
  IterResult res = symmetric ? conjugate_gradient(apply, rhs, u, options.tol, options.max_iter)
                             : bicgstab(apply, rhs, u, options.tol, options.max_iter);

  GridSolution sol;
  sol.a = bvp.a;
  sol.b = bvp.b;
  sol.nodes = N;
  sol.h = h;
  sol.values = bgrid;
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i)
      sol.values[static_cast<size_t>(j) * N + i] = u[op.idx(i, j)];
  sol.residual = res.residual;
  sol.iterations = res.iterations;
  return sol;
}

GridSolution solve_plaplace(const BVP& bvp, const SolveOptions& options, double p,
                            double epsilon) {
  const int N = bvp.nodes;
  const double h = bvp.spacing();

  // Warm start from the harmonic solution of the same boundary data.
  BVP lin = bvp;
  lin.equation = EquationLaplace{};
  SolveOptions lin_opts = options;
  lin_opts.tol = std::min(options.tol, 1e-12);
  GridSolution sol = solve_linear(lin, lin_opts, Point(0.0, 0.0));

  P1Grid grid{N, h, p, epsilon * epsilon};
  std::vector<double> cur = sol.values;
  std::vector<double> grad, step_full(cur.size(), 0.0), hz;

  auto interior_norm = [&](const std::vector<double>& g) {
    double s = 0.0;
    for (int j = 1; j < N - 1; ++j)
      for (int i = 1; i < N - 1; ++i) {
        double v = g[grid.gid(i, j)];
        s += v * v;
      }
    return std::sqrt(s);
  };

  const int m = (N - 2) * (N - 2);
  auto pack = [&](const std::vector<double>& full, std::vector<double>& v) {
    v.resize(m);
    int k = 0;
    for (int j = 1; j < N - 1; ++j)
      for (int i = 1; i < N - 1; ++i) v[k++] = full[grid.gid(i, j)];
  };
  auto unpack = [&](const std::vector<double>& v, std::vector<double>& full) {
    int k = 0;
    for (int j = 1; j < N - 1; ++j)
      for (int i = 1; i < N - 1; ++i) full[grid.gid(i, j)] = v[k++];
  };

  double gnorm = 0.0;
  int newton_steps = 0;
  const int max_newton = std::max(1, options.max_iter);
  for (;; ++newton_steps) {
    grid.gradient(cur, grad);
    gnorm = interior_norm(grad);
    if (gnorm <= options.tol) break;
    if (newton_steps >= max_newton)
      throw NonconvergenceError("p-laplace Newton: step budget exhausted", gnorm);

    std::vector<double> g_int;
    pack(grad, g_int);
    for (auto& v : g_int) v = -v;

    auto apply = [&](const std::vector<double>& zin, std::vector<double>& zout) {
      unpack(zin, step_full);
      grid.hessian_apply(cur, step_full, hz);
      pack(hz, zout);
    };
    std::vector<double> d_int;
    conjugate_gradient(apply, g_int, d_int, 1e-12, 40 * m + 200);

    // Backtracking halving with an Armijo slope test; 2^-20 is the floor.
    unpack(d_int, step_full);
    double slope = -dot_vec(g_int, d_int);  // grad . d, negative for descent
    double e0 = grid.energy(cur);
    double lambda = options.damping > 0.0 ? options.damping : 1.0;
    bool accepted = false;
    std::vector<double> trial = cur;
    while (lambda >= std::ldexp(1.0, -20)) {
      for (size_t i = 0; i < cur.size(); ++i) trial[i] = cur[i] + lambda * step_full[i];
      double e1 = grid.energy(trial);
      if (e1 <= e0 + 1e-4 * lambda * slope) {
        cur.swap(trial);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw NonconvergenceError("p-laplace Newton: line search stalled", gnorm);
  }

  sol.values = cur;
  sol.residual = gnorm;
  sol.iterations = newton_steps;
  return sol;
}

}  // namespace

GridSolution solve(const BVP& bvp, const SolveOptions& options) {
  validate(bvp);
  GridSolution sol;
  if (std::holds_alternative<EquationLaplace>(bvp.equation)) {
    sol = solve_linear(bvp, options, Point(0.0, 0.0));
  } else if (const auto* d = std::get_if<EquationDrift>(&bvp.equation)) {
    Point b = d->b;
    b.n = 2;
    // Zero drift is the laplace system; route it through the same path so
    // the two agree bitwise.
    sol = solve_linear(bvp, options, b);
  } else {
    const auto& pl = std::get<EquationPLaplace>(bvp.equation);
    sol = solve_plaplace(bvp, options, pl.p, pl.epsilon);
  }
  sol.equation = bvp.equation;
  return sol;
}

double plaplace_energy(const GridSolution& sol, double p, double epsilon) {
  P1Grid grid{sol.nodes, sol.h, p, epsilon * epsilon};
  return grid.energy(sol.values);
}

// ---------------------------------------------------------------------------
// Grid-backed field
// ---------------------------------------------------------------------------

namespace {

class GridField final : public detail::FieldImpl {
 public:
  GridField(std::shared_ptr<const GridSolution> sol, Equation eq)
      : sol_(std::move(sol)), eq_(eq) {
    name_ = "grid[" + std::to_string(sol_->nodes) + "x" + std::to_string(sol_->nodes) + "]";
  }

  int dim() const override { return 2; }
  const std::string& name() const override { return name_; }

  bool admissible(const Point& x) const override {
    const double lo_x = sol_->a + sol_->h, hi_x = sol_->b - sol_->h;
    const double slack = 1e-12 * (sol_->b - sol_->a);
    return x[0] >= lo_x - slack && x[0] <= hi_x + slack && x[1] >= lo_x - slack &&
           x[1] <= hi_x + slack;
  }
  bool ball_admissible(const Point& c, double r) const override {
    return admissible(Point(c[0] - r, c[1] - r)) && admissible(Point(c[0] + r, c[1] + r));
  }

  double value(const Point& x) const override {
    Cell cell = locate(x);
    return bilinear(cell, [&](int i, int j) { return node(i, j); });
  }
  Point gradient(const Point& x) const override {
    Cell cell = locate(x);
    double gx = bilinear(cell, [&](int i, int j) { return fd_x(i, j); });
    double gy = bilinear(cell, [&](int i, int j) { return fd_y(i, j); });
    return Point(gx, gy);
  }
  double laplacian(const Point& x) const override {
    Cell cell = locate(x);
    return bilinear(cell, [&](int i, int j) { return fd_lap(i, j); });
  }
  Mat3 hessian(const Point& x) const override {
    Cell cell = locate(x);
    Mat3 m;
    m(0, 0) = bilinear(cell, [&](int i, int j) { return fd_xx(i, j); });
    m(1, 1) = bilinear(cell, [&](int i, int j) { return fd_yy(i, j); });
    m(0, 1) = m(1, 0) = bilinear(cell, [&](int i, int j) { return fd_xy(i, j); });
    return m;
  }
  Equation natural_equation() const override { return eq_; }

 private:
  struct Cell {
    int i, j;
    double tx, ty;  // local coordinates in [0, 1]
  };

  Cell locate(const Point& x) const {
    if (!admissible(x))
      throw DomainError(name_ + ": point outside the inset grid interior");
    const int N = sol_->nodes;
    const double h = sol_->h;
    // interpolation corners stay at least one node away from the boundary
    auto clampi = [&](double t) {
      int i = static_cast<int>(std::floor(t));
      return std::min(std::max(i, 1), N - 3);
    };
    double sx = (x[0] - sol_->a) / h, sy = (x[1] - sol_->a) / h;
    Cell c;
    c.i = clampi(sx);
    c.j = clampi(sy);
    c.tx = sx - c.i;
    c.ty = sy - c.j;
    return c;
  }

  template <typename F>
  double bilinear(const Cell& c, F&& f) const {
    double f00 = f(c.i, c.j), f10 = f(c.i + 1, c.j);
    double f01 = f(c.i, c.j + 1), f11 = f(c.i + 1, c.j + 1);
    return (1 - c.tx) * (1 - c.ty) * f00 + c.tx * (1 - c.ty) * f10 +
           (1 - c.tx) * c.ty * f01 + c.tx * c.ty * f11;
  }

  double node(int i, int j) const { return sol_->at(i, j); }
  double fd_x(int i, int j) const { return (node(i + 1, j) - node(i - 1, j)) / (2 * sol_->h); }
  double fd_y(int i, int j) const { return (node(i, j + 1) - node(i, j - 1)) / (2 * sol_->h); }
  double fd_lap(int i, int j) const {
    return (node(i + 1, j) + node(i - 1, j) + node(i, j + 1) + node(i, j - 1) -
            4.0 * node(i, j)) /
           (sol_->h * sol_->h);
  }
  double fd_xx(int i, int j) const {
    return (node(i + 1, j) - 2.0 * node(i, j) + node(i - 1, j)) / (sol_->h * sol_->h);
  }
  double fd_yy(int i, int j) const {
    return (node(i, j + 1) - 2.0 * node(i, j) + node(i, j - 1)) / (sol_->h * sol_->h);
  }
  double fd_xy(int i, int j) const {
    return (node(i + 1, j + 1) - node(i - 1, j + 1) - node(i + 1, j - 1) +
            node(i - 1, j - 1)) /
           (4.0 * sol_->h * sol_->h);
  }

 public:
  double discretization_scale() const override { return sol_->h; }

 private:
  std::shared_ptr<const GridSolution> sol_;
  Equation eq_;
  std::string name_;
};

}  // namespace

ScalarField to_field(const GridSolution& sol) {
  if (sol.nodes < 5 || sol.values.size() != static_cast<size_t>(sol.nodes) * sol.nodes)
    throw ParameterError("to_field: malformed grid solution");
  auto shared = std::make_shared<GridSolution>(sol);
  return ScalarField(std::make_shared<GridField>(shared, sol.equation));
}

// ---------------------------------------------------------------------------

std::vector<double> convergence_study(const BVP& base, const ScalarField& exact,
                                      const SolveOptions& options) {
  std::vector<double> errors;
  for (int level = 0; level < 3; ++level) {
    BVP bvp = base;
    bvp.nodes = (base.nodes - 1) * (1 << level) + 1;
    GridSolution sol = solve(bvp, options);
    double err = 0.0;
    for (int j = 1; j < bvp.nodes - 1; ++j) {
      for (int i = 1; i < bvp.nodes - 1; ++i) {
        Point x(bvp.a + i * sol.h, bvp.a + j * sol.h);
        err = std::max(err, std::abs(sol.at(i, j) - exact.value(x)));
      }
    }
    errors.push_back(err);
  }
  return {std::log2(errors[0] / errors[1]), std::log2(errors[1] / errors[2])};
}

// ---------------------------------------------------------------------------

void save_grid(const GridSolution& sol, const std::string& path) {
  std::ostringstream os;
  os << "2 " << sol.nodes << " " << sol.nodes << " " << format_g17(sol.h) << " "
     << format_g17(sol.a) << " " << format_g17(sol.a) << "\n";
  for (int j = 0; j < sol.nodes; ++j) {
    for (int i = 0; i < sol.nodes; ++i) {
      if (i) os << " ";
      os << format_g17(sol.at(i, j));
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

GridSolution load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_grid: cannot open '" + path + "'");
  int n = 0, rows = 0, cols = 0;
  double h = 0, x0 = 0, y0 = 0;
  if (!(in >> n >> rows >> cols >> h >> x0 >> y0) || n != 2 || rows != cols || rows < 5)
    throw ConfigError("load_grid: malformed header in '" + path + "'");
  GridSolution sol;
  sol.a = x0;
  sol.b = x0 + (cols - 1) * h;
  sol.nodes = rows;
  sol.h = h;
  sol.values.resize(static_cast<size_t>(rows) * cols);
  for (auto& v : sol.values)
    if (!(in >> v)) throw ConfigError("load_grid: truncated values in '" + path + "'");
  return sol;
}

}  // namespace freqlab
