#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "dewet2d/assembly.hpp"
#include "dewet2d/schemes.hpp"

using namespace dewet;

namespace {

constexpr double kPi = 3.14159265358979323846;

PolygonalCurve semicircle(int n, double r = 1.0) {
  std::vector<Vec2> pts(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double theta = kPi * (1.0 - static_cast<double>(j) / n);
    pts[j] = Vec2(r * std::cos(theta), r * std::sin(theta));
  }
  PolygonalCurve c(std::move(pts));
  c.enforce_contacts();
  return c;
}

PolygonalCurve random_film(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> jit(-0.25, 0.25);
  PolygonalCurve c = semicircle(n, 1.5);
  for (int j = 1; j < n; ++j) {
    c.nodes[j] += Vec2(jit(rng) / n, jit(rng) / n);
  }
  return c;
}

/// Independent transcription of the weak form: evaluates every matrix entry
/// by applying the inner products to basis vectors, using its own lumped
/// quadrature loop.  Backward Euler flavour only (a = 1, xhat = current).
Eigen::MatrixXd hand_assembled_zjb(const PolygonalCurve& ref,
                                   const SchemeParams& p,
                                   Eigen::VectorXd* rhs_out) {
  const int n = ref.segments();
  const int dim = 3 * n + 1;
  const auto seg = segment_data(ref);

  // <u, n psi>^h for a nodal vector field u and nodal scalar psi.
  auto lumped_vec = [&](const std::vector<Vec2>& u, const NodalField& psi) {
    double acc = 0.0;
    for (int l = 1; l <= n; ++l) {
      acc += 0.5 * seg[l - 1].length *
             (u[l].dot(seg[l - 1].normal) * psi[l] +
              u[l - 1].dot(seg[l - 1].normal) * psi[l - 1]);
    }
    return acc;
  };
  auto stiff = [&](const NodalField& f, const NodalField& g) {
    double acc = 0.0;
    for (int l = 1; l <= n; ++l) {
      acc += (f[l] - f[l - 1]) * (g[l] - g[l - 1]) / seg[l - 1].length;
    }
    return acc;
  };
  auto basis = [&](int i) {
    NodalField e = NodalField::Zero(n + 1);
    e[i] = 1.0;
    return e;
  };
  auto basis_vec = [&](int i, int axis) {
    std::vector<Vec2> e(n + 1, Vec2::Zero());
    e[i][axis] = 1.0;
    return e;
  };

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  const int xoff = n + 1;
  const int yoff = 2 * (n + 1);

  // Motion rows, tested with psi = phi_i.
  for (int i = 0; i <= n; ++i) {
    const NodalField psi = basis(i);
    for (int j = 0; j <= n; ++j) {
      M(i, j) += stiff(basis(j), psi);
      M(i, xoff + j) += lumped_vec(basis_vec(j, 0), psi) / p.tau;
      if (j >= 1 && j <= n - 1) {
        M(i, yoff + j - 1) += lumped_vec(basis_vec(j, 1), psi) / p.tau;
      }
    }
    std::vector<Vec2> xm(ref.nodes.begin(), ref.nodes.end());
    rhs[i] = lumped_vec(xm, psi) / p.tau;
  }
  // Curvature rows, tested with (phi_i, 0) and (0, phi_i).  The kappa
  // columns lump kappa phi_j n against the test function directly.
  for (int i = 0; i <= n; ++i) {
    const int row = (n + 1) + i;
    const NodalField w1 = basis(i);
    for (int j = 0; j <= n; ++j) {
      double acc = 0.0;
      for (int l = 1; l <= n; ++l) {
        const double nx = seg[l - 1].normal.x();
        acc += 0.5 * seg[l - 1].length *
               (basis(j)[l] * nx * w1[l] + basis(j)[l - 1] * nx * w1[l - 1]);
      }
      M(row, j) = acc;
    }
    for (int j = 0; j <= n; ++j) {
      M(row, xoff + j) -= stiff(basis(j), w1);
    }
    if (i == 0) {
      M(row, xoff + 0) -= 1.0 / (p.eta * p.tau);
      rhs[row] = p.sigma - ref.nodes.front().x() / (p.eta * p.tau);
    }
    if (i == n) {
      M(row, xoff + n) -= 1.0 / (p.eta * p.tau);
      rhs[row] = -p.sigma - ref.nodes.back().x() / (p.eta * p.tau);
    }
  }
  for (int i = 1; i <= n - 1; ++i) {
    const int row = 2 * (n + 1) + (i - 1);
    const NodalField w2 = basis(i);
    for (int j = 0; j <= n; ++j) {
      double acc = 0.0;
      for (int l = 1; l <= n; ++l) {
        const double ny = seg[l - 1].normal.y();
        acc += 0.5 * seg[l - 1].length *
               (basis(j)[l] * ny * w2[l] + basis(j)[l - 1] * ny * w2[l - 1]);
      }
      M(row, j) = acc;
    }
    for (int j = 1; j <= n - 1; ++j) {
      M(row, yoff + j - 1) -= stiff(basis(j), w2);
    }
  }
  if (rhs_out) {
    *rhs_out = rhs;
  }
  return M;
}

StepDescriptor zjb_descriptor(const PolygonalCurve& c, const SchemeParams& p) {
  StepDescriptor d;
  d.reference = c;
  d.a_coeff = 1.0;
  d.xhat = c.nodes;
  d.kappa_mode = KappaMode::Implicit;
  d.params = p;
  return d;
}

} // namespace

TEST_CASE("stiffness_apply on reference cases") {
  // f varies only across the first segment (length 2).
  PolygonalCurve c({{0.0, 0.0}, {2.0, 0.0}, {3.0, 1.0}, {4.0, 0.0}});
  NodalField f(4);
  f << 0.0, 1.0, 1.0, 1.0; // varies only across the first segment
  CHECK(stiffness_apply(c, f, f) == doctest::Approx(0.5));

  NodalField constant = NodalField::Constant(4, 3.25);
  NodalField g = NodalField::Random(4);
  CHECK(stiffness_apply(c, constant, g) == doctest::Approx(0.0));

  PolygonalCurve two({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {2.0, 1.0},
                      {3.0, 0.0}});
  NodalField hat(5);
  hat << 0.0, 1.0, 0.0, 0.0, 0.0;
  CHECK(stiffness_apply(two, hat, hat) == doctest::Approx(2.0));
}

TEST_CASE("stiffness_apply is symmetric, bilinear, positive semidefinite") {
  std::mt19937_64 rng(3);
  const PolygonalCurve c = random_film(rng, 12);
  for (int t = 0; t < 20; ++t) {
    NodalField f = NodalField::Random(13);
    NodalField g = NodalField::Random(13);
    NodalField h = NodalField::Random(13);
    CHECK(stiffness_apply(c, f, g) ==
          doctest::Approx(stiffness_apply(c, g, f)));
    CHECK(stiffness_apply(c, f + 2.0 * h, g) ==
          doctest::Approx(stiffness_apply(c, f, g) +
                          2.0 * stiffness_apply(c, h, g)));
    CHECK(stiffness_apply(c, f, f) >= -1e-14);
    // Kernel is exactly the constants.
    NodalField shifted = f.array() + 5.0;
    CHECK(stiffness_apply(c, shifted, shifted) ==
          doctest::Approx(stiffness_apply(c, f, f)));
  }
}

TEST_CASE("lumped inner product reference cases") {
  PolygonalCurve c({{0.0, 0.0}, {1.0, 1.0}, {2.5, 0.0}});
  const double L = std::sqrt(2.0) + std::sqrt(1.5 * 1.5 + 1.0);
  NodalField ones = NodalField::Constant(3, 1.0);
  CHECK(lumped_inner(c, ones, ones) == doctest::Approx(L));

  NodalField u(3);
  u << 1.0, 0.0, 0.0;
  CHECK(lumped_inner(c, u, ones) == doctest::Approx(std::sqrt(2.0) / 2.0));

  // Per-segment normal against a nodal vector orthogonal to it at node 0.
  PolygonalCurve vert({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.5}, {2.0, 0.0}});
  std::vector<Vec2> v(4, Vec2::Zero());
  v[0] = Vec2(0.0, 1.0); // first normal is (-1, 0)
  CHECK(lumped_normal_inner(vert, v) == doctest::Approx(0.0));
}

TEST_CASE("lumped inner product is symmetric and bilinear") {
  std::mt19937_64 rng(5);
  const PolygonalCurve c = random_film(rng, 9);
  for (int t = 0; t < 20; ++t) {
    NodalField u = NodalField::Random(10);
    NodalField v = NodalField::Random(10);
    NodalField w = NodalField::Random(10);
    CHECK(lumped_inner(c, u, v) == doctest::Approx(lumped_inner(c, v, u)));
    CHECK(lumped_inner(c, u + 3.0 * w, v) ==
          doctest::Approx(lumped_inner(c, u, v) + 3.0 * lumped_inner(c, w, v)));
  }
}

TEST_CASE("well-posedness check") {
  CHECK(well_posedness_check(semicircle(8)));
  // Vertical end segments: normals (-+1, 0), condition (i) holds.
  PolygonalCurve vertical({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}});
  CHECK(well_posedness_check(vertical));
  // Horizontal end segments: normals (0, +-1), condition (i) fails.
  PolygonalCurve horizontal(
      {{0.0, 0.0}, {1.0, 0.0}, {1.5, 1.0}, {2.0, 0.0}, {3.0, 0.0}});
  CHECK_FALSE(well_posedness_check(horizontal));
}

TEST_CASE("assembled system has dimension 3N+1") {
  const PolygonalCurve c = semicircle(3);
  const SchemeParams p = make_params(0.01, 100.0, 2.0);
  const StepSystem sys = assemble(zjb_descriptor(c, p));
  CHECK(sys.matrix.rows() == 10);
  CHECK(sys.matrix.cols() == 10);
  CHECK(sys.rhs.size() == 10);
}

TEST_CASE("assembly matches an independent basis-by-basis transcription") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const PolygonalCurve c = random_film(rng, 3 + trial);
    const SchemeParams p = make_params(0.02, 50.0, 5 * kPi / 6);
    const StepSystem sys = assemble(zjb_descriptor(c, p));
    Eigen::VectorXd rhs_oracle;
    const Eigen::MatrixXd oracle = hand_assembled_zjb(c, p, &rhs_oracle);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
    CHECK((dense - oracle).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sys.rhs - rhs_oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("solver reproduces a dense LU oracle on random systems") {
  std::mt19937_64 rng(13);
  const SchemeParams p = make_params(0.01, 100.0, 5 * kPi / 6);
  for (int trial = 0; trial < 20; ++trial) {
    const PolygonalCurve c = random_film(rng, 8);
    const StepSystem sys = assemble(zjb_descriptor(c, p));
    const StepSolution sol = solve(sys);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
    const Eigen::VectorXd ref = dense.fullPivLu().solve(sys.rhs);
    Eigen::VectorXd mine(sys.rhs.size());
    mine.head(9) = sol.kappa;
    for (int i = 0; i <= 8; ++i) {
      mine[9 + i] = sol.curve.nodes[i].x();
    }
    for (int i = 1; i <= 7; ++i) {
      mine[18 + i - 1] = sol.curve.nodes[i].y();
    }
    CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("solve refuses ill-posed references") {
  PolygonalCurve horizontal(
      {{0.0, 0.0}, {1.0, 0.0}, {1.5, 1.0}, {2.0, 0.0}, {3.0, 0.0}});
  const SchemeParams p = make_params(0.01, 100.0, 2.0);
  CHECK_THROWS_AS(assemble(zjb_descriptor(horizontal, p)), WellPosednessError);
}

TEST_CASE("homogeneous problem has only the trivial solution") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const PolygonalCurve c = random_film(rng, 10);
    const SchemeParams p = make_params(0.05, 20.0, kPi / 3);
    StepSystem sys = assemble(zjb_descriptor(c, p));
    sys.rhs.setZero();
    const StepSolution sol = solve(sys);
    CHECK(sol.kappa.cwiseAbs().maxCoeff() < 1e-12);
    for (const Vec2& q : sol.curve.nodes) {
      CHECK(std::abs(q.x()) < 1e-12);
      CHECK(std::abs(q.y()) < 1e-12);
    }
  }
}

TEST_CASE("assembly is translation-consistent") {
  std::mt19937_64 rng(19);
  const SchemeParams p = make_params(0.01, 100.0, 5 * kPi / 6);
  const PolygonalCurve c = random_film(rng, 14);
  const StepSolution base = solve(assemble(zjb_descriptor(c, p)));
  PolygonalCurve shifted = c;
  const double dx = -2.5;
  for (Vec2& q : shifted.nodes) {
    q.x() += dx;
  }
  const StepSolution moved = solve(assemble(zjb_descriptor(shifted, p)));
  CHECK((moved.kappa - base.kappa).cwiseAbs().maxCoeff() < 1e-9);
  for (std::size_t j = 0; j < c.nodes.size(); ++j) {
    CHECK(moved.curve.nodes[j].x() - base.curve.nodes[j].x() ==
          doctest::Approx(dx).epsilon(1e-9));
    CHECK(moved.curve.nodes[j].y() ==
          doctest::Approx(base.curve.nodes[j].y()).epsilon(1e-9));
  }
}

TEST_CASE("PC corrector solution satisfies the averaged weak form") {
  // Residual oracle: plug the solved state back into the trapezoidal weak
  // equations evaluated with the public inner-product operations.
  std::mt19937_64 rng(23);
  const PolygonalCurve cur = random_film(rng, 10);
  const SchemeParams p = make_params(0.01, 100.0, 5 * kPi / 6);
  const NodalField kap = initial_curvature(cur);
  const StepResult half = zjb_step(cur, p.with_tau(p.tau / 2));

  StepDescriptor d;
  d.reference = half.curve;
  d.a_coeff = 1.0;
  d.xhat = cur.nodes;
  d.kappa_mode = KappaMode::Trapezoidal;
  d.prev_curve = cur;
  d.prev_kappa = kap;
  d.params = p;
  const StepSolution sol = solve(assemble(d));

  const int n = cur.segments();
  const auto seg = segment_data(half.curve);
  const NodalField kavg = 0.5 * (sol.kappa + kap);
  NodalField xavg(n + 1), yavg(n + 1), xdot(n + 1), ydot(n + 1);
  for (int j = 0; j <= n; ++j) {
    xavg[j] = 0.5 * (sol.curve.nodes[j].x() + cur.nodes[j].x());
    yavg[j] = 0.5 * (sol.curve.nodes[j].y() + cur.nodes[j].y());
    xdot[j] = (sol.curve.nodes[j].x() - cur.nodes[j].x()) / p.tau;
    ydot[j] = (sol.curve.nodes[j].y() - cur.nodes[j].y()) / p.tau;
  }
  auto basis = [&](int i) {
    NodalField e = NodalField::Zero(n + 1);
    e[i] = 1.0;
    return e;
  };
  double max_resid = 0.0;
  for (int i = 0; i <= n; ++i) {
    // Motion row: <Xdot, n phi_i>^h + <d_s kavg, d_s phi_i>.
    double lump = 0.0;
    for (int l = 1; l <= n; ++l) {
      const Vec2& nn = seg[l - 1].normal;
      const NodalField phi = basis(i);
      lump += 0.5 * seg[l - 1].length *
              ((xdot[l] * nn.x() + ydot[l] * nn.y()) * phi[l] +
               (xdot[l - 1] * nn.x() + ydot[l - 1] * nn.y()) * phi[l - 1]);
    }
    const double r = lump + stiffness_apply(half.curve, kavg, basis(i));
    max_resid = std::max(max_resid, std::abs(r));
  }
  for (int i = 0; i <= n; ++i) {
    double lump = 0.0;
    for (int l = 1; l <= n; ++l) {
      const Vec2& nn = seg[l - 1].normal;
      const NodalField phi = basis(i);
      lump += 0.5 * seg[l - 1].length *
              (kavg[l] * nn.x() * phi[l] + kavg[l - 1] * nn.x() * phi[l - 1]);
    }
    double r = lump - stiffness_apply(half.curve, xavg, basis(i));
    if (i == 0) {
      r -= (sol.curve.nodes[0].x() - cur.nodes[0].x()) / (p.eta * p.tau);
      r -= p.sigma;
    }
    if (i == n) {
      r -= (sol.curve.nodes[n].x() - cur.nodes[n].x()) / (p.eta * p.tau);
      r += p.sigma;
    }
    max_resid = std::max(max_resid, std::abs(r));
  }
  for (int i = 1; i <= n - 1; ++i) {
    double lump = 0.0;
    for (int l = 1; l <= n; ++l) {
      const Vec2& nn = seg[l - 1].normal;
      const NodalField phi = basis(i);
      lump += 0.5 * seg[l - 1].length *
              (kavg[l] * nn.y() * phi[l] + kavg[l - 1] * nn.y() * phi[l - 1]);
    }
    const double r = lump - stiffness_apply(half.curve, yavg, basis(i));
    max_resid = std::max(max_resid, std::abs(r));
  }
  CHECK(max_resid < 1e-12);
}

TEST_CASE("matrix market dump is readable") {
  const PolygonalCurve c = semicircle(4);
  const SchemeParams p = make_params(0.01, 100.0, 2.0);
  const StepSystem sys = assemble(zjb_descriptor(c, p));
  dump_system(sys, "step_system_dump");
  std::ifstream mtx("step_system_dump.mtx");
  std::string header;
  std::getline(mtx, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  std::ifstream rhs("step_system_dump.rhs.txt");
  CHECK(rhs.good());
  std::remove("step_system_dump.mtx");
  std::remove("step_system_dump.rhs.txt");
}
