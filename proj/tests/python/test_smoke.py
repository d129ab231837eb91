"""Smoke tests for the freqlab python module (run by ctest with PYTHONPATH
pointing at the build tree)."""

import math
import sys

import freqlab as fl


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def test_catalog_and_eval():
    f = fl.make_field("harmonic:2d:k=2:cos")
    assert f.dim == 2
    approx(f.value([1.0, 1.0]), 0.0, 1e-15)
    u, grad, lap = f.eval([0.5, 0.25])
    approx(u, 0.5**2 - 0.25**2, 1e-15)
    approx(grad[0], 1.0, 1e-15)
    approx(lap, 0.0, 1e-15)
    assert len(fl.field_catalog()) >= 8

    d = fl.make_field("drift-exp:b=1,0")
    approx(fl.pde_residual(d, [0.5, 0.2], equation="drift", b=[1.0, 0.0]), 0.0, 1e-13)


def test_degree_law():
    f = fl.make_field("harmonic:2d:k=3:cos")
    radii = [0.1 * (10.0 ** (i / 9.0)) for i in range(10)]
    profile = fl.sweep_profile(f, [0.0, 0.0], radii)
    for F in profile.frequencies("classical"):
        assert F is not None
        approx(F, 3.0, 1e-9)


def test_checks_and_reports():
    f = fl.make_field("harmonic:2d:k=2:cos")
    radii = [0.5 * (2.0 ** (i / 20.0)) for i in range(21)]
    profile = fl.sweep_profile(f, [0.0, 0.0], radii)
    rep = fl.check_monotone_F(profile, 1e-9)
    assert rep.passed, rep.details
    harnack = fl.check_harnack(profile, 0.5, 1.0, 1e-9)
    assert harnack.passed
    approx(harnack.lhs, math.pi, 1e-12)
    gamma, beta, vrep = fl.vanishing_order(profile, 1.0)
    approx(beta, 4.0, 1e-9)
    approx(gamma, math.pi, 1e-9)
    assert vrep.passed
    text = fl.render_report([rep, harnack, vrep])
    assert "summary: PASS 3/3" in text


def test_drift_constants():
    c = fl.drift_constants(2.0, 1.0, 2, 0.9)
    approx(c.r2, 0.225, 1e-15)
    approx(c.alpha, 2.7, 1e-15)
    approx(c.beta, 0.405, 1e-15)


def test_weak_doubling():
    f = fl.make_field("affine:a=1,0:c=0")
    radii = [0.1 * (10.0 ** (i / 119.0)) for i in range(120)]
    profile = fl.sweep_profile(f, [0.0, 0.0], radii, p=3.0)
    r_star, rep = fl.check_weak_doubling(profile)
    assert rep.passed
    approx(r_star / 0.1, math.sqrt(2.0), 0.03)


def test_solver_roundtrip():
    sol = fl.solve("laplace", boundary="harmonic:2d:k=3:cos", nodes=65)
    assert sol.residual <= 1e-10
    field = sol.to_field()
    radii = [0.1 + 0.05 * i for i in range(6)]
    profile = fl.sweep_profile(field, [0.5, 0.5], radii)
    rep = fl.check_monotone_F(profile, 1e-3)
    assert rep.passed, rep.details
    csv = fl.profile_csv(profile)
    assert csv.startswith("r,I,D,H,F,F_drift,Ip,Dp,F_p,F_p_tilde,rn_residual")


def test_errors_surface_as_exceptions():
    try:
        fl.make_field("p-radial:p=2")
    except Exception as e:
        assert "p == n" in str(e)
    else:
        raise AssertionError("expected an error for p == n")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok: {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
