"""Smoke test for the lhdef Python module.

Build and install first, e.g. from crates/python:
    maturin develop --release
then run:
    python python/smoke_test.py
"""

import math
import pathlib

import lhdef

ROOT = pathlib.Path(__file__).resolve().parent.parent


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert close(lhdef.shc(0.0), 1.0, 1e-15)
    assert close(lhdef.shc(1.0), math.sinh(1.0), 1e-15)

    p2 = lhdef.ClassSystem("P2")
    assert p2.tag == "P2" and p2.c == 4.0
    for p in p2.sample_points(50, seed=1):
        h1, h2, h3 = p2.hamiltonians(p)
        assert close(h1 * h3 - h2 * h2, p2.c / 4.0, 1e-12)

    for tag in ("P2", "I4", "I5"):
        sys = lhdef.ClassSystem(tag)
        for z in (0.05, 0.3, 1.0):
            d = sys.deform(z)
            for p in sys.sample_points(20, seed=2):
                assert close(d.casimir_level(p), sys.c / 4.0, 1e-11)
                for lhs, rhs in zip(d.commutators(p), d.predicted_commutators(p)):
                    assert close(lhs[0], rhs[0], 1e-8) and close(lhs[1], rhs[1], 1e-8)

    d = lhdef.DeformedSystem("I5", 0.2)
    q = [0.1, 1.3, -0.4, 1.7]
    assert math.isfinite(d.coupled_invariant(q))
    try:
        d.hamiltonians([0.0, 0.0])
    except lhdef.DomainError:
        pass
    else:
        raise AssertionError("expected DomainError at y = 0")

    names = [name for name, _ in lhdef.presets()]
    assert names == ["constant", "polynomial", "sinusoid"], names
    curves = [lhdef.Curve.constant(1.0), lhdef.Curve.polynomial([0.0, 0.2]), lhdef.Curve.sinusoid(0.02, 2.0, offset=0.05)]
    assert close(curves[1](2.0), 0.4, 1e-15)
    traj = d.integrate(curves, q, t1=1.0, dt=1e-3)
    assert len(traj) == 1001 and not traj.truncated
    assert traj.coupled_drift < 1e-7, traj.coupled_drift
    single = d.integrate(curves, [0.3, 1.2], t1=0.5, dt=1e-2)
    assert single.coupled_drift is None and len(single.states[0]) == 2

    report = lhdef.verify("P2", [0.0, 0.3], seed=7)
    assert report.passed, report.render()
    assert report.flagged == ["commutator [X2,X3] with shc^2 factor"], report.flagged
    assert not lhdef.verify("P2", [0.1], tol_scale=1e-300).passed

    csv = lhdef.limit_scan("I4", [0.1, 0.05], "1,2,-1,0,5").splitlines()
    assert len(csv) == 3
    ratio_h2 = float(csv[2].split(",")[8])
    assert 3.4 <= ratio_h2 <= 4.6, ratio_h2
    try:
        lhdef.limit_scan("I4", grid="1,2,3")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for a malformed grid")

    text, truncated = lhdef.run_scenario(ROOT / "configs" / "i5_polynomial_seeded.toml")
    assert not truncated and text.startswith("t,")

    print("python smoke test: OK")


if __name__ == "__main__":
    main()
