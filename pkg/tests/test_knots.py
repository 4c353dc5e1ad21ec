import numpy as np
import pytest

from reeblab import knots, model, orbits
from reeblab.errors import (
    NoSafePole,
    OffsetTooLarge,
    RoundingUnsafe,
    VanishingSection,
)


def test_hopf_circles_link_once():
    c1, c2 = knots.hopf_circles(1024)
    raw, lk = knots.gauss_linking(c1, c2)
    assert lk == 1
    assert abs(raw - 1) < 5e-3


def test_orientation_reversal_negates():
    c1, c2 = knots.hopf_circles(512)
    raw_f, lk_f = knots.gauss_linking(c1, c2)
    raw_r, lk_r = knots.gauss_linking(c1.reversed(), c2)
    assert lk_r == -lk_f
    assert raw_r == pytest.approx(-raw_f, abs=1e-12)


def test_symmetry_of_raw_values():
    c1, c2 = knots.hopf_circles(512)
    raw_a, _ = knots.gauss_linking(c1, c2)
    raw_b, _ = knots.gauss_linking(c2, c1)
    assert raw_a == pytest.approx(raw_b, abs=1e-9)


def test_binding_orbits_pairwise_unlinked(params, trio):
    for i in range(3):
        for j in range(i + 1, 3):
            ca = knots.orbit_curve(trio[i], 1024)
            cb = knots.orbit_curve(trio[j], 1024)
            raw, lk = knots.gauss_linking(ca, cb)
            assert lk == 0
            assert abs(raw) < 0.05


def test_self_linking_is_minus_one(params, trio):
    for orbit in trio:
        assert knots.self_linking(params, orbit) == -1


def test_self_linking_offset_trend(params, trio):
    """Shrinking the push-off keeps the raw value pinned at the integer."""
    orbit = trio[1]
    curve = knots.orbit_curve(orbit, 1024)
    xbar1, _ = model.frame_sections(params, curve.samples)
    raws = []
    for offset in (0.04, 0.02, 0.01):
        pushed = knots.pushoff(params, curve, xbar1, offset=offset)
        raw, lk = knots.gauss_linking(curve, pushed)
        assert lk == -1
        raws.append(raw)
    assert abs(raws[-1] + 1) < 0.05
    assert abs(raws[-1] + 1) <= abs(raws[0] + 1) + 5e-3


def test_self_linking_frame_independent_spot_check(params, trio):
    """Push-off along the other global frame section gives the same value
    (the contact structure is trivial, so the framing class is fixed)."""
    orbit = trio[2]
    curve = knots.orbit_curve(orbit, 1024)
    _, xbar2 = model.frame_sections(params, curve.samples)
    pushed = knots.pushoff(params, curve, xbar2, offset=0.01)
    raw, lk = knots.gauss_linking(curve, pushed)
    assert lk == -1


def test_seifert_framing_control(params, trio):
    """Push-off along a constant planar direction spans the axis disk
    framing, so the linking vanishes."""
    orbit = trio[1]
    curve = knots.orbit_curve(orbit, 1024)
    section = np.tile([0.0, 0.0, 0.0, 1.0], (curve.n, 1))
    pushed = knots.pushoff(params, curve, section, offset=0.02)
    raw, lk = knots.gauss_linking(curve, pushed)
    assert lk == 0
    assert abs(raw) < 0.05


def test_pole_independence(trio):
    ca = knots.orbit_curve(trio[0], 512)
    cb = knots.orbit_curve(trio[2], 512)
    lks = {knots.gauss_linking(ca, cb, seed=s)[1] for s in (0, 7, 23)}
    assert lks == {0}
    c1, c2 = knots.hopf_circles(512)
    lks = {knots.gauss_linking(c1, c2, seed=s)[1] for s in (0, 7, 23)}
    assert lks == {1}


def test_quadrature_convergence(params, trio):
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = trio[i], trio[j]
            raw_lo, _ = knots.gauss_linking(knots.orbit_curve(a, 512),
                                            knots.orbit_curve(b, 512))
            raw_hi, _ = knots.gauss_linking(knots.orbit_curve(a, 1024),
                                            knots.orbit_curve(b, 1024))
            assert abs(raw_hi - raw_lo) <= 1e-3
    h_lo, _ = knots.gauss_linking(*knots.hopf_circles(512))
    h_hi, _ = knots.gauss_linking(*knots.hopf_circles(1024))
    assert abs(h_hi - h_lo) <= 1e-3


def test_orbit_curves_are_dense_enough(trio):
    for orbit in trio:
        curve = knots.orbit_curve(orbit, 1024)
        assert curve.max_gap() <= 5e-2


def test_projection_pole_clearance(params, trio):
    curves = [knots.orbit_curve(o, 256) for o in trio]
    pole, projected = knots.stereographic_project(curves, seed=0)
    cloud = np.vstack([c.samples / np.linalg.norm(c.samples, axis=1,
                                                  keepdims=True)
                       for c in curves])
    assert np.min(np.linalg.norm(cloud - pole, axis=1)) > 0.1
    assert len(projected) == 3


def test_no_safe_pole_raises(trio):
    with pytest.raises(NoSafePole):
        knots.stereographic_project([knots.orbit_curve(trio[1], 128)],
                                    seed=0, pole_tol=10.0)


def test_pushoff_guards(params, trio):
    curve = knots.orbit_curve(trio[1], 256)
    zero_section = np.zeros((curve.n, 4))
    with pytest.raises(VanishingSection):
        knots.pushoff(params, curve, zero_section, offset=0.01)
    xbar1, _ = model.frame_sections(params, curve.samples)
    with pytest.raises(OffsetTooLarge):
        knots.pushoff(params, curve, xbar1, offset=1e-8)


def test_rounding_guard():
    # two curves forced so close that the quadrature is meaningless
    t = 2 * np.pi * np.arange(64) / 64
    c1 = knots.ClosedCurve(np.stack([np.cos(t), np.sin(t), 0 * t, 0 * t], -1))
    wob = 0.5 + 0.45 * np.sin(7 * t)
    c2 = knots.ClosedCurve(np.stack([wob * np.cos(t), wob * np.sin(t),
                                     0.05 * np.cos(t), 0.05 * np.sin(t)], -1))
    with pytest.raises((RoundingUnsafe, NoSafePole)):
        knots.gauss_linking(c1, c2)
