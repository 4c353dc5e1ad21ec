import numpy as np
import pytest

from reeblab import knots, model, orbits
from reeblab.errors import (
    HypothesisFailure,
    NoReturn,
    NotClosed,
    StructureMismatch,
)
from reeblab.model import HamiltonianParams

EPS = 0.5


def test_axis_roots_against_polynomial_oracle(params):
    # oracle: numpy companion-matrix roots of Q(x, 0)
    e, a, c = EPS, -5.0 / 3.0, 1.0
    roots = np.sort(np.roots([2.0, 3 * e * a, 2 * e * e * c, 0.0]))
    locs = np.sort([cp.location[0] for cp in params.structure.points])
    assert np.allclose(locs, roots, atol=1e-12)
    assert np.allclose(roots, [0.0, EPS / 2, 2 * EPS], atol=1e-12)


def test_critical_point_classification(params):
    by_x = sorted(params.structure.points, key=lambda cp: cp.location[0])
    origin, mid, outer = by_x
    assert origin.hessian_signature == "saddle"
    assert origin.flow_type == "hyperbolic"
    assert mid.hessian_signature == "max"
    assert mid.flow_type == "elliptic"
    assert outer.hessian_signature == "min"
    assert outer.flow_type == "elliptic"
    # ordering of the critical values brackets zero
    assert outer.h2_value < 0.0 < mid.h2_value


def test_transverse_constants_closed_form(params):
    by_x = sorted(params.structure.points, key=lambda cp: cp.location[0])
    origin = by_x[0]
    e, c, d = EPS, 1.0, -1.0 / 8.0
    h = 2.0  # r = 1 over the origin
    assert origin.k1 == pytest.approx(-2 * h * e * e * d, rel=1e-12)
    assert origin.k2 == pytest.approx(2 * h * e * e * c, rel=1e-12)
    assert origin.k1 * origin.k2 > 0  # hyperbolic iff c d < 0


def test_figure_preset_structure(params_figure):
    rep = params_figure.structure
    assert not rep.count_ok
    assert len(rep.points) == 5
    origin = min(rep.points, key=lambda cp: np.hypot(*cp.location))
    assert origin.flow_type == "elliptic"
    assert origin.k1 * origin.k2 < 0
    with pytest.raises(StructureMismatch):
        orbits.special_orbits(params_figure)


def test_special_orbit_periods_closed_forms(trio):
    p1, p2, p3 = trio
    assert p2.reeb_period == pytest.approx(np.pi, abs=1e-15)
    assert p1.reeb_period == pytest.approx(np.pi * (1 - 7 * EPS**4 / 48),
                                           abs=1e-12)
    assert p3.reeb_period == pytest.approx(np.pi * (1 + 8 * EPS**4 / 3),
                                           abs=1e-12)
    assert p1.reeb_period < p2.reeb_period < p3.reeb_period \
        < 2 * p1.reeb_period


def test_on_surface_radii(params, trio):
    for orbit in trio:
        h2 = float(model.h2_eval(params, *orbit.z2_datum))
        assert orbit.r**2 == pytest.approx(1.0 - 2.0 * h2, abs=1e-10)
    assert trio[1].r == pytest.approx(1.0, abs=1e-15)


def test_period_chain_fails_at_large_epsilon():
    p = HamiltonianParams.from_preset("validated", 1.2)
    orbits.validate_structure(p)
    with pytest.raises(HypothesisFailure, match="2\\*T1"):
        orbits.special_orbits(p)


def test_orbits_reintegrate_to_closure(params, trio):
    for orbit in trio:
        traj, _ = model.integrate_flow(params, orbit.initial_state,
                                       orbit.reeb_period, tol=1e-11)
        assert np.linalg.norm(traj.states[-1] - orbit.initial_state) < 1e-7


def test_action_equals_period(trio):
    for orbit in trio:
        action = orbits.orbit_action(orbit.curve(2048))
        assert action == pytest.approx(orbit.reeb_period, abs=1e-9)


def test_action_of_point_loop_is_zero():
    loop = np.tile([0.3, 0.1, 0.2, 0.0], (64, 1))
    assert orbits.orbit_action(loop) == 0.0


def test_action_rejects_open_curve():
    t = np.linspace(0, 1.5 * np.pi, 64)
    arc = np.stack([np.cos(t), np.sin(t), 0 * t, 0 * t], axis=-1)
    with pytest.raises(NotClosed):
        orbits.orbit_action(arc)


def test_planar_period_near_elliptic_point(params):
    # oracle: linearized frequency sqrt(det Hess) at the outer center
    outer = max(params.structure.points, key=lambda cp: cp.location[0])
    hess = model.h2_hess(params, outer.location[0], outer.location[1])
    omega = np.sqrt(np.linalg.det(hess))
    level = outer.h2_value * 0.999 + 0.001 * 0.0
    seeds = orbits.axis_level_seeds(params, level)
    seed = seeds[np.argmin(np.abs(seeds[:, 0] - outer.location[0]))]
    tau, area, _ = orbits.planar_period_and_area(params, level, seed)
    assert tau == pytest.approx(2 * np.pi / omega, rel=2e-2)
    assert abs(area) < 1e-3


def test_planar_period_exceeds_base_period(params):
    """Every planar loop in the scan window is slower than the base circle;
    this is what forces multiplicity m1 >= 2 for resonant products."""
    vals = sorted(cp.h2_value for cp in params.structure.points)
    lo, hi = vals[0], vals[-1]
    for level in np.linspace(lo + 1e-3, hi - 1e-4, 7):
        for seed in orbits.axis_level_seeds(params, level):
            q, pp = model.h2_grad(params, seed[0], seed[1])
            if np.hypot(q, pp) < 1e-9:
                continue
            tau, _, _ = orbits.planar_period_and_area(params, level, seed)
            assert tau > 2 * np.pi


def test_no_return_with_short_horizon(params):
    with pytest.raises(NoReturn) as err:
        orbits.planar_period_and_area(params, -1e-5,
                                      orbits.axis_level_seeds(params, -1e-5)[0],
                                      max_time=5.0)
    assert err.value.elapsed is not None


def test_scan_empty_at_top_period(params, trio):
    cands, diags = orbits.resonant_orbit_scan(params, trio[2].reeb_period,
                                              n_levels=12)
    assert cands == []
    assert all(d.get("claim_pass", True) for d in diags)


def test_scan_candidates_cross_checked_by_action_quadrature(params):
    cands, _ = orbits.resonant_orbit_scan(params, 10.0, n_levels=12)
    assert cands
    for cand in cands[:4]:
        loop4 = orbits.product_loop(params, cand["loop"], cand["tau"],
                                    cand["level"], cand["m1"], cand["m2"],
                                    n=4096)
        action = orbits.orbit_action(loop4)
        expected = cand["m1"] * np.pi * (1 - 2 * cand["level"]) \
            + cand["m2"] * cand["area"]
        assert action == pytest.approx(expected, abs=1e-6)


def test_scan_skips_critical_seeds(params):
    vals = sorted(cp.h2_value for cp in params.structure.points)
    # a grid collapsed onto the top critical value has its degenerate seed
    # dropped rather than producing a bogus candidate
    cands, _ = orbits.resonant_orbit_scan(
        params, 100.0, level_lo=vals[-1] - 1e-15, level_hi=vals[-1],
        n_levels=1)
    assert all(abs(c["level"] - vals[-1]) > 1e-16 for c in cands)


def test_claim_bound_on_base_orbit(params, trio):
    res = orbits.claim1_check(params, trio[1])
    assert res["h_sup"] >= 1.0
    assert res["product"] >= 2 * np.pi - 1e-9
    assert res["pass"]


def test_claim_bound_on_planar_loop(params):
    mid = max(params.structure.points, key=lambda cp: cp.h2_value)
    level = mid.h2_value / 2
    seeds = orbits.axis_level_seeds(params, level)
    seed = seeds[np.argmin(np.abs(seeds[:, 0] - mid.location[0]))]
    tau, _, loop = orbits.planar_period_and_area(params, level, seed)
    res = orbits.claim1_check(params, loop, t_ham=tau)
    assert res["pass"]


def test_claim_rejects_constant_loop(params):
    loop = np.tile([0.2, 0.0], (16, 1))
    with pytest.raises(ValueError):
        orbits.claim1_check(params, loop, t_ham=1.0)


def test_separatrix_crossings_match_quadratic_roots(separatrix):
    # oracle: roots of x^2/2 + eps a x + eps^2 c = 0 (nonzero factor of the
    # planar function restricted to the axis)
    (g1, g2), _, _ = separatrix
    a, c = -5.0 / 3.0, 1.0
    disc = np.sqrt(a * a - 2 * c)
    r_small = EPS * (-a - disc)
    r_large = EPS * (-a + disc)
    assert g1.axis_crossings[0] == pytest.approx(r_small, abs=1e-8)
    assert g2.axis_crossings[0] == pytest.approx(r_large, abs=1e-8)


def test_separatrix_on_zero_level(separatrix, params):
    (g1, g2), _, _ = separatrix
    for br in (g1, g2):
        vals = model.h2_eval(params, br.samples[::40, 0], br.samples[::40, 1])
        assert np.max(np.abs(vals)) < 1e-8


def test_homoclinic_converges_to_binding_orbit(separatrix):
    _, traj, report = separatrix
    assert report["end_distance_forward"] <= 1e-4
    assert report["end_distance_backward"] <= 1e-4


def test_stable_direction_backward_gives_same_branches(params, separatrix):
    """The stable and unstable manifolds coincide; tracing the stable
    eigendirection backward lands on the same branch set."""
    (g1, g2), _, _ = separatrix
    v_unst, v_stab, _ = orbits.saddle_eigendirections(params)
    from scipy.integrate import solve_ivp

    rhs = orbits.planar_rhs(params)
    crossings = []
    for sign in (+1, -1):
        z0 = sign * 1e-6 * v_stab

        def x_axis(t, z):
            return z[1]

        sol = solve_ivp(rhs, (0.0, -400.0), z0, method="DOP853", rtol=1e-12,
                        atol=1e-15, events=x_axis, dense_output=True)
        xs = [float(sol.sol(te)[0]) for te in sol.t_events[0]
              if abs(sol.sol(te)[0]) > 1e-4]
        crossings.extend(xs[:1])
    got = np.sort(np.array(crossings))
    expected = np.sort(np.concatenate([g1.axis_crossings[:1],
                                       g2.axis_crossings[:1]]))
    assert np.allclose(got, expected, atol=1e-7)


def test_homoclinic_stays_on_surface(separatrix):
    _, traj, _ = separatrix
    assert traj.energy_drift < 1e-9


def test_resonant_level_loop_links_outer_orbit(params, trio):
    """Product loops over levels above the top critical value must cross the
    axis disk spanning the outer orbit."""
    level = 0.1
    seeds = orbits.axis_level_seeds(params, level)
    seed = seeds[np.argmax(seeds[:, 0])]
    tau, area, loop = orbits.planar_period_and_area(params, level, seed)
    loop4 = orbits.product_loop(params, loop, tau, level, m1=3, m2=1)
    raw, lk = knots.gauss_linking(knots.ClosedCurve(loop4),
                                  knots.orbit_curve(trio[2], 1024))
    assert lk != 0
