import numpy as np
import pytest

from reeblab import leaves, model, orbits
from reeblab.errors import (
    OutsideEnergyCap,
    SlowConvergence,
    UnreliableWinding,
)
from reeblab.leaves import INTERVALS, LeafGrid, LeafProfile

EPS = 0.5


def test_energy_cap_roots(params):
    xp, xm = leaves.solve_xbar(params)
    assert 2 * EPS < xp < 2.0
    assert xm < 0.0
    assert abs(model.h2_eval(params, xp, 0.0) - 0.5) < 1e-12
    assert abs(model.h2_eval(params, xm, 0.0) - 0.5) < 1e-12
    assert abs(leaves.f_squared(params, xm)) < 1e-10


def test_energy_cap_small_epsilon_trend():
    p = model.HamiltonianParams.from_preset("validated", 0.01)
    orbits.validate_structure(p)
    xp, xm = leaves.solve_xbar(p)
    assert abs(xp - 1.0) < 0.02
    assert abs(xm + 1.0) < 0.02


def test_profile_rhs_signs(params, trio):
    p3 = trio[2].z2_datum[0]
    p1 = trio[0].z2_datum[0]
    xp, _ = leaves.solve_xbar(params)
    assert leaves.profile_rhs(params, p3) == 0.0
    assert abs(leaves.profile_rhs(params, xp)) < 1e-9
    for g in np.linspace(p3 + 0.02, xp - 0.02, 9):
        assert leaves.profile_rhs(params, g) < 0.0
    for g in np.linspace(p1 + 0.02, p3 - 0.02, 9):
        assert leaves.profile_rhs(params, g) > 0.0


def test_profile_rhs_outside_cap(params):
    xp, _ = leaves.solve_xbar(params)
    with pytest.raises(OutsideEnergyCap):
        leaves.profile_rhs(params, xp + 0.1)


def test_profiles_monotone_with_correct_asymptotes(params):
    want = {
        "disk_to_P2": ("removable", "P2"),
        "cyl_P2_P1": ("P1", "P2"),
        "cyl_P3_P1": ("P1", "P3"),
        "plane_to_P3": ("removable", "P3"),
    }
    for iid in INTERVALS:
        prof = leaves.integrate_profile(params, iid)
        diffs = np.diff(prof.g)
        assert np.all(diffs > 0) or np.all(diffs < 0)
        assert np.all(np.diff(prof.a) > 0)
        assert (prof.asymptote_neg, prof.asymptote_pos) == want[iid]
        assert np.all(prof.f >= 0.0)
        # energy relation holds on the grid by construction
        assert np.max(np.abs(prof.f**2
                             - leaves.f_squared(params, prof.g))) < 1e-14


def test_profile_slow_convergence_guard(params):
    with pytest.raises(SlowConvergence):
        leaves.integrate_profile(params, "plane_to_P3", s_span=0.5)


def test_leaf_samples_on_surface(params):
    prof = leaves.integrate_profile(params, "cyl_P3_P1")
    grid = leaves.assemble_leaf(params, prof, 64)
    h, _, _ = model.hamiltonian_eval(params, grid.u.reshape(-1, 4))
    assert np.max(np.abs(h - 0.5)) < 1e-10


def test_leaf_loops_are_circles(params):
    prof = leaves.integrate_profile(params, "plane_to_P3")
    grid = leaves.assemble_leaf(params, prof, 64)
    mid = len(prof.s) // 2
    radii = np.hypot(grid.u[mid, :, 0], grid.u[mid, :, 1])
    assert np.allclose(radii, prof.f[mid], atol=1e-14)
    assert np.allclose(grid.u[mid, :, 2], prof.g[mid], atol=1e-14)


def test_cap_end_collapses_to_point(params):
    prof = leaves.integrate_profile(params, "plane_to_P3")
    xp, _ = leaves.solve_xbar(params)
    grid = leaves.assemble_leaf(params, prof, 64)
    cap_loop = grid.u[0]
    assert np.max(np.linalg.norm(
        cap_loop - np.array([0, 0, xp, 0]), axis=-1)) < 2e-3


def test_asymptotic_loop_hausdorff_distance(params, trio):
    prof = leaves.integrate_profile(params, "plane_to_P3")
    grid = leaves.assemble_leaf(params, prof, 128)
    orbit_pts = trio[2].curve(512)
    end_loop = grid.u[-1]
    d = np.min(np.linalg.norm(end_loop[:, None, :] - orbit_pts[None, :, :],
                              axis=-1), axis=1)
    assert np.max(d) < 1e-4


def test_energy_and_mass_bookkeeping(params, trio, atlas):
    t1, t2, t3 = (o.reeb_period for o in trio)
    diag = {iid: atlas["leaves"][iid]["diagnostics"] for iid in INTERVALS}
    assert diag["plane_to_P3"].hofer_energy == pytest.approx(t3, abs=1e-6)
    assert diag["plane_to_P3"].mass_neg_end == pytest.approx(0.0, abs=1e-6)
    assert diag["cyl_P3_P1"].hofer_energy == pytest.approx(t3, abs=1e-6)
    assert diag["cyl_P3_P1"].mass_neg_end == pytest.approx(t1, abs=1e-6)
    assert diag["cyl_P2_P1"].hofer_energy == pytest.approx(t2, abs=1e-6)
    assert diag["cyl_P2_P1"].mass_neg_end == pytest.approx(t1, abs=1e-6)
    assert diag["disk_to_P2"].hofer_energy == pytest.approx(t2, abs=1e-6)
    assert diag["disk_to_P2"].mass_neg_end == pytest.approx(0.0, abs=1e-6)
    # area identity: total d(lambda)-area is the difference of the ends
    assert diag["plane_to_P3"].dlambda_area == pytest.approx(t3, abs=1e-6)
    assert diag["cyl_P3_P1"].dlambda_area == pytest.approx(t3 - t1, abs=1e-6)


def test_cr_residual_second_order(params):
    for iid in INTERVALS:
        prof = leaves.integrate_profile(params, iid)
        grid = leaves.assemble_leaf(params, prof, 128)
        d1 = leaves.leaf_diagnostics(params, grid)
        prof2 = leaves.integrate_profile(params, iid, n_s=2 * len(prof.s) - 1)
        grid2 = leaves.assemble_leaf(params, prof2, 256)
        d2 = leaves.leaf_diagnostics(params, grid2)
        ratio = d1.cr_residual_max / d2.cr_residual_max
        assert 3.5 <= ratio <= 4.5, (iid, ratio)


def test_asymptotic_windings_all_one(atlas):
    for iid in INTERVALS:
        d = atlas["leaves"][iid]["diagnostics"]
        assert d.wind_infty_pos == 1
        if atlas["leaves"][iid]["profile"].asymptote_neg != "removable":
            assert d.wind_infty_neg == 1


def test_unreliable_winding_guard(params):
    prof = leaves.integrate_profile(params, "plane_to_P3")
    grid = leaves.assemble_leaf(params, prof, 64)
    with pytest.raises(UnreliableWinding):
        leaves.leaf_diagnostics(params, grid, wind_floor=1e9)


def test_strong_sections_at_orbit_ends(params):
    for iid in INTERVALS:
        prof = leaves.integrate_profile(params, iid)
        grid = leaves.assemble_leaf(params, prof, 128)
        ends = [("pos", prof.asymptote_pos), ("neg", prof.asymptote_neg)]
        for end, label in ends:
            if label == "removable":
                continue
            res = leaves.strong_section_check(params, grid, end)
            assert res["verdict"] == "strong", (iid, end)
            # decaying approach at positive ends, growing at negative ones
            assert res["verdict_sign"] == ("-" if end == "pos" else "+")


def test_strong_section_rejects_removable_end(params):
    prof = leaves.integrate_profile(params, "plane_to_P3")
    grid = leaves.assemble_leaf(params, prof, 64)
    with pytest.raises(ValueError):
        leaves.strong_section_check(params, grid, "neg")


def test_flow_invariant_surface_fails_strong_check(params, trio):
    """A surface whose radial section is carried by the linearized flow has
    vanishing pairing: the strong-section verdict must be 'fails'."""
    from reeblab.czindex import analytic_monodromy_oracle, \
        hyperbolic_eigenvectors

    p2 = trio[1]
    path = analytic_monodromy_oracle(params, "P2", orbit=p2)
    vm, _, _ = hyperbolic_eigenvectors(path)
    n_t = 64
    taus = np.arange(n_t) / n_t
    mats = path.value(taus)
    v = np.einsum("nij,j->ni", mats, vm)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    # embed the section into space along the orbit and build a ribbon
    pts = p2.point(taus * p2.reeb_period)
    basis = np.stack([model.rho_frame_basis(params, z) for z in pts])
    vec4 = np.einsum("nij,nj->ni", basis, v)
    s = np.array([-1e-3, 0.0, 1e-3])
    u = pts[None, :, :] + s[:, None, None] * vec4[None, :, :]
    prof = LeafProfile(interval_id="ribbon", s=s, g=u[:, 0, 2],
                       f=np.hypot(u[:, 0, 0], u[:, 0, 1]),
                       a=np.zeros(3), asymptote_neg="P2",
                       asymptote_pos="P2", endpoints=(0.0, 0.0))
    grid = LeafGrid(profile=prof, t=taus, u=u, a=np.zeros(3))
    res = leaves.strong_section_check(params, grid, "pos")
    assert res["verdict"] == "fails"


def test_atlas_roles_and_index_arithmetic(atlas):
    entries = atlas["leaves"]
    assert entries["disk_to_P2"]["fredholm_index"] == 1
    assert entries["cyl_P2_P1"]["fredholm_index"] == 1
    assert entries["cyl_P3_P1"]["fredholm_index"] == 2
    assert entries["plane_to_P3"]["fredholm_index"] == 2
    for iid in INTERVALS:
        assert entries[iid]["wind_pi"] == 0
    assert "disk" in entries["disk_to_P2"]["role"]
    assert "cylinder" in entries["cyl_P2_P1"]["role"]
    assert set(atlas["binding_orbits"]) == {"P1", "P2", "P3"}
    assert "conjectural" in atlas["separatrix_shadow"]["status"]
    assert atlas["homoclinic_report"]["end_distance_forward"] <= 1e-4


def test_leaf_transverse_to_flow(params, atlas):
    """The projected leaf is transverse to the Reeb direction: at interior
    nodes the projected derivatives never both vanish."""
    grid = atlas["leaves"]["cyl_P3_P1"]["grid"]
    u = grid.u
    ds = grid.profile.s[1] - grid.profile.s[0]
    dt = grid.t[1] - grid.t[0]
    u_s = (u[2:] - u[:-2]) / (2 * ds)
    u_t = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1))[1:-1] / (2 * dt)
    pts = u[1:-1].reshape(-1, 4)
    fr = model.contact_frame(params, pts)
    pi_us = fr.project(u_s.reshape(-1, 4))
    pi_ut = fr.project(u_t.reshape(-1, 4))
    total = np.linalg.norm(pi_us, axis=-1) + np.linalg.norm(pi_ut, axis=-1)
    assert np.min(total) > 0.0
