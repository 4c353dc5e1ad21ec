"""Critical points, special Reeb orbits, planar loops, separatrices.

The planar factor of the Hamiltonian has (for the validated coefficients)
exactly three critical points on the symmetry axis; over each sits a circle
of the full flow, giving the three binding orbits.  This module finds and
classifies the critical points, builds the orbits with their closed-form
periods, measures actions of general product loops, scans resonant levels
for low-action competitors, and traces the saddle separatrix whose product
with the base circle is the homoclinic set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_CONFIG
from .errors import (
    HypothesisFailure,
    NoReturn,
    NotClosed,
    NotHyperbolic,
    StructureMismatch,
)
from . import model
from .model import HamiltonianParams, Trajectory


@dataclass
class CriticalPoint:
    """A critical point of the planar factor with both classifications:
    the Hessian signature of H2 and the elliptic/hyperbolic type of the
    transverse Reeb linearization (constants k1, k2 on the axis)."""

    location: np.ndarray
    h2_value: float
    hessian_signature: str  # 'min' | 'max' | 'saddle'
    flow_type: str  # 'elliptic' | 'hyperbolic'
    k1: Optional[float]
    k2: Optional[float]

    @property
    def on_axis(self) -> bool:
        return self.k1 is not None


@dataclass
class StructureReport:
    """Result of validating the critical-point pattern of a parameter set."""

    points: list
    count_ok: bool
    pattern_ok: bool
    anomalies: list

    @property
    def ok(self) -> bool:
        return self.count_ok and self.pattern_ok


@dataclass
class ReebOrbit:
    """A closed Reeb orbit of product type: a planar datum and the circle
    radius r with r^2 = 1 - 2*H2(datum)."""

    label: str
    z2_datum: np.ndarray
    r: float
    reeb_period: float
    m1: int = 1
    m2: int = 0
    multiplicity: int = 1
    k1: Optional[float] = None
    k2: Optional[float] = None

    @property
    def initial_state(self) -> np.ndarray:
        return np.array([self.r, 0.0, self.z2_datum[0], self.z2_datum[1]])

    def point(self, t):
        """State at Reeb time(s) t (special orbits only)."""
        t = np.asarray(t, float)
        ang = 2.0 * t / (self.r * self.r)
        x = self.z2_datum
        return np.stack(
            [self.r * np.cos(ang), self.r * np.sin(ang),
             np.broadcast_to(x[0], t.shape), np.broadcast_to(x[1], t.shape)],
            axis=-1,
        )

    def curve(self, n: int) -> np.ndarray:
        """n samples over one period, endpoint excluded."""
        return self.point(np.arange(n) / n * self.reeb_period)


@dataclass
class SeparatrixBranch:
    branch_id: str  # 'gamma1' | 'gamma2'
    samples: np.ndarray  # planar points on the zero level of H2
    launch_vector: np.ndarray
    enclosed_area: float
    axis_crossings: np.ndarray = field(default_factory=lambda: np.zeros(0))


# ---------------------------------------------------------------------------
# critical points


def _axis_roots(p: HamiltonianParams) -> np.ndarray:
    """Real roots of Q(x, 0) = x (2 x^2 + 3 eps a x + 2 eps^2 c) = 0."""
    e = p.epsilon
    disc = 9.0 * p.a * p.a - 16.0 * p.c
    roots = [0.0]
    if disc >= 0.0:
        s = np.sqrt(disc)
        roots += [e * (-3.0 * p.a + s) / 4.0, e * (-3.0 * p.a - s) / 4.0]
    return np.array(sorted(roots))


def _newton_grid_critical(p: HamiltonianParams, n_grid: int = 41,
                          crit_tol: float = None, max_iter: int = 60):
    """Newton on grad(H2) seeded on a grid over [-4 eps, 4 eps]^2; catches
    critical points off the symmetry axis."""
    cfg = DEFAULT_CONFIG
    crit_tol = cfg.crit_tol if crit_tol is None else crit_tol
    e = p.epsilon
    g = np.linspace(-4 * e, 4 * e, n_grid)
    xx, yy = np.meshgrid(g, g)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    for _ in range(max_iter):
        q, pp = model.h2_grad(p, pts[:, 0], pts[:, 1])
        grad = np.stack([q, pp], axis=-1)
        hess = model.h2_hess(p, pts[:, 0], pts[:, 1])
        det = hess[:, 0, 0] * hess[:, 1, 1] - hess[:, 0, 1] ** 2
        ok = np.abs(det) > 1e-14
        step = np.zeros_like(pts)
        inv00 = hess[ok, 1, 1] / det[ok]
        inv01 = -hess[ok, 0, 1] / det[ok]
        inv11 = hess[ok, 0, 0] / det[ok]
        step[ok, 0] = inv00 * grad[ok, 0] + inv01 * grad[ok, 1]
        step[ok, 1] = inv01 * grad[ok, 0] + inv11 * grad[ok, 1]
        pts = pts - step
    q, pp = model.h2_grad(p, pts[:, 0], pts[:, 1])
    res = np.hypot(q, pp)
    keep = (res <= crit_tol) & (np.max(np.abs(pts), axis=-1) <= 6 * e)
    return pts[keep]


def _merge_points(pts: np.ndarray, merge_tol: float) -> np.ndarray:
    merged: list = []
    for pt in pts:
        for m in merged:
            if np.hypot(pt[0] - m[0], pt[1] - m[1]) < merge_tol:
                break
        else:
            merged.append(pt)
    return np.array(merged)


def classify_critical_point(p: HamiltonianParams, loc) -> CriticalPoint:
    """Exact-polynomial Hessian classification plus the transverse Reeb
    linearization constants (axis points only)."""
    x, y = float(loc[0]), float(loc[1])
    val = float(model.h2_eval(p, x, y))
    hess = model.h2_hess(p, x, y)
    det = hess[0, 0] * hess[1, 1] - hess[0, 1] ** 2
    if det < 0:
        signature = "saddle"
    elif hess[0, 0] > 0:
        signature = "min"
    else:
        signature = "max"
    flow_type = "hyperbolic" if det < 0 else "elliptic"
    k1 = k2 = None
    if abs(y) < 1e-12:
        r2 = 1.0 - 2.0 * val
        if r2 > 0:
            h = 2.0 / r2
            k1 = float(-h * hess[1, 1])
            k2 = float(h * hess[0, 0])
    return CriticalPoint(np.array([x, y]), val, signature, flow_type, k1, k2)


def find_critical_points(p: HamiltonianParams, crit_tol: float = None,
                         merge_tol: float = None) -> list:
    """All critical points of H2: closed-form axis roots polished by Newton,
    plus a full-plane Newton grid as a safety net, deduplicated."""
    cfg = DEFAULT_CONFIG
    crit_tol = cfg.crit_tol if crit_tol is None else crit_tol
    merge_tol = cfg.merge_tol if merge_tol is None else merge_tol
    roots = _axis_roots(p)
    axis = np.stack([roots, np.zeros(len(roots))], axis=-1)
    grid = _newton_grid_critical(p, crit_tol=crit_tol)
    pts = _merge_points(np.concatenate([axis, grid]) if len(grid) else axis,
                        merge_tol)
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    return [classify_critical_point(p, pt) for pt in pts]


def validate_structure(p: HamiltonianParams) -> StructureReport:
    """Check the expected pattern: exactly three critical points, on the
    axis at 0 < p1 < p3, with transverse sign pattern (+,-), (+,+), (-,+).

    The report is cached on the parameter record; it never raises, so a
    failing preset can still be diagnosed downstream.
    """
    points = find_critical_points(p)
    anomalies = []
    count_ok = len(points) == 3
    if not count_ok:
        anomalies.append(
            f"expected 3 critical points, found {len(points)}"
        )
    pattern_ok = False
    axis_pts = [cp for cp in points if abs(cp.location[1]) < 1e-10]
    by_x = sorted(axis_pts, key=lambda cp: cp.location[0])
    if len(by_x) == 3 and abs(by_x[0].location[0]) < 1e-10:
        origin, mid, outer = by_x[0], by_x[1], by_x[2]
        signs = [
            (int(np.sign(mid.k1)), int(np.sign(mid.k2))),
            (int(np.sign(origin.k1)), int(np.sign(origin.k2))),
            (int(np.sign(outer.k1)), int(np.sign(outer.k2))),
        ]
        pattern_ok = signs == [(1, -1), (1, 1), (-1, 1)]
        if not pattern_ok:
            anomalies.append(f"transverse sign pattern {signs} != [(+,-),(+,+),(-,+)]")
            if origin.flow_type != "hyperbolic":
                anomalies.append(
                    "origin is elliptic (k1*k2 = "
                    f"{origin.k1 * origin.k2:.6g} < 0 requires c*d < 0)"
                )
    else:
        anomalies.append("axis pattern 0 = p2 < p1 < p3 not found")
    report = StructureReport(points=points, count_ok=count_ok,
                             pattern_ok=pattern_ok, anomalies=anomalies)
    p.structure = report
    return report


# ---------------------------------------------------------------------------
# special orbits


def special_orbits(p: HamiltonianParams):
    """The three binding orbits (P1, P2, P3), labeled by the transverse sign
    pattern so the index pattern (1, 2, 3) holds, with closed-form periods.

    Requires a previously validated structure.  Raises HypothesisFailure
    naming the violated inequality if the period chain T1 < T2 < T3 < 2 T1
    fails, and StructureMismatch if the sign pattern does not match.
    """
    if p.structure is None:
        validate_structure(p)
    rep = p.structure
    if not rep.ok:
        raise StructureMismatch("; ".join(rep.anomalies) or "structure invalid")
    axis_pts = sorted(
        (cp for cp in rep.points if abs(cp.location[1]) < 1e-10),
        key=lambda cp: cp.location[0],
    )
    origin, mid, outer = axis_pts

    def build(label, cp):
        r2 = 1.0 - 2.0 * cp.h2_value
        return ReebOrbit(
            label=label,
            z2_datum=cp.location.copy(),
            r=float(np.sqrt(r2)),
            reeb_period=float(np.pi * r2),
            k1=cp.k1,
            k2=cp.k2,
        )

    p1 = build("P1", mid)
    p2 = build("P2", origin)
    p3 = build("P3", outer)
    if not p1.reeb_period < p2.reeb_period:
        raise HypothesisFailure("T1 < T2 violated")
    if not p2.reeb_period < p3.reeb_period:
        raise HypothesisFailure("T2 < T3 violated")
    if not p3.reeb_period < 2.0 * p1.reeb_period:
        raise HypothesisFailure("T3 < 2*T1 violated")
    return p1, p2, p3


def orbit_action(curve: np.ndarray, orbit_tol: float = None) -> float:
    """Action integral of lambda0 over a sampled closed loop.

    The loop is given as uniformly-parametrized samples (n, 4) with the
    endpoint omitted; tangents are computed by centered differences, so the
    composite quadrature is spectrally accurate for smooth loops.
    """
    cfg = DEFAULT_CONFIG
    orbit_tol = cfg.orbit_tol if orbit_tol is None else orbit_tol
    curve = np.asarray(curve, float)
    n = len(curve)
    if n < 8:
        raise ValueError("need at least 8 samples")
    closure = np.linalg.norm(curve[0] - curve[-1])
    typical = np.median(np.linalg.norm(np.diff(curve, axis=0), axis=-1))
    if closure > 10 * max(typical, orbit_tol):
        raise NotClosed(f"loop closure gap {closure:g}")
    # fourth-order periodic tangents keep the composite quadrature error
    # at O(h^4)
    tangent = (
        8.0 * (np.roll(curve, -1, axis=0) - np.roll(curve, 1, axis=0))
        - (np.roll(curve, -2, axis=0) - np.roll(curve, 2, axis=0))
    ) * (n / 12.0)
    vals = model.lambda0(curve, tangent)
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# planar machinery


def planar_rhs(p: HamiltonianParams):
    # plain-float arithmetic: this closure is the hot path of every planar
    # integration (periods, separatrices, level tracing)
    e, a, b, c, d = p.epsilon, p.a, p.b, p.c, p.d

    def rhs(t, z):
        x = float(z[0])
        y = float(z[1])
        r2 = x * x + y * y
        q = 2.0 * x * r2 + 3.0 * e * a * x * x + e * b * y * y \
            + 2.0 * e * e * c * x
        pp = 2.0 * y * r2 + 2.0 * e * b * x * y + 2.0 * e * e * d * y
        return (-pp, q)

    return rhs


def axis_level_seeds(p: HamiltonianParams, level: float) -> np.ndarray:
    """All real roots of H2(x, 0) = level and H2(0, y) = level, as planar
    seeds for enumerating the components of the level set."""
    e = p.epsilon
    seeds = []
    rx = np.roots([0.5, e * p.a, e * e * p.c, 0.0, -level])
    for r in rx:
        if abs(r.imag) < 1e-10:
            seeds.append((float(r.real), 0.0))
    ry = np.roots([0.5, 0.0, e * e * p.d, 0.0, -level])
    for r in ry:
        if abs(r.imag) < 1e-10 and abs(r.real) > 1e-12:
            seeds.append((0.0, float(r.real)))
    return np.array(seeds) if seeds else np.zeros((0, 2))


def planar_period_and_area(
    p: HamiltonianParams,
    level: float,
    seed,
    max_time: float = None,
    tol: float = 1e-10,
    level_tol: float = None,
    n_loop: int = 2048,
):
    """Hamiltonian-time period and enclosed signed area of the planar loop
    of H2 through `seed` on the given level.

    Return (tau, area, loop).  The period is detected by a directional
    crossing of the section through the seed orthogonal to the flow,
    filtered by proximity to the seed; raises NoReturn with the elapsed
    horizon when no crossing returns (near-separatrix divergence).
    """
    cfg = DEFAULT_CONFIG
    max_time = cfg.return_horizon if max_time is None else max_time
    level_tol = cfg.level_tol if level_tol is None else level_tol
    seed = np.asarray(seed, float)
    if abs(float(model.h2_eval(p, seed[0], seed[1])) - level) > max(
        100 * level_tol, 1e-8 * max(1.0, abs(level))
    ):
        raise ValueError("seed is not on the requested level")
    rhs = planar_rhs(p)
    v0 = np.array(rhs(0.0, seed))
    speed = np.linalg.norm(v0)
    if speed < 1e-12:
        raise ValueError("seed is a critical point")
    v0n = v0 / speed

    def section(t, z):
        return (z[0] - seed[0]) * v0n[0] + (z[1] - seed[1]) * v0n[1]

    section.direction = 1.0

    # integrate in chunks so far-away crossings of the section line do not
    # force a full-horizon integration before the proximity filter runs
    chunk = 64.0
    pieces = []
    t0, z = 0.0, np.array(seed, float)
    tau = None
    while t0 < max_time and tau is None:
        t1 = min(t0 + chunk, max_time)
        sol = solve_ivp(rhs, (t0, t1), z, method="DOP853",
                        rtol=tol, atol=tol * 1e-2,
                        events=section, dense_output=True)
        pieces.append(sol)
        for te in sol.t_events[0]:
            if te < 1e-9:
                continue
            ze = sol.sol(te)
            if np.hypot(ze[0] - seed[0], ze[1] - seed[1]) \
                    < 0.05 * max(1.0, speed):
                tau = float(te)
                break
        t0, z = float(sol.t[-1]), sol.y[:, -1]
    if tau is None:
        raise NoReturn("no return to the section", elapsed=t0)

    ts = np.arange(n_loop) / n_loop * tau
    loop = np.empty((n_loop, 2))
    lo = 0
    for sol in pieces:
        hi = np.searchsorted(ts, sol.t[-1], side="right")
        hi = max(hi, lo)
        if lo < hi:
            loop[lo:hi] = sol.sol(ts[lo:hi]).T
        lo = hi
    if lo < n_loop:
        loop[lo:] = pieces[-1].sol(ts[lo:]).T
    tangent = (np.roll(loop, -1, axis=0) - np.roll(loop, 1, axis=0)) \
        * (0.5 * n_loop / tau)
    area = float(np.mean(
        0.5 * (loop[:, 0] * tangent[:, 1] - loop[:, 1] * tangent[:, 0])
    ) * tau)
    return tau, area, loop


def claim_hessian_period(
    p: HamiltonianParams,
    loop: np.ndarray,
    t_ham: float,
    claim_tol: float = None,
):
    """Audit of the universal lower bound h_sup * T >= 2 pi for nonconstant
    periodic Hamiltonian-time solutions, where h_sup is the sup of the
    Hessian operator norm along the loop.

    Accepts planar loops (n, 2), audited against the planar Hessian, or
    full product loops (n, 4) audited against the 4x4 Hessian.  Returns a
    dict {h_sup, t_ham, product, pass}.
    """
    cfg = DEFAULT_CONFIG
    claim_tol = cfg.claim_tol if claim_tol is None else claim_tol
    loop = np.asarray(loop, float)
    if loop.shape[-1] == 2:
        hess = model.h2_hess(p, loop[:, 0], loop[:, 1])
    elif loop.shape[-1] == 4:
        _, _, hess = model.hamiltonian_eval(p, loop)
    else:
        raise ValueError("loop must have 2 or 4 columns")
    if np.max(np.linalg.norm(np.diff(loop, axis=0), axis=-1)) == 0.0:
        raise ValueError("constant loop is not a nonconstant periodic solution")
    norms = np.linalg.norm(hess, ord=2, axis=(-2, -1))
    h_sup = float(np.max(norms))
    product = h_sup * float(t_ham)
    return {
        "h_sup": h_sup,
        "t_ham": float(t_ham),
        "product": product,
        "pass": bool(product >= 2.0 * np.pi - claim_tol),
    }


def claim1_check(p: HamiltonianParams, orbit_or_loop, t_ham: float = None,
                 claim_tol: float = None):
    """Run the Hessian-period audit on a ReebOrbit (whose planar datum is
    constant, so the Hamiltonian period is 2 pi) or an explicit loop."""
    if isinstance(orbit_or_loop, ReebOrbit):
        n = 512
        ang = 2.0 * np.pi * np.arange(n) / n
        x = orbit_or_loop.z2_datum
        loop = np.stack(
            [orbit_or_loop.r * np.cos(ang), orbit_or_loop.r * np.sin(ang),
             np.full(n, x[0]), np.full(n, x[1])], axis=-1)
        return claim_hessian_period(p, loop, 2.0 * np.pi, claim_tol=claim_tol)
    if t_ham is None:
        raise ValueError("t_ham required for explicit loops")
    return claim_hessian_period(p, orbit_or_loop, t_ham, claim_tol=claim_tol)


# ---------------------------------------------------------------------------
# resonant level scan


def _dedupe_components(p: HamiltonianParams, level: float, seeds: np.ndarray,
                       loops: list) -> list:
    """Keep one representative seed per level-set component by checking
    which seeds lie on an already-traced loop."""
    kept = []
    for i, (seed, loop) in enumerate(zip(seeds, loops)):
        duplicate = False
        for _, other in kept:
            d = np.min(np.hypot(other[:, 0] - seed[0], other[:, 1] - seed[1]))
            if d < 1e-4:
                duplicate = True
                break
        if not duplicate:
            kept.append((seed, loop))
    return kept


def resonant_orbit_scan(
    p: HamiltonianParams,
    action_bound: float,
    level_lo: float = None,
    level_hi: float = None,
    n_levels: int = None,
    m2_cap: int = None,
    resonance_tol: float = None,
):
    """Scan planar levels for closed product orbits of small action.

    For each level C in the grid and each component of the level set, the
    planar period tau(C) and enclosed area are measured; a closed product
    orbit needs m1 / m2 = tau(C) / (2 pi), and its action is
    m1 * pi * (1 - 2C) + m2 * area.  The scan emits every candidate with a
    conservative minimal action <= action_bound (m1 rounded up to the next
    admissible ratio within the resonance tolerance).  An empty result is
    the success mode.  Levels whose loops do not return in the horizon are
    recorded as diagnostics.
    """
    cfg = DEFAULT_CONFIG
    m2_cap = cfg.m2_cap if m2_cap is None else m2_cap
    resonance_tol = cfg.resonance_tol if resonance_tol is None else resonance_tol
    n_levels = cfg.scan_levels if n_levels is None else n_levels
    if p.structure is None:
        validate_structure(p)
    axis_pts = sorted(
        (cp for cp in p.structure.points if abs(cp.location[1]) < 1e-10),
        key=lambda cp: cp.location[0],
    )
    vals = sorted(cp.h2_value for cp in axis_pts)
    if level_lo is None:
        level_lo = vals[0]
    if level_hi is None:
        level_hi = vals[-1]
    crit_locs = np.array([cp.location for cp in p.structure.points])

    candidates = []
    diagnostics = []
    for k in range(n_levels):
        level = level_lo + (k + 0.5) * (level_hi - level_lo) / n_levels
        seeds = axis_level_seeds(p, level)
        loops = []
        entries = []
        for seed in seeds:
            d_crit = np.min(np.hypot(crit_locs[:, 0] - seed[0],
                                     crit_locs[:, 1] - seed[1]))
            if d_crit < 1e-6:
                continue  # special orbits excluded: nonconstant planar scan
            try:
                tau, area, loop = planar_period_and_area(p, level, seed)
            except NoReturn as exc:
                diagnostics.append({"level": level, "seed": tuple(seed),
                                    "status": "no-return",
                                    "elapsed": exc.elapsed})
                continue
            entries.append((seed, tau, area, loop))
            loops.append(loop)
        comp = _dedupe_components(p, level, [e[0] for e in entries],
                                  [e[3] for e in entries])
        comp_seeds = {tuple(np.round(s, 10)) for s, _ in comp}
        for seed, tau, area, loop in entries:
            if tuple(np.round(seed, 10)) not in comp_seeds:
                continue
            best = None
            for m2 in range(1, m2_cap + 1):
                m1 = int(np.ceil(m2 * tau / (2.0 * np.pi) - resonance_tol))
                m1 = max(m1, 1)
                action = m1 * np.pi * (1.0 - 2.0 * level) + m2 * abs(area)
                if best is None or action < best[0]:
                    best = (action, m1, m2)
            action, m1, m2 = best
            claim = claim_hessian_period(p, loop, tau)
            if action <= action_bound:
                candidates.append({
                    "level": level, "seed": tuple(seed), "m1": m1, "m2": m2,
                    "tau": tau, "area": area, "action": action,
                    "claim_pass": claim["pass"], "loop": loop,
                })
            else:
                diagnostics.append({
                    "level": level, "seed": tuple(seed), "status": "excluded",
                    "tau": tau, "area": area, "min_action": action,
                    "claim_pass": claim["pass"],
                })
    return candidates, diagnostics


def product_loop(p: HamiltonianParams, planar_loop: np.ndarray, tau: float,
                 level: float, m1: int, m2: int, n: int = 2048) -> np.ndarray:
    """Closed product curve: the planar loop traversed m2 times while the
    base circle of radius sqrt(1 - 2C) turns m1 times; the base speed is
    adjusted so the curve closes exactly (resonance surrogate)."""
    r = np.sqrt(1.0 - 2.0 * level)
    ts = np.arange(n) / n
    idx = (ts * m2 * len(planar_loop)).astype(int) % len(planar_loop)
    z2 = planar_loop[idx]
    ang = 2.0 * np.pi * m1 * ts
    return np.stack([r * np.cos(ang), r * np.sin(ang), z2[:, 0], z2[:, 1]],
                    axis=-1)


# ---------------------------------------------------------------------------
# separatrix and homoclinics


def saddle_eigendirections(p: HamiltonianParams):
    """Unstable/stable unit eigenvectors of the planar Hamiltonian-time
    linearization [[0, -2 eps^2 d], [2 eps^2 c, 0]] at the origin."""
    e = p.epsilon
    prod = -4.0 * e**4 * p.c * p.d
    if prod <= 0:
        raise NotHyperbolic("origin is not a hyperbolic critical point")
    mu = np.sqrt(prod)
    # rows: (dx, dy)' = (-2 eps^2 d * y, 2 eps^2 c * x)
    v_unst = np.array([-2.0 * e * e * p.d, mu])
    v_unst /= np.linalg.norm(v_unst)
    v_stab = np.array([2.0 * e * e * p.d, mu])
    v_stab /= np.linalg.norm(v_stab)
    return v_unst, v_stab, mu


def _trace_branch(p: HamiltonianParams, direction: np.ndarray, offset: float,
                  horizon: float, tol: float = 1e-13):
    # the return approach reaches the detection radius only if the level
    # drift over the excursion stays well below offset^2, hence the tight
    # tolerances here
    rhs = planar_rhs(p)
    z0 = offset * direction
    # detection radius a hair inside the launch radius so the event function
    # is positive at the start
    radius = offset * (1.0 - 1e-9)

    def back_home(t, z):
        return np.hypot(z[0], z[1]) - radius

    back_home.terminal = True
    back_home.direction = -1.0

    def x_axis(t, z):
        return z[1]

    sol = solve_ivp(rhs, (0.0, horizon), z0, method="DOP853",
                    rtol=tol, atol=1e-16,
                    events=[back_home, x_axis], dense_output=True)
    if not len(sol.t_events[0]):
        raise NoReturn("separatrix branch did not return to the saddle",
                       elapsed=float(sol.t[-1]))
    t_end = float(sol.t_events[0][0])
    ts = np.linspace(0.0, t_end, 4001)
    samples = sol.sol(ts).T
    crossings = np.array(
        [sol.sol(te)[0] for te in sol.t_events[1] if 0.0 < te < t_end]
    )
    closed = np.vstack([[0.0, 0.0], samples, [0.0, 0.0]])
    area = 0.5 * float(np.sum(
        closed[:-1, 0] * closed[1:, 1] - closed[1:, 0] * closed[:-1, 1]
    ))
    return samples, crossings, area, t_end


def distance_to_orbit_set(orbit: ReebOrbit, states: np.ndarray) -> np.ndarray:
    """Euclidean distance from states to the orbit circle as a point set."""
    states = np.atleast_2d(states)
    r12 = np.hypot(states[:, 0], states[:, 1])
    dz2 = np.hypot(states[:, 2] - orbit.z2_datum[0],
                   states[:, 3] - orbit.z2_datum[1])
    return np.sqrt((r12 - orbit.r) ** 2 + dz2**2)


def separatrix_and_homoclinics(
    p: HamiltonianParams,
    launch_offset: float = None,
    horizon: float = None,
    planar_horizon: float = None,
):
    """Trace both separatrix branches of the planar saddle and build the
    product homoclinic trajectory with its convergence report.

    The branches gamma1 (inner loop) and gamma2 (outer loop) are launched a
    small offset along the unstable eigendirection; the homoclinic is the
    Reeb-flow trajectory over the launch point, integrated both time
    directions for `horizon`, with end distances to the hyperbolic binding
    orbit reported.
    """
    cfg = DEFAULT_CONFIG
    launch_offset = cfg.launch_offset if launch_offset is None else launch_offset
    horizon = cfg.homoclinic_horizon if horizon is None else horizon
    planar_horizon = cfg.return_horizon if planar_horizon is None else planar_horizon
    v_unst, v_stab, _ = saddle_eigendirections(p)

    branches = {}
    for sign in (+1.0, -1.0):
        samples, crossings, area, t_end = _trace_branch(
            p, sign * v_unst, launch_offset, planar_horizon)
        pos = crossings[crossings > 1e-6]
        key = float(np.min(pos)) if len(pos) else np.inf
        branches[sign] = (samples, crossings, area, t_end, key)
    # gamma1 is the branch with the smaller positive-axis crossing
    if branches[+1.0][4] <= branches[-1.0][4]:
        inner_sign, outer_sign = +1.0, -1.0
    else:
        inner_sign, outer_sign = -1.0, +1.0

    def mk(branch_id, sign):
        samples, crossings, area, _, _ = branches[sign]
        return SeparatrixBranch(
            branch_id=branch_id,
            samples=samples,
            launch_vector=sign * v_unst,
            enclosed_area=area,
            axis_crossings=np.sort(crossings[crossings > 1e-6]),
        )

    gamma1 = mk("gamma1", inner_sign)
    gamma2 = mk("gamma2", outer_sign)

    # product homoclinic in the full phase space, parametrized from the
    # symmetric apex of the inner loop (its positive-axis crossing) so both
    # time directions are pure decay legs toward the hyperbolic orbit
    x_apex = float(gamma1.axis_crossings[0])
    r = float(np.sqrt(1.0 - 2.0 * model.h2_eval(p, x_apex, 0.0)))
    z0 = np.array([r, 0.0, x_apex, 0.0])
    fwd, _ = model.integrate_flow(p, z0, horizon, time_kind="reeb",
                                  tol=1e-13, n_samples=800, method="DOP853")
    bwd, _ = model.integrate_flow(p, z0, -horizon, time_kind="reeb",
                                  tol=1e-13, n_samples=800, method="DOP853")
    states = np.vstack([bwd.states[::-1], fwd.states[1:]])
    ts = np.concatenate([bwd.t[::-1], fwd.t[1:]])
    traj = Trajectory(t=ts, states=states, time_kind="reeb",
                      energy_drift=max(fwd.energy_drift, bwd.energy_drift))
    orbit_p2 = ReebOrbit(label="P2", z2_datum=np.zeros(2), r=1.0,
                         reeb_period=float(np.pi))
    report = {
        "end_distance_forward": float(distance_to_orbit_set(
            orbit_p2, fwd.states[-1][None, :])[0]),
        "end_distance_backward": float(distance_to_orbit_set(
            orbit_p2, bwd.states[-1][None, :])[0]),
        "horizon": float(horizon),
    }
    return (gamma1, gamma2), traj, report
