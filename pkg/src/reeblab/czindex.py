"""Conley-Zehnder indices of symplectic paths on the contact plane.

The index of a nondegenerate closed orbit is read off the winding interval
of its linearized-flow path: directions of the plane wind by Delta(z) over
one period, the set of windings is a compact interval shorter than 1/2, and
the index is 2k when the interval contains the integer k and 2k+1 when it
lies in (k, k+1).  Values computed in an orbit-adapted frame transfer to the
global trivialization through twice the relative winding of the frames.

Also here: the closed-form transverse linearization over each binding orbit
(an exact matrix-exponential oracle), iteration of paths by the group law,
and the invariant-manifold quadrant classifier for sections along the
hyperbolic orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import (
    DegenerateOrbit,
    NotHyperbolic,
    RoundingUnsafe,
    SamplingTooCoarse,
    VanishingSection,
)
from . import model
from .model import SymplecticPath, _expm_generator
from .orbits import ReebOrbit, special_orbits


@dataclass
class WindingInterval:
    lo: float
    hi: float
    contains_integer: bool
    degenerate_margin: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass
class CZResult:
    mu_local: int
    frame_correction: int
    mu_global: int
    method: str


@dataclass
class EigenFrame:
    """Invariant-manifold frame along a hyperbolic orbit: v_minus spans the
    unstable direction (multiplier beta > 1), v_plus the stable one, ordered
    as a positive basis at every node."""

    orbit: object
    tau: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    multiplier_beta: float


# ---------------------------------------------------------------------------
# winding numbers


def _direction_angles(path: SymplecticPath, dirs: np.ndarray) -> np.ndarray:
    """Unwrapped angle tracks (n_nodes, n_dirs) of Phi(t) applied to unit
    directions; raises SamplingTooCoarse if any per-step increment exceeds
    pi/2 after one refinement."""
    mats = path.mats
    for attempt in range(2):
        vecs = np.einsum("nij,dj->nid", mats, dirs)
        ang = np.arctan2(vecs[:, 1, :], vecs[:, 0, :])
        steps = np.diff(ang, axis=0)
        steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
        if np.max(np.abs(steps)) < 0.5 * np.pi:
            return np.concatenate([ang[:1], ang[:1] + np.cumsum(steps, axis=0)])
        if attempt == 0:
            dense = path.resampled(4 * (path.n_nodes - 1) + 1)
            mats = dense.mats
    raise SamplingTooCoarse("angle increments exceed pi/2 even after refinement")


def winding_number(path: SymplecticPath, z0) -> float:
    """Winding Delta(z0) of the path applied to one direction, in turns."""
    if path.n_nodes < 64:
        raise ValueError("path must carry at least 64 nodes")
    z0 = np.asarray(z0, float)
    z0 = z0 / np.linalg.norm(z0)
    track = _direction_angles(path, z0[None, :])
    return float((track[-1, 0] - track[0, 0]) / (2.0 * np.pi))


def _winding_of_direction_angle(path: SymplecticPath, phis) -> np.ndarray:
    phis = np.atleast_1d(np.asarray(phis, float))
    dirs = np.stack([np.cos(phis), np.sin(phis)], axis=-1)
    track = _direction_angles(path, dirs)
    return (track[-1] - track[0]) / (2.0 * np.pi)


def _golden_refine(f: Callable, lo: float, hi: float, minimize: bool,
                   iters: int = 60):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = f(c) * (1 if minimize else -1)
    fd = f(d) * (1 if minimize else -1)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c) * (1 if minimize else -1)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d) * (1 if minimize else -1)
        if b - a < 1e-12:
            break
    x = 0.5 * (a + b)
    return x, f(x)


def winding_interval(path: SymplecticPath, n_directions: int = None,
                     degen_tol: float = None) -> WindingInterval:
    """Winding interval over a half circle of directions, endpoints sharpened
    by golden-section refinement around the sampled extremes.

    Raises DegenerateOrbit when an endpoint sits within degen_tol of an
    integer (the path's end map has 1 in its spectrum).
    """
    cfg = DEFAULT_CONFIG
    n_directions = cfg.n_directions if n_directions is None else n_directions
    degen_tol = cfg.degen_tol if degen_tol is None else degen_tol
    if n_directions < 128:
        raise ValueError("n_directions must be at least 128")
    phis = np.arange(n_directions) / n_directions * np.pi
    deltas = _winding_of_direction_angle(path, phis)
    h = np.pi / n_directions

    def delta_of(phi):
        return float(_winding_of_direction_angle(path, phi)[0])

    i_min = int(np.argmin(deltas))
    i_max = int(np.argmax(deltas))
    _, lo = _golden_refine(delta_of, phis[i_min] - h, phis[i_min] + h, True)
    _, hi = _golden_refine(delta_of, phis[i_max] - h, phis[i_max] + h, False)
    lo = min(lo, float(np.min(deltas)))
    hi = max(hi, float(np.max(deltas)))
    margin = float(min(np.abs(lo - np.round(lo)), np.abs(hi - np.round(hi))))
    contains = bool(np.floor(hi) >= np.ceil(lo))
    if margin < degen_tol:
        raise DegenerateOrbit(
            f"winding interval endpoint within {margin:g} of an integer")
    return WindingInterval(lo=lo, hi=hi, contains_integer=contains,
                           degenerate_margin=margin)


def cz_index(path: SymplecticPath, frame_correction: int,
             method: str = "winding_interval",
             interval: WindingInterval = None) -> CZResult:
    """Index from the winding interval plus the trivialization correction."""
    if interval is None:
        interval = winding_interval(path)
    if interval.length >= 0.5:
        raise DegenerateOrbit(
            f"winding interval length {interval.length:g} >= 1/2")
    if interval.contains_integer:
        k = int(np.ceil(interval.lo))
        mu_local = 2 * k
    else:
        k = int(np.floor(interval.lo))
        mu_local = 2 * k + 1
    return CZResult(mu_local=mu_local, frame_correction=frame_correction,
                    mu_global=mu_local + 2 * frame_correction, method=method)


# ---------------------------------------------------------------------------
# trivialization change


def trivialization_winding(orbit: ReebOrbit, frame_a: np.ndarray,
                           frame_b: np.ndarray) -> int:
    """Integer winding of the first vector of frame_a expressed in frame_b
    along the orbit; both frames are (n, 4, 2) bases of the contact plane
    at the same nodes.  Raises RoundingUnsafe if the angle sum is farther
    than 0.1 turns from an integer.
    """
    va = frame_a[:, :, 0]
    b1 = frame_b[:, :, 0]
    b2 = frame_b[:, :, 1]
    den = model.dlambda0(b1, b2)
    alpha = model.dlambda0(va, b2) / den
    beta = model.dlambda0(b1, va) / den
    ang = np.arctan2(beta, alpha)
    steps = (np.diff(ang) + np.pi) % (2.0 * np.pi) - np.pi
    total = (np.sum(steps)) / (2.0 * np.pi)
    wind = int(np.round(total))
    if abs(total - wind) >= 0.1:
        raise RoundingUnsafe(f"frame winding {total:g} not close to integer")
    return wind


def special_orbit_frames(p, orbit: ReebOrbit, n: int = 256):
    """(rho frame, global frame) sampled along a special orbit, including
    the closing node; shapes (n+1, 4, 2)."""
    ts = np.arange(n + 1) / n * orbit.reeb_period
    pts = orbit.point(ts)
    rho = np.stack([model.rho_frame_basis(p, z) for z in pts])
    xb1, xb2 = model.frame_sections(p, pts)
    glob = np.stack([xb1, xb2], axis=-1)
    return rho, glob


def frame_correction_for(p, orbit: ReebOrbit, n: int = 256) -> int:
    """Winding of the orbit-adapted frame against the global frame; this is
    the correction added (twice) to frame-local indices."""
    rho, glob = special_orbit_frames(p, orbit, n)
    return trivialization_winding(orbit, rho, glob)


# ---------------------------------------------------------------------------
# analytic oracle and iteration


def analytic_monodromy_oracle(p, which: str, n_samples: int = 256,
                              orbit: ReebOrbit = None) -> SymplecticPath:
    """Exact transverse path over a special orbit from the constant
    linearization [[0, k1], [k2, 0]] scaled by the period; no integration."""
    if orbit is None:
        trio = {o.label: o for o in special_orbits(p)}
        orbit = trio[which]
    gen = np.array([[0.0, orbit.k1], [orbit.k2, 0.0]])
    tau = np.linspace(0.0, 1.0, n_samples)
    mats = _expm_generator(gen, orbit.reeb_period * tau)
    mats[0] = np.eye(2)
    return SymplecticPath(tau=tau, mats=mats, frame_kind="rho_orbit_frame",
                          period=orbit.reeb_period, orbit=orbit,
                          constant_generator=gen, label=orbit.label)


def iterate_path(path: SymplecticPath, k: int) -> SymplecticPath:
    """k-fold iterate by the group law Phi_k(t + j/k) = Phi(t) Phi(1)^j,
    built by exact concatenation of the stored nodes."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return path
    end = path.end_matrix()
    powers = [np.eye(2)]
    for _ in range(k - 1):
        powers.append(powers[-1] @ end)
    taus = [path.tau / k]
    mats = [path.mats]
    n = path.n_nodes
    for j in range(1, k):
        taus.append((path.tau[1:] + j) / k)
        mats.append(path.mats[1:] @ powers[j])
    tau = np.concatenate(taus)
    m = np.concatenate(mats)
    m[0] = np.eye(2)
    gen = None
    if path.constant_generator is not None:
        gen = path.constant_generator
    return SymplecticPath(tau=tau, mats=m, frame_kind=path.frame_kind,
                          period=k * path.period, orbit=path.orbit,
                          constant_generator=gen,
                          label=f"{path.label}^{k}")


def iterate_index(path: SymplecticPath, k: int, frame_correction: int,
                  method: str = "winding_interval") -> CZResult:
    """Index of the k-th iterate; the frame correction scales by k."""
    return cz_index(iterate_path(path, k), k * frame_correction,
                    method=method)


def rotation_path(turns: float, n_samples: int = 256,
                  period: float = 1.0) -> SymplecticPath:
    """Rigid rotation test path by `turns` full turns."""
    tau = np.linspace(0.0, 1.0, n_samples)
    ang = 2.0 * np.pi * turns * tau
    mats = np.zeros((n_samples, 2, 2))
    mats[:, 0, 0] = np.cos(ang)
    mats[:, 0, 1] = -np.sin(ang)
    mats[:, 1, 0] = np.sin(ang)
    mats[:, 1, 1] = np.cos(ang)
    mats[0] = np.eye(2)
    gen = 2.0 * np.pi * turns / period * np.array([[0.0, -1.0], [1.0, 0.0]])
    return SymplecticPath(tau=tau, mats=mats, frame_kind="test",
                          period=period, constant_generator=gen,
                          label=f"rot({turns})")


# ---------------------------------------------------------------------------
# Lie pairing and quadrants


def lie_pairing(path: SymplecticPath, section: Callable, taus: np.ndarray,
                lie_step: float = None) -> np.ndarray:
    """d(lambda)(eta, L_R eta) at the given parameters, with the Lie
    derivative realized by a centered finite difference of the flow-pulled
    section: L_R eta(t) = d/ds [Phi(t) Phi(t+s)^{-1} eta(t+s)] / T at s=0.

    `section` maps parameter arrays to frame coordinates (..., 2); the frame
    is symplectic, so the pairing is the 2x2 determinant.
    """
    cfg = DEFAULT_CONFIG
    lie_step = cfg.lie_step if lie_step is None else lie_step
    taus = np.asarray(taus, float)
    d = lie_step
    eta0 = section(taus)
    phi0 = path.value(taus % 1.0)

    def pulled(offs):
        tt = taus + offs
        eta = section(tt % 1.0)
        phi = _path_value_lifted(path, tt)
        rel = phi0 @ np.linalg.inv(phi)
        return np.einsum("...ij,...j->...i", rel, eta)

    lie = (pulled(d) - pulled(-d)) / (2.0 * d * path.period)
    return eta0[..., 0] * lie[..., 1] - eta0[..., 1] * lie[..., 0]


def _path_value_lifted(path: SymplecticPath, tau):
    """Path value extended beyond [0, 1] by Phi(t + j) = Phi(t) Phi(1)^j."""
    tau = np.asarray(tau, float)
    j = np.floor(tau).astype(int)
    frac = tau - j
    base = path.value(frac)
    end = path.end_matrix()
    out = np.array(base)
    for jj in np.unique(j):
        if jj == 0:
            continue
        powm = np.linalg.matrix_power(end, int(jj))
        sel = j == jj
        out[sel] = base[sel] @ powm
    return out


def hyperbolic_eigenvectors(path: SymplecticPath, eig_tol: float = None):
    """(v_minus, v_plus, beta) of the end matrix; positive basis enforced.
    Raises NotHyperbolic unless the trace exceeds 2."""
    cfg = DEFAULT_CONFIG
    eig_tol = cfg.eig_tol if eig_tol is None else eig_tol
    m = path.end_matrix()
    tr = m[0, 0] + m[1, 1]
    if not tr > 2.0:
        raise NotHyperbolic(f"end-matrix trace {tr:g} <= 2")
    disc = np.sqrt(tr * tr - 4.0)
    beta = 0.5 * (tr + disc)

    def eigvec(lam):
        c1 = np.array([m[0, 1], lam - m[0, 0]])
        c2 = np.array([lam - m[1, 1], m[1, 0]])
        v = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        return v / np.linalg.norm(v)

    v_minus = eigvec(beta)
    v_plus = eigvec(1.0 / beta)
    if np.abs(np.linalg.det(np.stack([v_minus, v_plus], axis=-1))) < 1e-12:
        raise NotHyperbolic("eigenvectors are collinear")
    if np.linalg.det(np.stack([v_minus, v_plus], axis=-1)) < 0:
        v_plus = -v_plus
    res = np.linalg.norm(m @ v_minus - beta * v_minus) \
        + np.linalg.norm(m @ v_plus - v_plus / beta)
    if res > eig_tol * max(beta, 1.0):
        raise NotHyperbolic(f"eigenvector residual {res:g}")
    return v_minus, v_plus, float(beta)


def classify_quadrant(vm: np.ndarray, vp: np.ndarray, w: np.ndarray,
                      boundary_tol: float = 1e-9):
    """Quadrant of w in the positively-ordered basis (v_minus, v_plus):
    I = (+,+), II = (-,+), III = (-,-), IV = (+,-); None on a boundary."""
    den = vm[..., 0] * vp[..., 1] - vm[..., 1] * vp[..., 0]
    a = (w[..., 0] * vp[..., 1] - w[..., 1] * vp[..., 0]) / den
    b = (vm[..., 0] * w[..., 1] - vm[..., 1] * w[..., 0]) / den
    scale = np.hypot(a, b)
    quads = np.full(np.shape(a), None, dtype=object)
    on_boundary = (np.abs(a) < boundary_tol * scale) \
        | (np.abs(b) < boundary_tol * scale)
    quads[(a > 0) & (b > 0)] = "I"
    quads[(a < 0) & (b > 0)] = "II"
    quads[(a < 0) & (b < 0)] = "III"
    quads[(a > 0) & (b < 0)] = "IV"
    quads[on_boundary] = None
    return quads


def eigenframe_and_quadrants(
    p,
    orbit: ReebOrbit,
    section,
    path: SymplecticPath = None,
    n_nodes: int = 256,
    lie_step: float = None,
    pairing_tol: float = None,
):
    """Classify a section of the contact plane along a hyperbolic orbit
    against the invariant-manifold quadrants.

    `section` is a callable of the unit parameter returning frame
    coordinates (..., 2), in the same frame as `path` (default: the exact
    transverse path in the orbit-adapted frame).  Returns (EigenFrame,
    quadrants, pairing_sign) where pairing_sign is '+', '-' or 'mixed'
    according to the sign of the Lie pairing at all nodes.
    """
    cfg = DEFAULT_CONFIG
    pairing_tol = cfg.pairing_tol if pairing_tol is None else pairing_tol
    if path is None:
        path = analytic_monodromy_oracle(p, orbit.label, orbit=orbit)
    v_minus0, v_plus0, beta = hyperbolic_eigenvectors(path)
    taus = np.arange(n_nodes) / n_nodes
    mats = path.value(taus)
    vm = np.einsum("nij,j->ni", mats, v_minus0)
    vp = np.einsum("nij,j->ni", mats, v_plus0)
    vm /= np.linalg.norm(vm, axis=-1, keepdims=True)
    vp /= np.linalg.norm(vp, axis=-1, keepdims=True)
    frame = EigenFrame(orbit=orbit, tau=taus, v_minus=vm, v_plus=vp,
                       multiplier_beta=beta)

    w = np.asarray(section(taus), float)
    norms = np.linalg.norm(w, axis=-1)
    if np.any(norms < 1e-12):
        raise VanishingSection("section vanishes at a node")
    quads = classify_quadrant(vm, vp, w)
    pairing = lie_pairing(path, section, taus, lie_step=lie_step)
    scaled = pairing / (norms**2)
    if np.all(scaled > pairing_tol):
        sign = "+"
    elif np.all(scaled < -pairing_tol):
        sign = "-"
    else:
        sign = "mixed"
    return frame, quads, sign


# ---------------------------------------------------------------------------
# all-method index computation


def cz_all_methods(p, orbit: ReebOrbit, n_samples: int = None,
                   spectrum_nodes: int = 128, iterate: int = 1):
    """Index of orbit^iterate by numeric path, analytic oracle and spectral
    formula; returns dict of CZResult plus the agreement flag."""
    from . import spectrum as spectrum_mod

    cfg = DEFAULT_CONFIG
    n_samples = cfg.path_samples if n_samples is None else n_samples
    fc = frame_correction_for(p, orbit)
    numeric = model.restrict_linearized_to_xi(p, orbit, "rho_orbit_frame",
                                              n_samples)
    analytic = analytic_monodromy_oracle(p, orbit.label, orbit=orbit,
                                         n_samples=n_samples)
    res_num = iterate_index(numeric, iterate, fc, method="winding_interval")
    res_ana = iterate_index(analytic, iterate, fc, method="analytic_oracle")
    op = spectrum_mod.build_S(iterate_path(analytic, iterate))
    rep = spectrum_mod.discretize_and_solve(op, spectrum_nodes)
    res_spec = spectrum_mod.generalized_cz(rep, iterate * fc)
    agree = res_num.mu_global == res_ana.mu_global == res_spec.mu_global
    return {
        "numeric": res_num,
        "analytic": res_ana,
        "spectral": res_spec,
        "frame_correction": fc,
        "agree": bool(agree),
    }
