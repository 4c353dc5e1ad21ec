"""Linking and self-linking numbers of closed curves on the energy surface.

Curves are radially normalized to the unit 3-sphere (the surface is
star-shaped, so this is an ambient isotopy and preserves linking), sent to
R^3 by stereographic projection from a pole kept clear of all curves, and
paired by the Gauss linking integral

    lk = (1 / 4 pi) oint oint  (r1 - r2) . (dr1 x dr2) / |r1 - r2|^3 .

Self-linking of a transverse unknot is the linking number with its push-off
along a global section of the contact plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import NoSafePole, OffsetTooLarge, RoundingUnsafe, VanishingSection
from . import model
from .model import HamiltonianParams
from .orbits import ReebOrbit


@dataclass
class ClosedCurve:
    """Cyclic samples (endpoint omitted) of a closed curve in R^4."""

    samples: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        self.samples = np.asarray(self.samples, float)
        if self.samples.ndim != 2 or self.samples.shape[1] != 4:
            raise ValueError("samples must have shape (n, 4)")

    @property
    def n(self) -> int:
        return len(self.samples)

    def oriented(self) -> np.ndarray:
        return self.samples if self.orientation >= 0 else self.samples[::-1]

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.samples, -self.orientation)

    def max_gap(self) -> float:
        pts = self.samples
        diffs = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=-1)
        return float(np.max(diffs))


def orbit_curve(orbit: ReebOrbit, n: int = None) -> ClosedCurve:
    cfg = DEFAULT_CONFIG
    n = cfg.n_curve_samples if n is None else n
    return ClosedCurve(orbit.curve(n))


def _unit_sphere(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=-1, keepdims=True)


def stereographic_project(curves, seed: int = None, n_candidates: int = None,
                          pole_tol: float = None):
    """Project curves to R^3 from a pole on the unit sphere chosen (from
    seeded random candidates) to maximize the clearance to all curves.

    Returns (pole, [projected point arrays]).  Raises NoSafePole if the
    best clearance is below pole_tol.
    """
    cfg = DEFAULT_CONFIG
    seed = cfg.seed if seed is None else seed
    n_candidates = cfg.n_pole_candidates if n_candidates is None else n_candidates
    pole_tol = cfg.pole_tol if pole_tol is None else pole_tol
    normalized = [_unit_sphere(c.oriented()) for c in curves]
    cloud = np.vstack(normalized)
    rng = np.random.default_rng(seed)
    cands = rng.standard_normal((n_candidates, 4))
    cands = _unit_sphere(cands)
    dists = np.linalg.norm(cloud[None, :, :] - cands[:, None, :], axis=-1)
    clearance = np.min(dists, axis=1)
    best = int(np.argmax(clearance))
    if clearance[best] < pole_tol:
        raise NoSafePole(f"best pole clearance {clearance[best]:g}")
    pole = cands[best]
    # orthonormal basis of the pole's orthogonal complement; (pole, basis)
    # is made negatively oriented in R^4 so the projection carries the
    # boundary orientation of the sphere to the standard one on R^3
    basis = np.linalg.svd(pole[None, :])[2][1:].copy()
    if np.linalg.det(np.vstack([pole[None, :], basis])) > 0:
        basis[2] = -basis[2]
    projected = []
    for pts in normalized:
        denom = (1.0 - pts @ pole)[:, None]
        projected.append((pts @ basis.T) / denom)
    return pole, projected


def gauss_linking_r3(c1: np.ndarray, c2: np.ndarray):
    """Raw Gauss double quadrature for two disjoint closed polylines in R^3
    (uniform parameter, endpoint omitted, centered-difference tangents)."""
    t1 = 0.5 * (np.roll(c1, -1, axis=0) - np.roll(c1, 1, axis=0))
    t2 = 0.5 * (np.roll(c2, -1, axis=0) - np.roll(c2, 1, axis=0))
    diff = c1[:, None, :] - c2[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.maximum(dist, 1e-9, out=dist)
    cross = np.cross(t1[:, None, :], t2[None, :, :])
    integrand = np.einsum("ijk,ijk->ij", diff, cross) / dist**3
    return float(np.sum(integrand) / (4.0 * np.pi))


def gauss_linking(c1: ClosedCurve, c2: ClosedCurve, seed: int = None,
                  round_guard: float = 0.1):
    """Linking number of two disjoint closed curves on the surface.

    Returns (raw, lk); raises RoundingUnsafe when the quadrature value is
    farther than the guard from the nearest integer.
    """
    _, (p1, p2) = stereographic_project([c1, c2], seed=seed)
    raw = gauss_linking_r3(p1, p2)
    lk = int(np.round(raw))
    if abs(raw - lk) > round_guard:
        raise RoundingUnsafe(f"gauss value {raw:g} not near an integer")
    return raw, lk


def pushoff(p: HamiltonianParams, curve: ClosedCurve, section: np.ndarray,
            offset: float = None, sep_tol: float = None) -> ClosedCurve:
    """Displace a curve by offset along a nonvanishing contact section and
    re-project onto the energy surface."""
    cfg = DEFAULT_CONFIG
    offset = cfg.pushoff_offset if offset is None else offset
    sep_tol = cfg.sep_tol if sep_tol is None else sep_tol
    section = np.asarray(section, float)
    norms = np.linalg.norm(section, axis=-1, keepdims=True)
    if np.any(norms < 1e-12):
        raise VanishingSection("push-off section vanishes at a node")
    pushed = curve.samples + offset * section / norms
    pushed = model.surface_project(p, pushed)
    d = np.linalg.norm(pushed[:, None, :] - curve.samples[None, :, :], axis=-1)
    if np.min(d) < sep_tol:
        raise OffsetTooLarge(
            f"pushed curve within {np.min(d):g} of the original")
    return ClosedCurve(pushed, curve.orientation)


def self_linking(p: HamiltonianParams, orbit: ReebOrbit, n: int = None,
                 offset: float = None, seed: int = None) -> int:
    """Self-linking number: Gauss linking of the orbit with its push-off
    along the first global contact-frame section."""
    curve = orbit_curve(orbit, n)
    xbar1, _ = model.frame_sections(p, curve.samples)
    pushed = pushoff(p, curve, xbar1, offset=offset)
    raw, lk = gauss_linking(curve, pushed, seed=seed)
    return lk


def hopf_circles(n: int = None):
    """The standard pair of linked great circles (control case)."""
    cfg = DEFAULT_CONFIG
    n = cfg.n_curve_samples if n is None else n
    ang = 2.0 * np.pi * np.arange(n) / n
    c1 = np.stack([np.cos(ang), np.sin(ang), 0 * ang, 0 * ang], axis=-1)
    c2 = np.stack([0 * ang, 0 * ang, np.cos(ang), np.sin(ang)], axis=-1)
    return ClosedCurve(c1), ClosedCurve(c2)
