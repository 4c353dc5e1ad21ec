"""Hamiltonian model: energy surface, contact form, Reeb flow, linearization.

The state space is R^4 with coordinates (x1, y1, x2, y2) and the standard
symplectic form.  The Hamiltonian splits as H = H1(x1, y1) + H2(x2, y2),

    H1 = (x1^2 + y1^2) / 2,
    H2 = (x2^2 + y2^2)^2 / 2 + eps*a*x2^3 + eps*b*x2*y2^2
         + eps^2*c*x2^2 + eps^2*d*y2^2,

and every invariant downstream lives on the energy surface S = H^{-1}(1/2),
which is star-shaped and diffeomorphic to the 3-sphere.  The restriction of
the Liouville form lambda0 = (1/2) sum(x_i dy_i - y_i dx_i) is a contact
form on S whose Reeb field is h * X_H with h = 1 / lambda0(X_H).

All field evaluations broadcast over leading axes: states may be single
4-vectors or arrays of shape (..., 4).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .config import DEFAULT_CONFIG, PRESETS, RunConfig
from .errors import (
    DegenerateFrame,
    FrameDegenerate,
    NoConvergence,
    NotStarShaped,
    StepUnderflow,
)

# 2x2 rotation generator and the symplectic pairing on R^4.
J0 = np.array([[0.0, -1.0], [1.0, 0.0]])
OMEGA4 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

# Orthogonal quaternion-type matrices generating the moving frame
# X_i = A_i grad(H) / |grad(H)|.  A3 maps grad(H) to X_H.
FRAME_A1 = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)
FRAME_A2 = np.array(
    [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)
FRAME_A3 = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


@dataclass
class HamiltonianParams:
    """The five model constants plus cached critical-point structure.

    `structure` is populated by `orbits.validate_structure`; operations that
    build the special orbits require it.
    """

    epsilon: float
    a: float
    b: float
    c: float
    d: float
    preset_name: str = "custom"
    structure: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def from_preset(cls, name: str, epsilon: float = 0.5) -> "HamiltonianParams":
        coeffs = PRESETS[name]
        return cls(epsilon=epsilon, preset_name=name, **coeffs)

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "HamiltonianParams":
        coeffs = cfg.coefficient_dict()
        name = cfg.preset if cfg.coefficients is None else "custom"
        return cls(epsilon=cfg.epsilon, preset_name=name, **coeffs)


# ---------------------------------------------------------------------------
# scalar fields


def h2_eval(p: HamiltonianParams, x, y):
    """Planar factor H2 of the Hamiltonian."""
    e = p.epsilon
    r2 = x * x + y * y
    return 0.5 * r2 * r2 + e * p.a * x**3 + e * p.b * x * y * y \
        + e * e * p.c * x * x + e * e * p.d * y * y


def h2_grad(p: HamiltonianParams, x, y):
    """Partial derivatives (Q, P) = (dH2/dx2, dH2/dy2)."""
    e = p.epsilon
    r2 = x * x + y * y
    q = 2.0 * x * r2 + 3.0 * e * p.a * x * x + e * p.b * y * y + 2.0 * e * e * p.c * x
    pp = 2.0 * y * r2 + 2.0 * e * p.b * x * y + 2.0 * e * e * p.d * y
    return q, pp


def h2_hess(p: HamiltonianParams, x, y):
    """Hessian of H2, shape (..., 2, 2), exact polynomial derivatives."""
    e = p.epsilon
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    hxx = 6.0 * x * x + 2.0 * y * y + 6.0 * e * p.a * x + 2.0 * e * e * p.c
    hxy = 4.0 * x * y + 2.0 * e * p.b * y
    hyy = 2.0 * x * x + 6.0 * y * y + 2.0 * e * p.b * x + 2.0 * e * e * p.d
    out = np.empty(x.shape + (2, 2))
    out[..., 0, 0] = hxx
    out[..., 0, 1] = hxy
    out[..., 1, 0] = hxy
    out[..., 1, 1] = hyy
    return out


def hamiltonian_eval(p: HamiltonianParams, z):
    """Value, gradient and Hessian of H at state(s) z.

    Returns (H, grad, hess) with shapes (...,), (..., 4) and (..., 4, 4).
    All derivatives are closed-form polynomial expressions.
    """
    z = np.asarray(z, float)
    x1, y1, x2, y2 = z[..., 0], z[..., 1], z[..., 2], z[..., 3]
    h = 0.5 * (x1 * x1 + y1 * y1) + h2_eval(p, x2, y2)
    q, pp = h2_grad(p, x2, y2)
    grad = np.stack([x1, y1, q, pp], axis=-1)
    hess = np.zeros(z.shape[:-1] + (4, 4))
    hess[..., 0, 0] = 1.0
    hess[..., 1, 1] = 1.0
    hess[..., 2:, 2:] = h2_hess(p, x2, y2)
    return h, grad, hess


def lambda0(z, u):
    """Liouville one-form lambda0(z)(u) = (1/2) sum(x_i u_yi - y_i u_xi)."""
    z = np.asarray(z, float)
    u = np.asarray(u, float)
    return 0.5 * (
        z[..., 0] * u[..., 1] - z[..., 1] * u[..., 0]
        + z[..., 2] * u[..., 3] - z[..., 3] * u[..., 2]
    )


def dlambda0(u, v):
    """Exterior derivative d(lambda0)(u, v) = sum dx_i ^ dy_i (u, v)."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    return (
        u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
        + u[..., 2] * v[..., 3] - u[..., 3] * v[..., 2]
    )


def contact_eval(z, u, v):
    """Pair (lambda0(z)(u), dlambda0(u, v)) by the exact formulas."""
    return lambda0(z, u), dlambda0(u, v)


def hamiltonian_vf(p: HamiltonianParams, z):
    """Hamiltonian vector field X_H = (-y1, x1, -P, Q)."""
    z = np.asarray(z, float)
    q, pp = h2_grad(p, z[..., 2], z[..., 3])
    return np.stack([-z[..., 1], z[..., 0], -pp, q], axis=-1)


def star_quantity(p: HamiltonianParams, z):
    """2 * lambda0(X_H) = x1^2 + y1^2 + x2*Q + y2*P; positive on a
    star-shaped transverse surface."""
    z = np.asarray(z, float)
    q, pp = h2_grad(p, z[..., 2], z[..., 3])
    return z[..., 0] ** 2 + z[..., 1] ** 2 + z[..., 2] * q + z[..., 3] * pp


def vector_fields(p: HamiltonianParams, z):
    """Hamiltonian field, Reeb normalization and Reeb field at z.

    Returns (X_H, h, R) with R = h * X_H and h = 1 / lambda0(X_H).
    Raises NotStarShaped when lambda0(X_H) <= 0, which signals failure of
    the transversality making lambda0 a contact form at z.
    """
    z = np.asarray(z, float)
    xh = hamiltonian_vf(p, z)
    s = star_quantity(p, z)
    if np.any(s <= 0.0):
        raise NotStarShaped(f"lambda0(X_H) <= 0 (min value {np.min(s) / 2.0:g})")
    h = 2.0 / s
    r = xh * h[..., None] if np.ndim(h) else xh * h
    return xh, h, r


# ---------------------------------------------------------------------------
# contact frame


def frame_sections(p: HamiltonianParams, z, frame_tol: float = 1e-8):
    """Global contact-plane frame (Xbar1, Xbar2) at state(s) z.

    Xbar_i is the unique vector of ker(lambda0) intersected with TS that
    projects to X_i = A_i grad(H)/|grad(H)| along X_3.  Vectorized over
    leading axes; raises DegenerateFrame if lambda0(X_3) is below tolerance.
    """
    z = np.asarray(z, float)
    _, grad, _ = hamiltonian_eval(p, z)
    gnorm = np.linalg.norm(grad, axis=-1)
    if np.any(gnorm < frame_tol):
        raise DegenerateFrame("gradient of H vanishes")
    n = grad / gnorm[..., None]
    x1v = n @ FRAME_A1.T
    x2v = n @ FRAME_A2.T
    x3v = n @ FRAME_A3.T
    lam3 = lambda0(z, x3v)
    if np.any(np.abs(lam3) < frame_tol):
        raise DegenerateFrame("lambda0(X_3) below frame tolerance")
    xbar1 = x1v - (lambda0(z, x1v) / lam3)[..., None] * x3v
    xbar2 = x2v - (lambda0(z, x2v) / lam3)[..., None] * x3v
    return xbar1, xbar2


def frame_coords(z, xbar1, xbar2, v):
    """Coordinates of contact vectors v in the (Xbar1, Xbar2) frame.

    Uses the symplectic pairing; exact for v in the span of the frame since
    dlambda0(Xbar1, Xbar2) = 1 identically.
    """
    den = dlambda0(xbar1, xbar2)
    a = dlambda0(v, xbar2) / den
    b = dlambda0(xbar1, v) / den
    return np.stack([a, b], axis=-1)


@dataclass
class ContactFrame:
    """Pointwise frame data on the surface: tangent frame X1..X3, contact
    frame (Xbar1, Xbar2), Reeb field, and the compatible complex structure
    J (Xbar1 -> Xbar2, Xbar2 -> -Xbar1) exposed through apply_J."""

    base: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    X3: np.ndarray
    Xbar1: np.ndarray
    Xbar2: np.ndarray
    reeb: np.ndarray

    def project(self, v):
        """Projection TS -> contact plane along the Reeb direction."""
        lam = np.asarray(lambda0(self.base, v), float)
        return v - lam[..., None] * self.reeb

    def coords(self, v):
        return frame_coords(self.base, self.Xbar1, self.Xbar2, v)

    def from_coords(self, ab):
        ab = np.asarray(ab, float)
        return ab[..., 0, None] * self.Xbar1 + ab[..., 1, None] * self.Xbar2

    def apply_J(self, v):
        ab = np.asarray(self.coords(v), float)
        return ab[..., 0, None] * self.Xbar2 - ab[..., 1, None] * self.Xbar1


def contact_frame(p: HamiltonianParams, z, frame_tol: float = 1e-8) -> ContactFrame:
    """Build the full frame record at one or many on-surface states."""
    z = np.asarray(z, float)
    _, grad, _ = hamiltonian_eval(p, z)
    n = grad / np.linalg.norm(grad, axis=-1)[..., None]
    xbar1, xbar2 = frame_sections(p, z, frame_tol=frame_tol)
    _, _, reeb = vector_fields(p, z)
    return ContactFrame(
        base=z,
        X1=n @ FRAME_A1.T,
        X2=n @ FRAME_A2.T,
        X3=n @ FRAME_A3.T,
        Xbar1=xbar1,
        Xbar2=xbar2,
        reeb=reeb,
    )


# ---------------------------------------------------------------------------
# flows


def _dxh(p: HamiltonianParams, z):
    """Jacobian of the Hamiltonian vector field (4x4)."""
    hess2 = h2_hess(p, z[2], z[3])
    out = np.zeros((4, 4))
    out[0, 1] = -1.0
    out[1, 0] = 1.0
    out[2, 2] = -hess2[0, 1]
    out[2, 3] = -hess2[1, 1]
    out[3, 2] = hess2[0, 0]
    out[3, 3] = hess2[0, 1]
    return out


def reeb_jacobian(p: HamiltonianParams, z):
    """Jacobian of the Reeb field R = h X_H at a single state."""
    z = np.asarray(z, float)
    xh = hamiltonian_vf(p, z)
    s = star_quantity(p, z)
    h = 2.0 / s
    q, pp = h2_grad(p, z[2], z[3])
    hess2 = h2_hess(p, z[2], z[3])
    ds = np.array(
        [
            2.0 * z[0],
            2.0 * z[1],
            q + z[2] * hess2[0, 0] + z[3] * hess2[0, 1],
            z[2] * hess2[0, 1] + pp + z[3] * hess2[1, 1],
        ]
    )
    dh = -(h * h / 2.0) * ds
    return h * _dxh(p, z) + np.outer(xh, dh)


@dataclass
class Trajectory:
    """Sampled flow segment with its conserved-energy drift."""

    t: np.ndarray
    states: np.ndarray
    time_kind: str
    energy_drift: float

    def to_csv(self, p: HamiltonianParams) -> str:
        h, _, _ = hamiltonian_eval(p, self.states)
        lines = ["t,x1,y1,x2,y2,H"]
        for ti, zi, hi in zip(self.t, self.states, h):
            lines.append(
                f"{ti:.12g},{zi[0]:.12g},{zi[1]:.12g},{zi[2]:.12g},{zi[3]:.12g},{hi:.12g}"
            )
        return "\n".join(lines) + "\n"


def integrate_flow(
    p: HamiltonianParams,
    z0,
    T: float,
    time_kind: str = "reeb",
    with_variational: bool = False,
    tol: float = None,
    t_eval=None,
    n_samples: int = 200,
    method: str = "RK45",
):
    """Integrate the Hamiltonian or Reeb flow from z0 for (signed) time T.

    Parameters
    ----------
    time_kind : 'reeb' integrates h*X_H, 'hamiltonian' integrates X_H.
    with_variational : also propagate the 4x4 fundamental solution of the
        linearized flow along the same adaptive step sequence.
    tol : per-step error tolerance (both relative and absolute); defaults
        to the config value.
    method : embedded adaptive Runge-Kutta pair; the default 'RK45' is the
        5(4) pair, 'DOP853' trades more stages for tight tolerances.

    Returns
    -------
    (Trajectory, M) where M is None or an array (n, 4, 4) of fundamental
    matrices at the sample times.

    Raises StepUnderflow when the step controller fails (near-singular
    normalization h).
    """
    if tol is None:
        tol = DEFAULT_CONFIG.ode_tol
    z0 = np.asarray(z0, float)
    if time_kind not in ("reeb", "hamiltonian"):
        raise ValueError("time_kind must be 'reeb' or 'hamiltonian'")

    if time_kind == "reeb":
        def rhs_state(z):
            _, _, r = vector_fields(p, z)
            return r

        jac = reeb_jacobian
    else:
        def rhs_state(z):
            return hamiltonian_vf(p, z)

        jac = _dxh

    if with_variational:
        def rhs(t, y):
            z = y[:4]
            m = y[4:].reshape(4, 4)
            dz = rhs_state(z)
            dm = jac(p, z) @ m
            return np.concatenate([dz, dm.ravel()])

        y0 = np.concatenate([z0, np.eye(4).ravel()])
    else:
        def rhs(t, y):
            return rhs_state(y)

        y0 = z0

    if t_eval is None:
        t_eval = np.linspace(0.0, T, n_samples)
    sol = solve_ivp(rhs, (0.0, T), y0, method=method, rtol=tol, atol=tol,
                    t_eval=t_eval, dense_output=False)
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    states = sol.y[:4].T
    h, _, _ = hamiltonian_eval(p, states)
    drift = float(np.max(np.abs(h - h[0])))
    traj = Trajectory(t=sol.t, states=states, time_kind=time_kind, energy_drift=drift)
    mats = sol.y[4:].T.reshape(-1, 4, 4) if with_variational else None
    return traj, mats


def surface_project(
    p: HamiltonianParams,
    z,
    surface_tol: float = None,
    capture_radius: float = None,
    max_newton: int = None,
):
    """Return a nearby point of H^{-1}(1/2) by Newton steps along grad(H).

    Vectorized over leading axes.  Raises NoConvergence if any point fails
    to reach |H - 1/2| <= surface_tol, and rejects inputs outside the
    capture radius.
    """
    cfg = DEFAULT_CONFIG
    surface_tol = cfg.surface_tol if surface_tol is None else surface_tol
    capture_radius = cfg.capture_radius if capture_radius is None else capture_radius
    max_newton = cfg.max_newton if max_newton is None else max_newton
    z = np.array(z, float, copy=True)
    h0, _, _ = hamiltonian_eval(p, z)
    if np.any(np.abs(h0 - 0.5) >= capture_radius):
        raise NoConvergence("point outside the capture radius of the surface")
    for _ in range(max_newton):
        h, grad, _ = hamiltonian_eval(p, z)
        err = h - 0.5
        if np.all(np.abs(err) <= surface_tol):
            return z
        gg = np.sum(grad * grad, axis=-1)
        z = z - (err / gg)[..., None] * grad
    h, _, _ = hamiltonian_eval(p, z)
    if np.all(np.abs(h - 0.5) <= surface_tol):
        return z
    raise NoConvergence("surface projection did not converge")


# ---------------------------------------------------------------------------
# restriction of the linearized flow to the contact plane


@dataclass
class SymplecticPath:
    """Path of 2x2 symplectic matrices on the unit parameter interval.

    `mats[j]` expresses the linearized Reeb flow over physical time
    `period * tau[j]` restricted to the contact plane, in the frame named by
    `frame_kind`.  Paths built from a constant generator keep it in
    `constant_generator` and can be evaluated at arbitrary parameters.
    """

    tau: np.ndarray
    mats: np.ndarray
    frame_kind: str
    period: float
    orbit: object = None
    constant_generator: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        self.tau = np.asarray(self.tau, float)
        self.mats = np.asarray(self.mats, float)
        if not np.array_equal(self.mats[0], np.eye(2)):
            raise ValueError("path must start at the identity exactly")

    @property
    def n_nodes(self) -> int:
        return len(self.tau)

    def det_defect(self) -> float:
        return float(np.max(np.abs(np.linalg.det(self.mats) - 1.0)))

    def end_matrix(self) -> np.ndarray:
        return self.mats[-1]

    def value(self, tau):
        """Evaluate at arbitrary parameters (exact for generator paths,
        linear matrix interpolation otherwise)."""
        tau = np.asarray(tau, float)
        if self.constant_generator is not None:
            return _expm_generator(self.constant_generator, self.period * tau)
        idx = np.clip(np.searchsorted(self.tau, tau) - 1, 0, len(self.tau) - 2)
        t0 = self.tau[idx]
        t1 = self.tau[idx + 1]
        w = ((tau - t0) / (t1 - t0))[..., None, None]
        return (1.0 - w) * self.mats[idx] + w * self.mats[idx + 1]

    def resampled(self, n_nodes: int) -> "SymplecticPath":
        tau = np.linspace(0.0, 1.0, n_nodes)
        mats = self.value(tau)
        mats[0] = np.eye(2)
        return SymplecticPath(tau, mats, self.frame_kind, self.period,
                              orbit=self.orbit,
                              constant_generator=self.constant_generator,
                              label=self.label)


def _expm_generator(gen: np.ndarray, times) -> np.ndarray:
    """exp(t * gen) for gen = [[0, k1], [k2, 0]], vectorized over t."""
    k1 = gen[0, 1]
    k2 = gen[1, 0]
    t = np.asarray(times, float)
    prod = k1 * k2
    out = np.zeros(t.shape + (2, 2))
    if prod > 0:  # hyperbolic
        w = np.sqrt(prod)
        ch, sh = np.cosh(w * t), np.sinh(w * t)
        out[..., 0, 0] = ch
        out[..., 0, 1] = (k1 / w) * sh
        out[..., 1, 0] = (k2 / w) * sh
        out[..., 1, 1] = ch
    elif prod < 0:  # elliptic
        w = np.sqrt(-prod)
        co, si = np.cos(w * t), np.sin(w * t)
        out[..., 0, 0] = co
        out[..., 0, 1] = (k1 / w) * si
        out[..., 1, 0] = (k2 / w) * si
        out[..., 1, 1] = co
    else:  # shear
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = 1.0
        out[..., 0, 1] = k1 * t
        out[..., 1, 0] = k2 * t
    return out


def rho_frame_basis(p: HamiltonianParams, z) -> np.ndarray:
    """Orbit-adapted contact basis at an axis-circle point: the lifts of the
    planar directions (0,0,1,0) and (0,0,0,1) into the contact plane.

    Returns a 4x2 matrix of columns.  Only valid where both directions are
    tangent to the surface (the special orbits and their neighbors on the
    axis circles)."""
    z = np.asarray(z, float)
    _, _, reeb = vector_fields(p, z)
    e1 = np.array([0.0, 0.0, 1.0, 0.0])
    e2 = np.array([0.0, 0.0, 0.0, 1.0])
    e1 = e1 - lambda0(z, e1) * reeb
    e2 = e2 - lambda0(z, e2) * reeb
    return np.stack([e1, e2], axis=-1)


def restrict_linearized_to_xi(
    p: HamiltonianParams,
    orbit,
    frame_kind: str = "rho_orbit_frame",
    n_samples: int = 256,
    tol: float = None,
    path_tol: float = None,
) -> SymplecticPath:
    """Compress the 4x4 linearized Reeb flow along a closed orbit to the
    2x2 symplectic path on the contact plane.

    The orbit must close up within the orbit tolerance.  In the
    'rho_orbit_frame' the basis is the lifted planar pair, whose coordinates
    are just the (x2, y2) components; in the 'global_frame' the compression
    projects along the Reeb direction and solves against (Xbar1, Xbar2).
    """
    if n_samples < 64:
        raise ValueError("n_samples must be at least 64")
    cfg = DEFAULT_CONFIG
    tol = cfg.ode_tol if tol is None else tol
    path_tol = cfg.path_tol if path_tol is None else path_tol
    z0 = np.asarray(orbit.initial_state, float)
    T = float(orbit.reeb_period)
    t_eval = np.linspace(0.0, T, n_samples)
    traj, mats = integrate_flow(p, z0, T, time_kind="reeb",
                                with_variational=True, tol=tol, t_eval=t_eval)
    gap = np.linalg.norm(traj.states[-1] - z0)
    if gap > cfg.orbit_tol * 10:
        raise ValueError(f"orbit does not close up (gap {gap:g})")

    if frame_kind == "rho_orbit_frame":
        e0 = rho_frame_basis(p, z0)
        v = mats @ e0  # (n, 4, 2), columns stay in the contact plane
        phi = v[:, 2:4, :]
    elif frame_kind == "global_frame":
        xbar1, xbar2 = frame_sections(p, traj.states)
        e0 = np.stack([xbar1[0], xbar2[0]], axis=-1)
        v = mats @ e0
        _, _, reeb = vector_fields(p, traj.states)
        lam = lambda0(traj.states[:, None, :], np.moveaxis(v, -1, 1))
        v = v - reeb[:, :, None] * lam[:, None, :]
        den = dlambda0(xbar1, xbar2)
        if np.any(np.abs(den) < cfg.frame_tol):
            raise FrameDegenerate("global frame loses rank along the orbit")
        cols = np.moveaxis(v, -1, 1)  # (n, 2, 4)
        a = dlambda0(cols, xbar2[:, None, :]) / den[:, None]
        b = dlambda0(xbar1[:, None, :], cols) / den[:, None]
        phi = np.stack([a, b], axis=1)  # (n, 2, 2): rows coords, cols inputs
    else:
        raise ValueError("frame_kind must be 'rho_orbit_frame' or 'global_frame'")

    phi = np.array(phi)
    phi[0] = np.eye(2)
    path = SymplecticPath(
        tau=t_eval / T,
        mats=phi,
        frame_kind=frame_kind,
        period=T,
        orbit=orbit,
        label=getattr(orbit, "label", ""),
    )
    defect = path.det_defect()
    if defect > path_tol:
        raise FrameDegenerate(f"path symplecticity defect {defect:g} exceeds tolerance")
    return path
