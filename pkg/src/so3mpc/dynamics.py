"""Rigid-body plant, its ambient-space extension, and ZOH integration.

The plant state is an attitude matrix paired with a body angular velocity.
On the manifold the attitude obeys Xdot = X*hat(Omega); the ambient
extension adds the drift -alpha * grad V(X) that makes SO(3) an attracting
invariant set, so off-manifold states relax back while on-manifold
trajectories are unchanged.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepSizeUnderflowError
from .so3 import hat, potential_grad, skew_part, sym_part, vee


@dataclass
class AmbientState:
    """Attitude (possibly off-manifold, det X > 0) and body angular velocity."""

    X: np.ndarray
    omega: np.ndarray

    def as_vector(self):
        """Flatten to a 12-vector: row-major X, then omega."""
        return np.concatenate([np.asarray(self.X, float).ravel(),
                               np.asarray(self.omega, float)])

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(X=y[:9].reshape(3, 3).copy(), omega=y[9:12].copy())


@dataclass
class ErrorState:
    """Tracking error split into parallel (skew, as a 3-vector), transversal
    (symmetric 3x3) and angular-velocity parts."""

    e_par: np.ndarray
    e_perp: np.ndarray
    e_omega: np.ndarray

    @classmethod
    def zero(cls):
        return cls(np.zeros(3), np.zeros((3, 3)), np.zeros(3))


@dataclass
class IntegratorSettings:
    """Adaptive-step tolerances; defaults match the benchmark setup."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-6
    first_step: float | None = None
    max_step: float = np.inf

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("integrator tolerances must be positive")


def require_inertia(J, tol=1e-12):
    """Validate a symmetric positive-definite inertia matrix."""
    J = np.asarray(J, dtype=float)
    if np.linalg.norm(J - J.T) > tol:
        raise ValueError("inertia matrix must be symmetric")
    if np.linalg.eigvalsh(J).min() <= 0.0:
        raise ValueError("inertia matrix must be positive definite")
    return J


def rigid_body_field(state, u, inertia):
    """Euler equations of the fully actuated rigid body.

    Returns (Xdot, omegadot) with Xdot = X*hat(omega) and
    omegadot = I^{-1}((I omega) x omega + u).
    """
    X = np.asarray(state.X, dtype=float)
    w = np.asarray(state.omega, dtype=float)
    u = np.asarray(u, dtype=float)
    J = np.asarray(inertia, dtype=float)
    Xdot = X @ hat(w)
    wdot = np.linalg.solve(J, np.cross(J @ w, w) + u)
    return Xdot, wdot


def embedded_field(state, u, inertia, alpha):
    """Rigid-body field plus the manifold-attracting drift -alpha*X(X^T X - I).

    Identical to the rigid-body field whenever X is a rotation, since the
    potential gradient vanishes there.

    Raises
    ------
    DomainError
        If det(X) <= 0.
    """
    Xdot, wdot = rigid_body_field(state, u, inertia)
    if alpha != 0.0:
        Xdot = Xdot - alpha * potential_grad(state.X)
    else:
        potential_grad(state.X)  # still enforce the domain check
    return Xdot, wdot


def integrate(field, state, u, t0, t1, settings=None):
    """Propagate a plant field over [t0, t1] under a held (ZOH) control.

    Parameters
    ----------
    field : callable (AmbientState, u) -> (Xdot, omegadot)
    state : AmbientState at t0
    u : (3,) control held constant over the whole span
    settings : IntegratorSettings

    Uses the adaptive Dormand-Prince 4(5) pair (scipy's RK45) with local
    error kept below abs_tol + rel_tol*|y| per component.

    Raises
    ------
    StepSizeUnderflowError
        If the integrator cannot proceed without an unresolvably small step.
    """
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    settings = settings or IntegratorSettings()
    u = np.asarray(u, dtype=float)

    def rhs(t, y):
        s = AmbientState.from_vector(y)
        Xdot, wdot = field(s, u)
        return np.concatenate([np.asarray(Xdot, float).ravel(), np.asarray(wdot, float)])

    sol = solve_ivp(
        rhs,
        (float(t0), float(t1)),
        state.as_vector(),
        method="RK45",
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        first_step=settings.first_step,
        max_step=settings.max_step,
    )
    if not sol.success:
        if "step size" in sol.message.lower():
            raise StepSizeUnderflowError(sol.message)
        raise RuntimeError(f"integration failed: {sol.message}")
    return AmbientState.from_vector(sol.y[:, -1])


def error_state(state, ref_point):
    """Split tracking error of a plant state against a reference sample.

    e_R = X R0^T - I decomposed into its skew part (returned through vee as
    a 3-vector) and symmetric part; e_omega = omega - omega0.
    """
    R0 = np.asarray(ref_point.R0, dtype=float)
    E = np.asarray(state.X, dtype=float) @ R0.T - np.eye(3)
    return ErrorState(
        e_par=vee(skew_part(E)),
        e_perp=sym_part(E),
        e_omega=np.asarray(state.omega, dtype=float) - np.asarray(ref_point.omega0, dtype=float),
    )
