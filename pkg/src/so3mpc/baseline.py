"""Exponentially stabilizing PD-like tracking laws (non-predictive).

These serve as correctness baselines for the MPC loop and as constructive
witnesses that the split error dynamics are stabilizable.  Both laws cancel
the known reference-dependent terms and impose chosen closed-loop gains on
the pair (e_par, zeta), where zeta = R0 @ e_omega + w is the auxiliary
velocity error and w is the transversal-to-parallel coupling term (which
vanishes identically when the reference evolves on the rotation group).
"""

from dataclasses import dataclass

import numpy as np

from .errors import GainError
from .linearization import gyroscopic_matrix
from .so3 import potential_hess_at_identity, skew_part, sym_part, vee


@dataclass
class GainPair:
    """Proportional/derivative gains acting on vee coordinates."""

    kp: np.ndarray
    kd: np.ndarray


def continuous_closed_loop_matrix(gains):
    """[[0, I], [Kp, Kd]] on the stacked (e_par, zeta)."""
    Z = np.zeros((3, 3))
    return np.block([[Z, np.eye(3)], [gains.kp, gains.kd]])


def discrete_closed_loop_matrix(gains, h):
    """[[I, h I], [Kp, Kd]] on the stacked (e_par, zeta)."""
    return np.block([[np.eye(3), h * np.eye(3)], [gains.kp, gains.kd]])


def is_hurwitz(gains):
    """All eigenvalues of the continuous closed-loop matrix in the open left half plane."""
    return bool(np.max(np.linalg.eigvals(continuous_closed_loop_matrix(gains)).real) < 0.0)


def is_schur(gains, h):
    """Spectral radius of the discrete closed-loop matrix strictly below one."""
    return bool(np.max(np.abs(np.linalg.eigvals(discrete_closed_loop_matrix(gains, h)))) < 1.0)


def default_continuous_gains():
    """Double closed-loop pole at -1: Kp = -I, Kd = -2I."""
    return GainPair(kp=-np.eye(3), kd=-2.0 * np.eye(3))


def default_discrete_gains(h):
    """Discrete gains matching the sampled continuous default pole.

    Places a double discrete pole at mu = exp(-h), the image of the
    continuous pole -1 under sampling: Kd = (2 mu - 1) I,
    Kp = -((1 - mu)^2 / h) I.
    """
    mu = np.exp(-h)
    return GainPair(kp=-((1.0 - mu) ** 2 / h) * np.eye(3),
                    kd=(2.0 * mu - 1.0) * np.eye(3))


def parallel_coupling(e_perp, R0, alpha):
    """Parallel component of the transversal coupling, as a vee 3-vector.

    Computes vee of the skew part of
    -alpha * (hess(I) . e_perp) (R0 R0^T)^{-1}.
    The Hessian maps symmetric to symmetric and R0 R0^T = I on the rotation
    group, so this is identically zero there; the general formula is kept
    so off-group references would pick up the coupling automatically.
    """
    M = -alpha * potential_hess_at_identity(sym_part(e_perp)) @ np.linalg.inv(R0 @ R0.T)
    return vee(skew_part(M))


def _coupling_rate(e_perp, R0, alpha):
    # d/dt w through the transversal flow e_perp_dot = -alpha*sym((hess e_perp)(R0 R0^T)^{-1});
    # R0 R0^T is constant along a rotation-valued reference.
    gram_inv = np.linalg.inv(R0 @ R0.T)
    e_perp_dot = -alpha * sym_part(potential_hess_at_identity(sym_part(e_perp)) @ gram_inv)
    M = -alpha * potential_hess_at_identity(e_perp_dot) @ gram_inv
    return vee(skew_part(M))


def zeta(err, ref_point, alpha):
    """Auxiliary velocity error R0 @ e_omega + w (a computed view, never stored)."""
    return (np.asarray(ref_point.R0, float) @ np.asarray(err.e_omega, float)
            + parallel_coupling(err.e_perp, ref_point.R0, alpha))


def continuous_law(err, ref_point, inertia, alpha, gains, check=True):
    """Tracking torque offset du making the closed loop (e_par, zeta)
    follow d/dt (e_par, zeta) = [[0, I], [Kp, Kd]] (e_par, zeta).

    Raises
    ------
    GainError
        If the gains are not Hurwitz-valid (skipped when check=False).
    """
    if check and not is_hurwitz(gains):
        raise GainError("continuous closed-loop matrix is not Hurwitz")
    J = np.asarray(inertia, dtype=float)
    R0 = np.asarray(ref_point.R0, dtype=float)
    a = np.asarray(err.e_par, dtype=float)
    b = np.asarray(err.e_omega, dtype=float)
    F = gyroscopic_matrix(ref_point.omega0, J)
    w = parallel_coupling(err.e_perp, R0, alpha)
    w_dot = _coupling_rate(err.e_perp, R0, alpha)
    y = R0.T @ (-w_dot + gains.kp @ a + gains.kd @ (R0 @ b + w))
    return J @ (np.cross(b, ref_point.omega0) + y - F @ b)


def discrete_law(err, ref_k, ref_k1, inertia, alpha, h, gains, check=True):
    """One-step-ahead torque offset du_k for the Euler-discretized error model.

    Substituted into the discrete model, the pair (e_par, zeta) advances by
    exactly [[I, h I], [Kp, Kd]].  The coupling term w_{k+1} is advanced
    through the transversal factor 1 - 2*alpha*h.

    Raises
    ------
    GainError
        If the gains are not Schur-valid at this step size (skipped when
        check=False).
    """
    if check and not is_schur(gains, h):
        raise GainError(f"discrete closed-loop matrix is not Schur stable at h={h}")
    J = np.asarray(inertia, dtype=float)
    R_k = np.asarray(ref_k.R0, dtype=float)
    R_k1 = np.asarray(ref_k1.R0, dtype=float)
    a = np.asarray(err.e_par, dtype=float)
    b = np.asarray(err.e_omega, dtype=float)
    F = gyroscopic_matrix(ref_k.omega0, J)
    w_k = parallel_coupling(err.e_perp, R_k, alpha)
    e_perp_next = (1.0 - 2.0 * alpha * h) * sym_part(np.asarray(err.e_perp, float))
    w_k1 = parallel_coupling(e_perp_next, R_k1, alpha)
    y = R_k1.T @ (gains.kp @ a + gains.kd @ (R_k @ b + w_k) - w_k1)
    return (1.0 / h) * (J @ (y - (np.eye(3) + h * F) @ b))
