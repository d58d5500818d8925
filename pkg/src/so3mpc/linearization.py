"""Linearized tracking-error dynamics and their Euler discretization.

Linearizing the ambient error dynamics about zero error splits it into
three decoupled pieces:

  transversal (symmetric part):   e_perp_dot  = -2*alpha*e_perp
  parallel (vee coordinates):     e_par_dot   = R0 @ e_omega
  velocity:                       e_omega_dot = F(Omega0) e_omega + J^{-1} du

The parallel equation is stated on skew matrices as
d/dt e_par^ = R0 e_omega^ R0^{-1}; conjugation by a rotation is the same
as rotating the vee vector (R (w^) R^T = (R w)^), which is what reduces
the 12-dimensional matrix state to the 6-vector (e_par, e_omega) used by
the controllers.  The transversal factor of one Euler step is the scalar
1 - 2*alpha*h, acting entrywise on the symmetric error.
"""

from dataclasses import dataclass, field

import numpy as np

from .so3 import hat, sym_part

# Extreme eigenvalues of the potential Hessian at identity restricted to
# symmetric matrices, and the Gram bounds of a rotation-valued reference.
LAMBDA_MIN = 2.0
LAMBDA_MAX = 2.0
BETA_L = 1.0
BETA_U = 1.0


@dataclass
class ContinuousErrorModel:
    """Coefficients of the split continuous-time error dynamics at one instant."""

    adj: np.ndarray            # 3x3, maps e_omega into e_par_dot (the rotation R0)
    gyro: np.ndarray           # 3x3, F(Omega0) acting on e_omega
    input_gain: np.ndarray     # 3x3, J^{-1}
    transversal_rate: float    # -2*alpha


@dataclass
class DiscreteLinearModel:
    """Per-step Euler models A_k, B_k on the stacked state (e_par, e_omega).

    A_k = [[I, h*R0_k], [0, I + h*F_k]],  B_k = [[0], [h*J^{-1}]].
    The transversal error is decoupled and advances by the scalar factor
    1 - 2*alpha*h per step.
    """

    h: float
    A: np.ndarray                      # (n, 6, 6)
    B: np.ndarray                      # (n, 6, 3)
    transversal_factor: float
    lam_min: float = LAMBDA_MIN
    lam_max: float = LAMBDA_MAX
    beta_l: float = BETA_L
    beta_u: float = BETA_U

    def __len__(self):
        return self.A.shape[0]


def gyroscopic_matrix(omega0, inertia):
    """Matrix of e -> J^{-1}((J e) x Omega0 + (J Omega0) x e)."""
    J = np.asarray(inertia, dtype=float)
    w0 = np.asarray(omega0, dtype=float)
    return np.linalg.solve(J, hat(J @ w0) - hat(w0) @ J)


def linearize_continuous(ref_point, inertia, alpha):
    J = np.asarray(inertia, dtype=float)
    return ContinuousErrorModel(
        adj=np.asarray(ref_point.R0, dtype=float),
        gyro=gyroscopic_matrix(ref_point.omega0, J),
        input_gain=np.linalg.inv(J),
        transversal_rate=-2.0 * float(alpha),
    )


def discretize(traj, inertia, alpha, h, n_steps):
    """Euler discretization of the split error dynamics along a reference.

    Builds the per-step matrices for k = 0 .. n_steps-1 from the reference
    samples cached on the grid t = k*h.
    """
    if h <= 0.0:
        raise ValueError("step h must be positive")
    if n_steps < 1:
        raise ValueError("need at least one step")
    J = np.asarray(inertia, dtype=float)
    Jinv = np.linalg.inv(J)
    grid = traj.sample_grid(h, n_steps + 1)
    A = np.zeros((n_steps, 6, 6))
    B = np.zeros((n_steps, 6, 3))
    for k in range(n_steps):
        F = gyroscopic_matrix(grid.omega0[k], J)
        A[k, :3, :3] = np.eye(3)
        A[k, :3, 3:] = h * grid.R0[k]
        A[k, 3:, 3:] = np.eye(3) + h * F
        B[k, 3:, :] = h * Jinv
    return DiscreteLinearModel(h=float(h), A=A, B=B,
                               transversal_factor=1.0 - 2.0 * alpha * h)


def transversal_step_bound(lam_min=LAMBDA_MIN, lam_max=LAMBDA_MAX,
                           beta_l=BETA_L, beta_u=BETA_U):
    """Upper limit on alpha*h below which the discrete transversal error
    contracts: 2*lam_min*beta_l^2 / (lam_max^2 * beta_u).  Equals 1 for the
    rotation-group instance (lam = 2, beta = 1)."""
    return 2.0 * lam_min * beta_l**2 / (lam_max**2 * beta_u)


def check_transversal_condition(alpha, h, lam_min=LAMBDA_MIN, lam_max=LAMBDA_MAX,
                                beta_l=BETA_L, beta_u=BETA_U):
    """Strict stability test 0 < alpha*h < bound, with the margin to the bound.

    Returns
    -------
    (ok, margin) : (bool, float)
        margin = bound - alpha*h; nonpositive margin (or alpha*h <= 0) fails.
    """
    for name, val in [("alpha", alpha), ("h", h), ("lam_min", lam_min),
                      ("lam_max", lam_max), ("beta_l", beta_l), ("beta_u", beta_u)]:
        if val <= 0.0:
            raise ValueError(f"{name} must be positive")
    bound = transversal_step_bound(lam_min, lam_max, beta_l, beta_u)
    product = alpha * h
    return (0.0 < product < bound), bound - product


def simulate_transversal(alpha, h, steps, e0_perp):
    """Iterate the discrete transversal update e_{k+1} = (1 - 2*alpha*h) e_k.

    Returns the sequence [e_0, e_1, ..., e_steps] of symmetric matrices.
    """
    e = sym_part(np.asarray(e0_perp, dtype=float))
    factor = 1.0 - 2.0 * alpha * h
    out = [e]
    for _ in range(int(steps)):
        e = factor * e
        out.append(e)
    return np.array(out)
