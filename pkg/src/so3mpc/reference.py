"""Reference state/control trajectories for the attitude tracking loop.

A reference is a triple (R0(t), Omega0(t), u0(t)) that satisfies the rigid
body equations exactly: Rdot0 = R0 * hat(Omega0) and
I*Omegadot0 = (I*Omega0) x Omega0 + u0.  Controllers consume cached samples
on the control grid t = k*h, so a trajectory precomputes those once.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ReferenceBoundsError
from .so3 import exp_so3, hat, require_rotation

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class ReferencePoint:
    """Sample of the reference trajectory at one instant."""

    t: float
    R0: np.ndarray
    omega0: np.ndarray
    u0: np.ndarray


@dataclass
class GridSamples:
    """Reference samples cached on the uniform control grid t = k*h."""

    h: float
    R0: np.ndarray          # (n, 3, 3)
    omega0: np.ndarray      # (n, 3)
    u0: np.ndarray          # (n, 3)
    u0_mid: np.ndarray      # (n, 3), feedforward held over [k*h, (k+1)*h)

    def __len__(self):
        return self.R0.shape[0]


class ReferenceTrajectory:
    """Callable reference built from closed-form attitude/velocity/torque laws.

    Parameters
    ----------
    rotation, omega, omega_dot : callables of t
        Closed forms for R0(t), Omega0(t), Omegadot0(t).
    inertia : (3, 3) ndarray
        Moment of inertia; fixes the feedforward torque
        u0 = I*Omegadot0 - (I*Omega0) x Omega0.
    """

    def __init__(self, rotation, omega, omega_dot, inertia):
        self._rotation = rotation
        self._omega = omega
        self._omega_dot = omega_dot
        self.inertia = np.asarray(inertia, dtype=float)
        self._grid = None

    def rotation(self, t):
        return self._rotation(t)

    def omega(self, t):
        return np.asarray(self._omega(t), dtype=float)

    def omega_dot(self, t):
        return np.asarray(self._omega_dot(t), dtype=float)

    def control(self, t):
        w = self.omega(t)
        return self.inertia @ self.omega_dot(t) - np.cross(self.inertia @ w, w)

    def point(self, t):
        return ReferencePoint(t=float(t), R0=self.rotation(t), omega0=self.omega(t),
                              u0=self.control(t))

    def sample_grid(self, h, count):
        """Cache ``count`` samples at t = 0, h, ..., (count-1)*h.

        The midpoint feedforward u0((k + 1/2) h) is cached alongside; holding
        it over each interval removes the first-order hold error of the
        left-endpoint value.
        """
        if self._grid is not None and self._grid.h == h and len(self._grid) >= count:
            return self._grid
        ts = np.arange(count) * h
        self._grid = GridSamples(
            h=float(h),
            R0=np.array([self.rotation(t) for t in ts]),
            omega0=np.array([self.omega(t) for t in ts]),
            u0=np.array([self.control(t) for t in ts]),
            u0_mid=np.array([self.control(t + 0.5 * h) for t in ts]),
        )
        return self._grid


def _triple_product(tau):
    """exp(tau e1^) exp(tau e2^) exp(tau e3^)."""
    return exp_so3(tau * E1) @ exp_so3(tau * E2) @ exp_so3(tau * E3)


_Q_HALF_PI = _triple_product(0.5 * np.pi)


def benchmark_reference(inertia):
    """Aggressively tumbling reference used by the bundled scenarios.

    The body angular velocity is the closed form

        Omega0(t) = (1 + cos t, sin t - sin t cos t, cos t + sin^2 t)

    and the attitude that integrates it from R0(0) = I is, exactly,

        R0(t) = P(pi/2) P(pi/2 - t)^T,   P(tau) = exp(tau e1^) exp(tau e2^) exp(tau e3^).

    Differentiating: Pdot(tau) = hat(omega_s(tau)) P(tau) with spatial rate
    omega_s(tau) = e1 + exp(tau e1^) e2 + exp(tau e1^) exp(tau e2^) e3, and the
    transposed, time-reversed product turns that spatial rate into the body
    rate Omega0 above.  The torque feedforward follows from the Euler
    equations with the analytic Omegadot0.
    """

    def rotation(t):
        return _Q_HALF_PI @ _triple_product(0.5 * np.pi - t).T

    def omega(t):
        return np.array([
            1.0 + np.cos(t),
            np.sin(t) - np.sin(t) * np.cos(t),
            np.cos(t) + np.sin(t) ** 2,
        ])

    def omega_dot(t):
        return np.array([
            -np.sin(t),
            np.cos(t) - np.cos(2.0 * t),
            -np.sin(t) + np.sin(2.0 * t),
        ])

    return ReferenceTrajectory(rotation, omega, omega_dot, inertia)


def spin_reference(inertia, omega, R_init=None):
    """Constant-rate spin about a fixed body axis; torque balances gyroscopics."""
    omega = np.asarray(omega, dtype=float)
    R_init = np.eye(3) if R_init is None else require_rotation(R_init, what="R_init")
    Om_hat = hat(omega)

    def rotation(t):
        return R_init @ exp_so3(t * omega)

    return ReferenceTrajectory(
        rotation,
        lambda t: omega.copy(),
        lambda t: np.zeros(3),
        inertia,
    )


def rotation_gram_bounds(traj, t_grid):
    """Extreme eigenvalues of R0(t) R0(t)^T over a time grid.

    For a rotation-valued reference both bounds are 1.  A lower bound at or
    below zero means the reference leaves the valid domain entirely.

    Returns
    -------
    (beta_l, beta_u) : floats
        Smallest and largest eigenvalue seen over the grid.

    Raises
    ------
    ReferenceBoundsError
        If the lower bound is not strictly positive.
    """
    lo = np.inf
    hi = -np.inf
    for t in np.asarray(t_grid, dtype=float):
        R = np.asarray(traj.rotation(t), dtype=float)
        w = np.linalg.eigvalsh(R @ R.T)
        lo = min(lo, float(w[0]))
        hi = max(hi, float(w[-1]))
    if lo <= 0.0:
        raise ReferenceBoundsError(f"Gram lower bound {lo:.3e} is not positive")
    return lo, hi
