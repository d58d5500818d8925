"""Independent slow-but-sure oracles used by the test suite.

These deliberately avoid the code paths they check: finite differences
instead of analytic derivatives, truncated series instead of Rodrigues,
projected gradient instead of the active-set solver, explicit rollouts
instead of condensed matrices.
"""

import numpy as np


def finite_diff_grad(f, X, step=1e-5):
    """Central-difference gradient of a scalar matrix function."""
    X = np.asarray(X, dtype=float)
    G = np.zeros_like(X)
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            Xp = X.copy()
            Xm = X.copy()
            Xp[i, j] += step
            Xm[i, j] -= step
            G[i, j] = (f(Xp) - f(Xm)) / (2.0 * step)
    return G


def finite_diff_hess_apply(f, X, D, step=1e-4):
    """Second-order central difference of f at X along direction D.

    Returns the Hessian-vector product via d^2/ds^2 is avoided; instead
    uses the symmetric difference of gradients, which needs only one
    directional pass.
    """
    gp = finite_diff_grad(f, X + step * D, step=step)
    gm = finite_diff_grad(f, X - step * D, step=step)
    return (gp - gm) / (2.0 * step)


def exp_series(V, terms=20):
    """Matrix exponential by truncated power series."""
    V = np.asarray(V, dtype=float)
    out = np.eye(V.shape[0])
    term = np.eye(V.shape[0])
    for k in range(1, terms + 1):
        term = term @ V / k
        out = out + term
    return out


def projected_gradient_box_qp(H, f, lo, hi, x0=None, max_iter=200000, tol=1e-13):
    """Minimize 0.5 x'Hx + f'x over the box [lo, hi] by projected gradient.

    Fixed step 1/L with L the largest eigenvalue of H; linear convergence
    for positive definite H.  Deterministic.
    """
    H = np.asarray(H, dtype=float)
    f = np.asarray(f, dtype=float)
    L = float(np.linalg.eigvalsh(H).max())
    if L <= 0.0:
        L = 1.0
    x = np.clip(np.zeros_like(f) if x0 is None else np.asarray(x0, float), lo, hi)
    for _ in range(max_iter):
        g = H @ x + f
        xn = np.clip(x - g / L, lo, hi)
        if np.max(np.abs(xn - x)) < tol:
            return xn
        x = xn
    return x


def rollout_error_dynamics(A_seq, B_seq, x0, u_seq):
    """Explicit step-by-step rollout x_{i+1} = A_i x_i + B_i u_i."""
    xs = [np.asarray(x0, dtype=float)]
    for A, B, u in zip(A_seq, B_seq, u_seq):
        xs.append(A @ xs[-1] + B @ u)
    return np.array(xs)


def random_rotation(rng):
    """Rotation sampled by exponentiating a random axis-angle (series-free)."""
    from so3mpc.so3 import exp_so3

    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, np.pi)
    return exp_so3(angle * axis)
