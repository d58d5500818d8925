"""SO(3)/so(3) primitives and the quartic manifold-attraction potential.

The ambient space is R^{3x3} with the Frobenius inner product
<A, B> = trace(A^T B).  Under this metric the space splits orthogonally
into skew-symmetric matrices (the Lie algebra, "parallel" direction) and
symmetric matrices (the "transversal" direction).  All functions here are
pure and operate on plain numpy arrays.
"""

import numpy as np

from .errors import DomainError, NotSkewError

# Frobenius residual above which a matrix is rejected as not skew / not a
# rotation.  Well above double-precision noise, well below dynamics scales.
SKEW_TOL = 1e-9
ROTATION_TOL = 1e-9

# Below this angle the Rodrigues coefficients switch to their Taylor series.
_SMALL_ANGLE = 1e-8


def hat(v):
    """Map a 3-vector to the skew-symmetric matrix with hat(v) @ w = v x w."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(S, tol=SKEW_TOL):
    """Inverse of hat on the skew part; rejects non-skew input.

    Raises
    ------
    NotSkewError
        If ||S + S^T||_F exceeds ``tol``.
    """
    S = np.asarray(S, dtype=float)
    residual = np.linalg.norm(S + S.T)
    if residual > tol:
        raise NotSkewError(f"symmetry residual {residual:.3e} exceeds {tol:.1e}")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def skew_part(A):
    """Orthogonal projection onto skew-symmetric matrices, (A - A^T)/2."""
    A = np.asarray(A, dtype=float)
    return 0.5 * (A - A.T)


def sym_part(A):
    """Orthogonal projection onto symmetric matrices, (A + A^T)/2."""
    A = np.asarray(A, dtype=float)
    return 0.5 * (A + A.T)


def frobenius(A, B):
    """Frobenius inner product trace(A^T B)."""
    return float(np.sum(np.asarray(A) * np.asarray(B)))


def exp_so3(v):
    """Exponential map so(3) -> SO(3) by the Rodrigues formula.

    Uses the series expansion of the sinc-type coefficients below the
    small-angle threshold to avoid 0/0.
    """
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v)
    K = hat(v)
    if theta < _SMALL_ANGLE:
        a = 1.0 - theta**2 / 6.0
        b = 0.5 - theta**2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * K + b * (K @ K)


def is_rotation(R, tol=ROTATION_TOL):
    R = np.asarray(R, dtype=float)
    return (np.linalg.norm(R.T @ R - np.eye(3)) <= tol) and (np.linalg.det(R) > 0.0)


def require_rotation(R, tol=ROTATION_TOL, what="matrix"):
    if not is_rotation(R, tol=tol):
        raise ValueError(f"{what} is not a rotation within tolerance {tol:.1e}")
    return np.asarray(R, dtype=float)


def project_to_rotation(M):
    """Nearest rotation in Frobenius norm (polar factor with det fixed to +1)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    R = U @ Vt
    if np.linalg.det(R) < 0.0:
        R = U @ np.diag([1.0, 1.0, -1.0]) @ Vt
    return R


def _check_domain(X):
    if np.linalg.det(X) <= 0.0:
        raise DomainError("det(X) <= 0: outside the potential's domain")


def potential(X):
    """Attraction potential (1/4) ||X^T X - I||_F^2.

    Nonnegative on {det X > 0} and zero exactly on SO(3).

    Raises
    ------
    DomainError
        If det(X) <= 0.
    """
    X = np.asarray(X, dtype=float)
    _check_domain(X)
    E = X.T @ X - np.eye(3)
    return 0.25 * float(np.sum(E * E))


def potential_grad(X):
    """Gradient of the potential, X (X^T X - I).  Vanishes on SO(3)."""
    X = np.asarray(X, dtype=float)
    _check_domain(X)
    return X @ (X.T @ X - np.eye(3))


def potential_hess_at_identity(V):
    """Hessian of the potential at the identity applied to a direction V.

    Equals 2 * sym_part(V): it annihilates skew directions, maps symmetric
    to symmetric, and on symmetric matrices every eigenvalue is 2.
    """
    return 2.0 * sym_part(V)


def potential_hess(X, D):
    """Hessian of the potential at X applied to a direction D.

    Analytic directional derivative of the gradient:
    D (X^T X - I) + X (D^T X + X^T D).
    """
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    return D @ (X.T @ X - np.eye(3)) + X @ (D.T @ X + X.T @ D)
