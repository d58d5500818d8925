"""Receding-horizon tracking controller on the linearized error dynamics.

At every sampling instant the controller minimizes

    sum_{i=0}^{N-1} ( ||e_par||^2_{Q_R} + ||e_omega||^2_{Q_W} + ||du||^2_{Q_u} )
    + ||e_par,N||^2_{Qf_R} + ||e_omega,N||^2_{Qf_W}

over the stacked control offsets (du_0, ..., du_{N-1}), subject to the
per-step Euler error model and a box on the total applied torque.  The
transversal error is decoupled from (e_par, e_omega) and from the control,
so it never enters the program; its own contraction is guaranteed by the
0 < alpha*h < 1 step condition, which configuration validation enforces.

States are eliminated by condensing: stacking the predictions gives
X = Phi x_k + Gamma U, so the program collapses to a dense box QP in the
3N control variables with

    H = 2 (Gamma' Qbar Gamma + Qbar_u),   f = 2 Gamma' Qbar Phi x_k,

plus the constant stage cost of the fixed current state, kept so the QP
objective equals the rolled-out cost exactly.  The box on the total torque
u in [u_min, u_max] translates per block into
du in [u_min - u_ff, u_max - u_ff] for the feedforward value u_ff held
over that interval.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InfeasibleBoxError
from .linearization import check_transversal_condition
from .qp import QpProblem, QpSolution, solve_qp


def _as_weight(Q, name):
    Q = np.asarray(Q, dtype=float)
    if Q.shape == ():
        Q = float(Q) * np.eye(3)
    elif Q.shape == (3,):
        Q = np.diag(Q)
    if Q.shape != (3, 3):
        raise ConfigError(f"{name} must be a scalar, 3-vector or 3x3 matrix")
    if np.linalg.norm(Q - Q.T) > 1e-9:
        raise ConfigError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(Q).min() < -1e-12:
        raise ConfigError(f"{name} must be positive semidefinite")
    return Q


def _as_bound(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape == ():
        v = float(v) * np.ones(3)
    if v.shape != (3,):
        raise ConfigError(f"{name} must be a scalar or 3-vector")
    return v


@dataclass
class MpcConfig:
    """Horizon, weights and constraint boxes of the tracking QP.

    State boxes (on e_par and e_omega over the predicted stages) are
    supported but default to the whole space, matching the bundled
    scenarios.
    """

    horizon: int = 4
    h: float = 0.2
    q_attitude: np.ndarray = field(default_factory=lambda: 100.0 * np.eye(3))
    q_velocity: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(3))
    q_control: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(3))
    qf_attitude: np.ndarray = field(default_factory=lambda: 100.0 * np.eye(3))
    qf_velocity: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(3))
    u_min: np.ndarray = field(default_factory=lambda: -10.0 * np.ones(3))
    u_max: np.ndarray = field(default_factory=lambda: 10.0 * np.ones(3))
    e_par_min: np.ndarray | None = None
    e_par_max: np.ndarray | None = None
    e_omega_min: np.ndarray | None = None
    e_omega_max: np.ndarray | None = None
    alpha: float = 1.0

    def __post_init__(self):
        self.q_attitude = _as_weight(self.q_attitude, "q_attitude")
        self.q_velocity = _as_weight(self.q_velocity, "q_velocity")
        self.q_control = _as_weight(self.q_control, "q_control")
        self.qf_attitude = _as_weight(self.qf_attitude, "qf_attitude")
        self.qf_velocity = _as_weight(self.qf_velocity, "qf_velocity")
        self.u_min = _as_bound(self.u_min, "u_min")
        self.u_max = _as_bound(self.u_max, "u_max")
        for name in ("e_par_min", "e_par_max", "e_omega_min", "e_omega_max"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, _as_bound(v, name))

    def validate(self):
        """Raise ConfigError on any inconsistency; returns self when valid."""
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.h <= 0.0:
            raise ConfigError("step h must be positive")
        if np.any(self.u_min >= self.u_max):
            raise ConfigError("control box must satisfy u_min < u_max componentwise")
        ok, margin = check_transversal_condition(self.alpha, self.h)
        if not ok:
            raise ConfigError(
                f"transversal step condition fails: alpha*h = {self.alpha * self.h:.4g} "
                f"is outside (0, 1) (margin {margin:.4g})")
        return self

    def has_state_box(self):
        return any(v is not None for v in (self.e_par_min, self.e_par_max,
                                           self.e_omega_min, self.e_omega_max))


def condense(model, k, cfg):
    """Prediction matrices X = Phi x_k + Gamma U over the horizon at step k."""
    N = cfg.horizon
    Phi = np.zeros((6 * N, 6))
    Gamma = np.zeros((6 * N, 3 * N))
    for i in range(N):
        A = model.A[k + i]
        if i == 0:
            Phi[:6] = A
        else:
            Phi[6 * i:6 * i + 6] = A @ Phi[6 * (i - 1):6 * i]
            Gamma[6 * i:6 * i + 6, :3 * i] = A @ Gamma[6 * (i - 1):6 * i, :3 * i]
        Gamma[6 * i:6 * i + 6, 3 * i:3 * i + 3] = model.B[k + i]
    return Phi, Gamma


def stage_weight_blocks(cfg):
    """Block weights on the stacked predictions (x_{k+1}, ..., x_{k+N})."""
    N = cfg.horizon
    Q = np.zeros((6 * N, 6 * N))
    for i in range(N - 1):
        Q[6 * i:6 * i + 3, 6 * i:6 * i + 3] = cfg.q_attitude
        Q[6 * i + 3:6 * i + 6, 6 * i + 3:6 * i + 6] = cfg.q_velocity
    i = N - 1
    Q[6 * i:6 * i + 3, 6 * i:6 * i + 3] = cfg.qf_attitude
    Q[6 * i + 3:6 * i + 6, 6 * i + 3:6 * i + 6] = cfg.qf_velocity
    return Q


def build_qp(err, k, model, u_ff, cfg):
    """Condensed tracking QP at grid index k.

    Parameters
    ----------
    err : ErrorState
        Measured error at instant k; only (e_par, e_omega) enter.
    model : DiscreteLinearModel covering steps k .. k+N-1
    u_ff : (n, 3) array
        Feedforward torque held over each interval; translates the control
        box per block.
    cfg : MpcConfig

    Raises
    ------
    InfeasibleBoxError
        If any translated control interval is empty.
    """
    N = cfg.horizon
    if k + N > len(model):
        raise ConfigError(f"model too short: need steps {k}..{k + N - 1}")
    x0 = np.concatenate([np.asarray(err.e_par, float), np.asarray(err.e_omega, float)])
    Phi, Gamma = condense(model, k, cfg)
    Qbar = stage_weight_blocks(cfg)
    Qu = np.kron(np.eye(N), cfg.q_control)
    H = 2.0 * (Gamma.T @ Qbar @ Gamma + Qu)
    H = 0.5 * (H + H.T)
    f = 2.0 * Gamma.T @ Qbar @ (Phi @ x0)
    stage0 = np.block([[cfg.q_attitude, np.zeros((3, 3))],
                       [np.zeros((3, 3)), cfg.q_velocity]])
    constant = float(x0 @ stage0 @ x0 + (Phi @ x0) @ Qbar @ (Phi @ x0))

    lo = np.empty(3 * N)
    hi = np.empty(3 * N)
    for i in range(N):
        lo[3 * i:3 * i + 3] = cfg.u_min - u_ff[k + i]
        hi[3 * i:3 * i + 3] = cfg.u_max - u_ff[k + i]
    if np.any(lo > hi):
        raise InfeasibleBoxError("translated control box is empty")

    G = g_lo = g_hi = None
    if cfg.has_state_box():
        rows, row_lo, row_hi = [], [], []
        par_lo = cfg.e_par_min if cfg.e_par_min is not None else -np.inf * np.ones(3)
        par_hi = cfg.e_par_max if cfg.e_par_max is not None else np.inf * np.ones(3)
        om_lo = cfg.e_omega_min if cfg.e_omega_min is not None else -np.inf * np.ones(3)
        om_hi = cfg.e_omega_max if cfg.e_omega_max is not None else np.inf * np.ones(3)
        # bounds on predicted states: x_{k+i} = Phi_i x0 + Gamma_i U
        for i in range(N):
            rows.append(Gamma[6 * i:6 * i + 6, :])
            offset = Phi[6 * i:6 * i + 6] @ x0
            row_lo.append(np.concatenate([par_lo, om_lo]) - offset)
            row_hi.append(np.concatenate([par_hi, om_hi]) - offset)
        G = np.vstack(rows)
        g_lo = np.concatenate(row_lo)
        g_hi = np.concatenate(row_hi)

    return QpProblem(H=H, f=f, lo=lo, hi=hi, constant=constant,
                     G=G, g_lo=g_lo, g_hi=g_hi)


def rollout_cost(err, k, model, cfg, U):
    """Stage cost of explicitly rolling the error model under controls U.

    Independent of the condensed matrices; used to cross-check them.
    """
    N = cfg.horizon
    x = np.concatenate([np.asarray(err.e_par, float), np.asarray(err.e_omega, float)])
    U = np.asarray(U, dtype=float).reshape(N, 3)
    total = 0.0
    for i in range(N):
        total += x[:3] @ cfg.q_attitude @ x[:3] + x[3:] @ cfg.q_velocity @ x[3:]
        total += U[i] @ cfg.q_control @ U[i]
        x = model.A[k + i] @ x + model.B[k + i] @ U[i]
    total += x[:3] @ cfg.qf_attitude @ x[:3] + x[3:] @ cfg.qf_velocity @ x[3:]
    return float(total)


class MpcController:
    """Stateful receding-horizon controller with warm starting.

    One instance per control loop; holds the previous solution shifted by
    one block as the next initial iterate.  Warm and cold starts converge
    to the same minimizer (the QP is strictly convex in the controls), so
    warm starting changes iteration counts, not results.
    """

    def __init__(self, cfg, model, u_ff, tol=1e-8, max_iter=10000):
        cfg.validate()
        self.cfg = cfg
        self.model = model
        self.u_ff = np.asarray(u_ff, dtype=float)
        self.tol = tol
        self.max_iter = max_iter
        self._warm = None

    def step(self, err, k):
        """Solve the QP at grid index k; returns (du_k, QpSolution)."""
        problem = build_qp(err, k, self.model, self.u_ff, self.cfg)
        warm = None
        if self._warm is not None:
            warm = np.concatenate([self._warm[3:], np.zeros(3)])
            warm = np.clip(warm, problem.lo, problem.hi)
        sol = solve_qp(problem, tol=self.tol, max_iter=self.max_iter, warm_start=warm)
        self._warm = sol.x.copy()
        return sol.x[:3].copy(), sol

    def reset(self):
        self._warm = None


def mpc_step(err, k, model, u_ff, cfg, warm_start=None, tol=1e-8, max_iter=10000):
    """Single receding-horizon step without controller state."""
    problem = build_qp(err, k, model, u_ff, cfg)
    sol = solve_qp(problem, tol=tol, max_iter=max_iter, warm_start=warm_start)
    return sol.x[:3].copy(), sol
