"""AFS / GAFS / AAFS iteration loop."""

from __future__ import annotations

import enum
import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import TraceRecord, lemma2_residual
from .linalg import DualEstimate, NotPositiveDefinite, dual_estimates, project_null_space, step_normalizer
from .model import LinearProgram, phase1

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


class Algorithm(str, enum.Enum):
    AFS = "afs"
    GAFS = "gafs"
    AAFS = "aafs"


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    UNBOUNDED = "Unbounded"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"
    NUMERICAL_FAILURE = "NumericalFailure"
    CONTINUE = "Continue"


EXIT_CODES = {
    Status.OPTIMAL: 0,
    Status.UNBOUNDED: 2,
    Status.INFEASIBLE: 3,
    Status.ITERATION_LIMIT: 4,
    Status.NUMERICAL_FAILURE: 5,
}


class NumericalFailure(RuntimeError):
    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


def in_region_q(alpha: float, beta: float) -> bool:
    return 0.0 < alpha < 1.0 and 0.0 <= beta < 1.0 / GOLDEN_RATIO and alpha + beta <= 2.0 / 3.0


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    ``dual_tol`` is the slack allowed when testing s >= 0 and
    ``gamma_safeguard`` caps the gamma-rule step at alpha per entry; see
    the README for both.
    """

    algorithm: Algorithm = Algorithm.GAFS
    alpha: float = 0.55
    beta: float = 0.1
    epsilon: float = 1e-7
    norm_rule: str = "gamma"
    max_iter: int = 10000
    shanks_guard_tau: float = 1e-12
    enforce_Q: bool = True
    dual_tol: float = 1e-8
    gamma_safeguard: bool = True

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.norm_rule not in ("gamma", "l2"):
            raise ValueError(f"norm_rule must be 'gamma' or 'l2', got {self.norm_rule!r}")
        if self.algorithm is Algorithm.AFS and self.beta != 0.0:
            raise ValueError("AFS requires beta = 0")
        if self.epsilon <= 0 or self.max_iter < 1 or self.shanks_guard_tau <= 0:
            raise ValueError("epsilon, max_iter and shanks_guard_tau must be positive")
        if self.enforce_Q:
            if not in_region_q(self.alpha, self.beta):
                raise ValueError(
                    f"(alpha, beta) = ({self.alpha}, {self.beta}) outside the admissible "
                    "region 0<alpha<1, 0<=beta<1/phi, alpha+beta<=2/3"
                )
        else:
            if not (0.0 < self.alpha and 0.0 <= self.beta):
                raise ValueError("alpha must be positive and beta nonnegative")
            if not in_region_q(self.alpha, self.beta):
                warnings.warn(
                    f"(alpha, beta) = ({self.alpha}, {self.beta}) outside the admissible "
                    "region; convergence is not guaranteed",
                    stacklevel=2,
                )


@dataclass(frozen=True)
class IterateState:
    k: int
    x: np.ndarray
    delta_x: np.ndarray
    est: DualEstimate
    gap: float
    obj: float


def make_state(lp: LinearProgram, k: int, x: np.ndarray, x_prev: np.ndarray | None) -> IterateState:
    est = dual_estimates(lp.A, x, lp.c)
    delta = np.zeros_like(x) if x_prev is None else x - x_prev
    return IterateState(k, x, delta, est, float(x @ est.s), lp.objective(x))


def momentum_scale(state: IterateState) -> float:
    """||X_k^-1 delta(x_k)||_inf, zero for k = 0 or a stalled iterate."""
    if state.k == 0:
        return 0.0
    return float(np.max(np.abs(state.delta_x / state.x), initial=0.0))


def update_z(state: IterateState, beta: float) -> np.ndarray:
    scale = momentum_scale(state)
    if beta == 0.0 or scale == 0.0:
        return state.x.copy()
    return state.x + (beta / scale) * state.delta_x


def step(lp: LinearProgram, state: IterateState, config: SolverConfig) -> IterateState:
    """One generalized affine-scaling step from ``state``."""
    z = update_z(state, config.beta)
    theta = step_normalizer(state.est, config.norm_rule, config.gamma_safeguard)
    d = (config.alpha / theta) * state.est.direction_numerator
    if state.est.factor is not None:
        d = project_null_space(lp.A, state.x, d, state.est.factor)
        # the correction may lift one entry past the alpha cap by rounding;
        # a scalar rescale keeps A d = 0
        reach = float(np.max(np.abs(d) / state.x))
        if reach > config.alpha:
            d *= config.alpha / reach
    x_next = z - d
    k = state.k + 1
    if not np.all(x_next > 0):
        j = int(np.argmin(x_next))
        raise NumericalFailure(f"x[{j}] = {x_next[j]:.3e} is not positive", k)
    obj_next = lp.objective(x_next)
    if obj_next > state.obj + 1e-10 * (1.0 + abs(state.obj)):
        raise NumericalFailure(f"objective increased from {state.obj!r} to {obj_next!r}", k)
    return make_state(lp, k, x_next, state.x)


def shanks_apply(
    x0: np.ndarray, x1: np.ndarray, x2: np.ndarray, tau: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise Aitken delta-squared of three consecutive iterates.

    Returns the transform and the mask of entries where the guard fell
    back to the newest iterate ``x2`` (near-zero second difference or
    nonpositive result). On a geometric tail converging to zero the
    transform lands on zero up to rounding, so a fallback to the oldest
    iterate would report an estimate worse than the plain iterate.
    """
    x0, x1, x2 = (np.asarray(v, dtype=float) for v in (x0, x1, x2))
    d1 = x0 - x1
    denom = x0 - 2.0 * x1 + x2
    fallback = np.abs(denom) <= tau * (np.abs(x0) + np.abs(x1) + np.abs(x2) + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        B = x0 - d1 * d1 / np.where(fallback, 1.0, denom)
    fallback |= ~(B > 0)
    return np.where(fallback, x2, B), fallback


class ShanksWindow:
    """Rolling buffer of the last three iterates and their transform."""

    def __init__(self, tau: float = 1e-12):
        self.tau = tau
        self.buffer: deque[np.ndarray] = deque(maxlen=3)
        self.B: np.ndarray | None = None
        self.fallback_mask: np.ndarray | None = None

    def push(self, x: np.ndarray) -> None:
        self.buffer.append(x)
        if len(self.buffer) == 3:
            self.B, self.fallback_mask = shanks_apply(*self.buffer, tau=self.tau)

    @property
    def complete(self) -> bool:
        return len(self.buffer) == 3

    def estimate(self, x: np.ndarray) -> np.ndarray:
        return self.B if self.B is not None else x


def tested_gap(state: IterateState, config: SolverConfig, window: ShanksWindow | None) -> float:
    if config.algorithm is Algorithm.AAFS and window is not None:
        return float(window.estimate(state.x) @ state.est.s)
    return state.gap


def check_stop(state: IterateState, config: SolverConfig, window: ShanksWindow | None = None) -> Status:
    """Optimality first, then unboundedness."""
    s = state.est.s
    if np.all(s >= -config.dual_tol) and tested_gap(state, config, window) < config.epsilon:
        return Status.OPTIMAL
    if np.all(state.est.direction_numerator <= 0):
        return Status.UNBOUNDED
    return Status.CONTINUE


@dataclass
class SolveOutcome:
    status: Status
    x_star: np.ndarray | None = None
    y_star: np.ndarray | None = None
    s_star: np.ndarray | None = None
    final_gap: float = math.nan
    iterations: int = 0
    trace: list[TraceRecord] = field(default_factory=list)
    message: str = ""
    iterates: list[np.ndarray] | None = None
    artificial_value: float | None = None
    objective: float | None = None


def _record(
    lp: LinearProgram,
    state: IterateState,
    config: SolverConfig,
    window: ShanksWindow,
    nxt: IterateState | None,
    v_star: float | None,
) -> TraceRecord:
    shanks_gap = None
    if config.algorithm is Algorithm.AAFS:
        shanks_gap = tested_gap(state, config, window)
    alpha_eff = beta_eff = ratio = rel_step = None
    if nxt is not None:
        alpha_eff = config.alpha / step_normalizer(state.est, config.norm_rule, config.gamma_safeguard)
        scale = momentum_scale(state)
        beta_eff = config.beta / scale if scale > 0 else 0.0
        rel_step = float(np.max(np.abs(nxt.x - state.x) / state.x))
        if v_star is not None and state.obj != v_star:
            ratio = (nxt.obj - v_star) / (state.obj - v_star)
    return TraceRecord(
        k=state.k,
        obj=state.obj,
        gap=state.gap,
        shanks_gap=shanks_gap,
        primal_residual=lp.residual(state.x),
        min_x=float(state.x.min()),
        min_s=float(state.est.s.min()),
        lemma2_residual=lemma2_residual(state.est, lp.c),
        step_alpha_eff=alpha_eff,
        step_beta_eff=beta_eff,
        ratio=ratio,
        infnorm_relative_step=rel_step,
    )


def _iterate(
    lp: LinearProgram,
    x0: np.ndarray,
    config: SolverConfig,
    v_star: float | None,
    keep_iterates: bool,
) -> SolveOutcome:
    window = ShanksWindow(config.shanks_guard_tau)
    trace: list[TraceRecord] = []
    iterates: list[np.ndarray] | None = [] if keep_iterates else None
    state: IterateState | None = None
    try:
        state = make_state(lp, 0, np.asarray(x0, dtype=float).copy(), None)
        window.push(state.x)
        while True:
            if iterates is not None:
                iterates.append(state.x)
            status = check_stop(state, config, window)
            if status is Status.CONTINUE and state.k >= config.max_iter:
                status = Status.ITERATION_LIMIT
            if status is not Status.CONTINUE:
                trace.append(_record(lp, state, config, window, None, v_star))
                break
            nxt = step(lp, state, config)
            trace.append(_record(lp, state, config, window, nxt, v_star))
            window.push(nxt.x)
            state = nxt
    except (NumericalFailure, NotPositiveDefinite) as exc:
        k = exc.iteration if isinstance(exc, NumericalFailure) else (state.k + 1 if state else 0)
        return SolveOutcome(
            Status.NUMERICAL_FAILURE,
            x_star=None if state is None else state.x,
            iterations=k,
            trace=trace,
            message=str(exc) if isinstance(exc, NumericalFailure) else f"iteration {k}: {exc}",
            iterates=iterates,
        )

    x_star = state.x
    if config.algorithm is Algorithm.AAFS:
        x_star = window.estimate(state.x)
    return SolveOutcome(
        status,
        x_star=x_star,
        y_star=state.est.y,
        s_star=state.est.s,
        final_gap=tested_gap(state, config, window),
        iterations=state.k,
        trace=trace,
        iterates=iterates,
    )


def solve(
    lp: LinearProgram,
    x0: np.ndarray | None = None,
    config: SolverConfig | None = None,
    *,
    v_star: float | None = None,
    keep_iterates: bool = False,
) -> SolveOutcome:
    """Run AFS, GAFS or AAFS from ``x0``.

    Without ``x0`` a big-M Phase-I column is appended and the start is
    ``(e, 1)``; the artificial column is stripped from the result and a
    nonzero artificial at optimality is reported as Infeasible.
    ``v_star``, when given, fills the per-step objective ratios of the trace.
    """
    config = config or SolverConfig()
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (lp.num_cols,) or not np.all(x0 > 0):
            raise ValueError("x0 must be a strictly positive vector of length n")
        out = _iterate(lp, x0, config, v_star, keep_iterates)
        return _finish(out, lp)

    p1 = phase1(lp)
    out = _iterate(p1.augmented_lp, p1.x0, config, v_star, keep_iterates)
    if p1.artificial_index is None:
        return _finish(out, lp)
    art = p1.artificial_index
    if out.x_star is not None:
        out.artificial_value = float(out.x_star[art])
        x_full = out.x_star
        out.x_star = np.delete(x_full, art)
        if out.s_star is not None:
            out.s_star = np.delete(out.s_star, art)
        if out.iterates is not None:
            out.iterates = [np.delete(x, art) for x in out.iterates]
        if out.status is Status.OPTIMAL:
            limit = 1e-6 * (1.0 + float(np.max(np.abs(x_full))))
            if out.artificial_value > limit:
                out.status = Status.INFEASIBLE
                out.message = (
                    f"artificial variable {out.artificial_value:.3e} exceeds {limit:.3e}"
                )
    return _finish(out, lp)


def _finish(out: SolveOutcome, lp: LinearProgram) -> SolveOutcome:
    if out.x_star is not None:
        out.objective = lp.objective(out.x_star)
    return out
