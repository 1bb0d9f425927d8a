"""Per-iteration measurements, KKT residuals and a brute-force LP oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .linalg import DualEstimate
    from .model import LinearProgram
    from .solver import SolveOutcome


class EmptyN(ValueError):
    """No entry of x_star is zero, so the potential has no log-barrier part."""


class NonpositiveGap(ValueError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    """Diagnostics of iterate k and of the step k -> k+1.

    The step fields (``step_alpha_eff``, ``step_beta_eff``, ``ratio``,
    ``infnorm_relative_step``) are None on the terminal record.
    ``ratio`` is (c'x_{k+1} - v*) / (c'x_k - v*).
    """

    k: int
    obj: float
    gap: float
    shanks_gap: float | None
    primal_residual: float
    min_x: float
    min_s: float
    lemma2_residual: float
    step_alpha_eff: float | None
    step_beta_eff: float | None
    ratio: float | None
    infnorm_relative_step: float | None


TRACE_COLUMNS = tuple(f.name for f in fields(TraceRecord))


def lemma2_residual(est: DualEstimate, c: np.ndarray) -> float:
    """|c'X^2 s - ||Xs||^2| / (1 + ||Xs||^2); zero for exact projections."""
    xs2 = float(est.scaled_slack @ est.scaled_slack)
    return abs(float(c @ est.direction_numerator) - xs2) / (1.0 + xs2)


def zero_set(x_star: np.ndarray, threshold: float = 1e-8) -> np.ndarray:
    return np.flatnonzero(np.asarray(x_star) <= threshold)


def potential_FN(x: np.ndarray, x_star: np.ndarray, c: np.ndarray, threshold: float = 1e-8) -> float:
    """Local potential p*log(c'x - c'x*) - sum_{j in N} log x_j.

    N is the set of entries of ``x_star`` at or below ``threshold``.
    """
    N = zero_set(x_star, threshold)
    if N.size == 0:
        raise EmptyN("x_star has no zero entries")
    gap = float(c @ x) - float(c @ x_star)
    if gap <= 0:
        raise NonpositiveGap(f"c'x - c'x* = {gap} is not positive")
    return N.size * np.log(gap) - float(np.sum(np.log(np.asarray(x)[N])))


@dataclass(frozen=True)
class PotentialReport:
    values: list[float]
    N: np.ndarray

    @property
    def p(self) -> int:
        return int(self.N.size)


def potential_report(iterates: list[np.ndarray], x_star: np.ndarray, c: np.ndarray) -> PotentialReport:
    """F_N along a stored iterate stream; iterates at or past the optimum get NaN."""
    N = zero_set(x_star)
    if N.size == 0:
        raise EmptyN("x_star has no zero entries")
    values = []
    for x in iterates:
        try:
            values.append(potential_FN(x, x_star, c))
        except NonpositiveGap:
            values.append(float("nan"))
    return PotentialReport(values, N)


@dataclass(frozen=True)
class KKTReport:
    primal_infeas: float
    dual_infeas: float
    min_s: float
    comp_slack: float


def kkt_report(outcome: SolveOutcome, lp: LinearProgram) -> KKTReport:
    x, y, s = outcome.x_star, outcome.y_star, outcome.s_star
    return KKTReport(
        primal_infeas=float(np.linalg.norm(lp.A @ x - lp.b)),
        dual_infeas=float(np.linalg.norm(lp.A.T @ y + s - lp.c)),
        min_s=float(np.min(s)),
        comp_slack=abs(float(x @ s)),
    )


@dataclass(frozen=True)
class OracleResult:
    status: str  # "Optimal", "Infeasible" or "Unbounded"
    value: float | None = None
    x: np.ndarray | None = None


def _basic_solutions(M: np.ndarray, rhs: np.ndarray, chunk: int = 20000):
    """Yield (columns, solution) for every nonsingular square column subset of M."""
    rows, n = M.shape
    combos = itertools.combinations(range(n), rows)
    scale = max(1.0, float(np.abs(M).max()))
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if block.size == 0:
            return
        sub = M[:, block].transpose(1, 0, 2)  # (batch, rows, rows)
        sign, logdet = np.linalg.slogdet(sub / scale)
        ok = (sign != 0) & (logdet > np.log(1e-10) * rows / 2)
        if not ok.any():
            continue
        sol = np.linalg.solve(sub[ok], np.broadcast_to(rhs, (int(ok.sum()), rows))[..., None])
        yield block[ok], sol[..., 0]


def vertex_oracle(lp: LinearProgram, tol: float = 1e-9) -> OracleResult:
    """Solve a small standard-form LP by enumerating every basis.

    Vertices are the nonnegative basic solutions of Ax = b; the LP is
    unbounded when some nonnegative basic solution of [A; e'] d = (0, 1)
    has c'd < 0. Assumes A has full row rank. Exponential in n.
    """
    A, b, c = lp.A, lp.b, lp.c
    m, n = A.shape
    best_val, best_x = None, None
    feas_tol = tol * (1.0 + float(np.abs(b).max(initial=0.0)))
    for cols, xb in _basic_solutions(A, b):
        feasible = np.all(xb >= -feas_tol, axis=1)
        if not feasible.any():
            continue
        vals = np.einsum("kj,kj->k", c[cols[feasible]], xb[feasible])
        i = int(np.argmin(vals))
        if best_val is None or vals[i] < best_val:
            best_val = float(vals[i])
            best_x = np.zeros(n)
            best_x[cols[feasible][i]] = np.maximum(xb[feasible][i], 0.0)
    if best_val is None:
        return OracleResult("Infeasible")

    M = np.vstack([A, np.ones(n)])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    if m + 1 <= n:
        ray_tol = tol * (1.0 + float(np.abs(c).max()))
        for cols, d in _basic_solutions(M, rhs):
            ok = np.all(d >= -tol, axis=1)
            if ok.any() and np.any(np.einsum("kj,kj->k", c[cols[ok]], d[ok]) < -ray_tol):
                return OracleResult("Unbounded")
    return OracleResult("Optimal", best_val, best_x)
