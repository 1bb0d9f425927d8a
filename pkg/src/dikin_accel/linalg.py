"""Normal-equations kernel for the affine-scaling direction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Cholesky failed even after one ridge retry."""


class GammaUndefined(ValueError):
    """gamma(u) requested for a vector with no positive entry."""


@dataclass(frozen=True)
class SpdFactor:
    L: np.ndarray
    ridge_used: float = 0.0

    @property
    def dimension(self) -> int:
        return self.L.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve((self.L, True), rhs, check_finite=False)


@dataclass(frozen=True)
class DualEstimate:
    """Dual estimates at a scaling point x.

    ``scaled_slack`` is X s and ``direction_numerator`` is X^2 s. ``factor``
    keeps the Cholesky factor of A X^2 A' for null-space corrections.
    """

    y: np.ndarray
    s: np.ndarray
    scaled_slack: np.ndarray
    direction_numerator: np.ndarray
    ridge_used: float = 0.0
    factor: SpdFactor | None = field(default=None, repr=False, compare=False)


def cholesky_spd(M: np.ndarray) -> SpdFactor:
    M = np.asarray(M, dtype=float)
    try:
        return SpdFactor(np.linalg.cholesky(M), 0.0)
    except np.linalg.LinAlgError:
        pass
    m = M.shape[0]
    ridge = 1e-10 * float(np.trace(M)) / m
    if not ridge > 0:
        raise NotPositiveDefinite("matrix has nonpositive trace")
    try:
        return SpdFactor(np.linalg.cholesky(M + ridge * np.eye(m)), ridge)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"not positive definite after ridge {ridge:.3g}") from exc


def dual_estimates(
    A: np.ndarray, x: np.ndarray, c: np.ndarray, refine: int = 1
) -> DualEstimate:
    """y = (A X^2 A')^-1 A X^2 c and s = c - A'y.

    The factorization runs in double precision; ``refine`` rounds of
    iterative refinement evaluate s and the residual A X^2 s in extended
    precision. Near the optimum the reduced costs of basic columns shrink
    below the rounding error of a double-precision c - A'y, and the long
    step divides that error by a vanishing gamma(Xs).
    """
    x2 = x * x
    AX2 = A * x2
    factor = cholesky_spd(AX2 @ A.T)
    y = factor.solve(AX2 @ c)
    A_ext = A.astype(np.longdouble)
    c_ext = c.astype(np.longdouble)
    x2_ext = x.astype(np.longdouble) ** 2
    y_ext = y.astype(np.longdouble)
    s_ext = c_ext - A_ext.T @ y_ext
    for _ in range(refine):
        r = (A_ext @ (x2_ext * s_ext)).astype(float)
        y_ext = y_ext + factor.solve(r).astype(np.longdouble)
        s_ext = c_ext - A_ext.T @ y_ext
    s = s_ext.astype(float)
    xs = x * s
    return DualEstimate(y_ext.astype(float), s, xs, x * xs, factor.ridge_used, factor)


def project_null_space(A: np.ndarray, x: np.ndarray, d: np.ndarray, factor: SpdFactor) -> np.ndarray:
    """Remove the component of d that violates A d = 0, in the X^2 metric.

    Returns d - X^2 A' (A X^2 A')^-1 A d. A direction built from s carries
    an error of order eps * |c| in A X^2 s; after division by a vanishing
    step normalizer that error would otherwise accumulate in A x - b.
    """
    return d - (x * x) * (A.T @ factor.solve(A @ d))


def gamma(u: np.ndarray) -> float:
    """Largest positive entry of u."""
    pos = u[u > 0]
    if pos.size == 0:
        raise GammaUndefined("vector has no positive entry")
    return float(pos.max())


def step_normalizer(est: DualEstimate, norm_rule: str, safeguard: bool = True) -> float:
    """theta in d = -alpha X^2 s / theta: gamma(Xs) or ||Xs||_2.

    With ``safeguard`` the gamma rule uses max(gamma(Xs), ||Xs||_inf), so
    no entry of x moves by more than alpha relative to itself even when a
    negative entry of Xs dominates the positive ones.
    """
    if norm_rule == "gamma":
        theta = gamma(est.scaled_slack)
        if safeguard:
            theta = max(theta, float(np.max(np.abs(est.scaled_slack))))
        return theta
    if norm_rule == "l2":
        theta = float(np.linalg.norm(est.scaled_slack))
        if theta == 0.0:
            raise GammaUndefined("||Xs|| is zero")
        return theta
    raise ValueError(f"unknown norm rule {norm_rule!r}")


def eap_direction(
    est: DualEstimate, alpha: float, norm_rule: str = "gamma", safeguard: bool = True
) -> np.ndarray:
    """Closed-form solution of the ellipsoidal subproblem, scaled by alpha."""
    return -alpha * est.direction_numerator / step_normalizer(est, norm_rule, safeguard)
