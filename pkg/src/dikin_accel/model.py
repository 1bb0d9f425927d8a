"""LP data types, standard-form conversion, random instances and Phase-I."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InfeasibleBounds(ValueError):
    """A column whose lower bound exceeds its upper bound."""


def _names(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(count)]


@dataclass(frozen=True)
class LinearProgram:
    """Standard-form LP: min c'x s.t. Ax = b, x >= 0."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    col_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        m, n = A.shape
        if b.shape != (m,):
            raise ValueError(f"b has shape {b.shape}, expected ({m},)")
        if c.shape != (n,):
            raise ValueError(f"c has shape {c.shape}, expected ({n},)")
        col_names = list(self.col_names) or _names("x", n)
        row_names = list(self.row_names) or _names("r", m)
        if len(col_names) != n or len(row_names) != m:
            raise ValueError("name lists do not match the matrix dimensions")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "col_names", col_names)
        object.__setattr__(self, "row_names", row_names)

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def num_cols(self) -> int:
        return self.A.shape[1]

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x)

    def residual(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.A @ x - self.b))


@dataclass(frozen=True)
class GeneralLP:
    """LP with row senses ('L', 'E', 'G') and column bounds, as read from MPS.

    ``objective_offset`` is the constant term of the objective.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    senses: list[str]
    lower: np.ndarray
    upper: np.ndarray
    col_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)
    objective_offset: float = 0.0
    name: str = ""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).reshape(len(self.b), len(self.c))
        m, n = A.shape
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if len(self.senses) != m or lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("senses/bounds do not match the matrix dimensions")
        bad = set(self.senses) - {"L", "E", "G"}
        if bad:
            raise ValueError(f"unknown row senses {sorted(bad)}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "senses", list(self.senses))
        object.__setattr__(self, "col_names", list(self.col_names) or _names("x", n))
        object.__setattr__(self, "row_names", list(self.row_names) or _names("r", m))

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def num_cols(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class ColumnMap:
    """Recovers original variables from a standard-form point.

    Original column ``j`` equals ``offset[j] + sum(sign * x_std[idx])`` over
    its ``terms[j]`` entries. Fixed columns have no terms.
    """

    terms: list[list[tuple[int, float]]]
    offset: np.ndarray
    objective_offset: float
    num_structural: int

    def recover(self, x_std: np.ndarray) -> np.ndarray:
        x = self.offset.copy()
        for j, terms in enumerate(self.terms):
            for idx, sign in terms:
                x[j] += sign * x_std[idx]
        return x

    def embed(self, x_orig: np.ndarray, glp: GeneralLP, std: LinearProgram) -> np.ndarray:
        """Map a point of the general form to the standard form.

        Slack values are filled in so that the equality rows hold; the
        result is nonnegative whenever ``x_orig`` is feasible.
        """
        x_orig = np.asarray(x_orig, dtype=float)
        out = np.zeros(std.num_cols)
        for j, terms in enumerate(self.terms):
            if not terms:
                continue
            value = x_orig[j] - self.offset[j]
            if len(terms) == 2:
                # free split: (pos, +1), (neg, -1)
                out[terms[0][0]] = max(value, 0.0)
                out[terms[1][0]] = max(-value, 0.0)
            else:
                idx, sign = terms[0]
                out[idx] = sign * value
        # every non-structural column is a slack with a single +-1 entry
        rows_value = std.A[:, : self.num_structural] @ out[: self.num_structural]
        for k in range(self.num_structural, std.num_cols):
            i = int(np.flatnonzero(std.A[:, k])[0])
            out[k] = (std.b[i] - rows_value[i]) / std.A[i, k]
        return out


def standardize(glp: GeneralLP) -> tuple[LinearProgram, ColumnMap]:
    """Convert a GeneralLP to equality form with nonnegative variables.

    Structural columns come first (in original order, free columns split
    into a +/- pair), then one slack/surplus per inequality row, then one
    slack per finite upper bound.
    """
    m, n = glp.A.shape
    A, b, c = glp.A, glp.b.copy(), glp.c
    lower, upper = glp.lower, glp.upper
    if np.any(lower > upper):
        j = int(np.flatnonzero(lower > upper)[0])
        raise InfeasibleBounds(
            f"column {glp.col_names[j]}: lower {lower[j]} > upper {upper[j]}"
        )

    cols: list[np.ndarray] = []
    costs: list[float] = []
    names: list[str] = []
    terms: list[list[tuple[int, float]]] = []
    offset = np.zeros(n)
    obj_offset = glp.objective_offset
    ub_rows: list[tuple[int, float]] = []  # (std column, bound width)

    for j in range(n):
        lo, up, name = lower[j], upper[j], glp.col_names[j]
        a, cj = A[:, j], c[j]
        if np.isfinite(lo) and lo == up:
            offset[j] = lo
            b -= a * lo
            obj_offset += cj * lo
            terms.append([])
        elif np.isfinite(lo):
            if lo != 0.0:
                offset[j] = lo
                b -= a * lo
                obj_offset += cj * lo
            terms.append([(len(cols), 1.0)])
            if np.isfinite(up):
                ub_rows.append((len(cols), up - lo))
            cols.append(a)
            costs.append(cj)
            names.append(name)
        elif np.isfinite(up):
            # x = up - x', x' >= 0
            offset[j] = up
            b -= a * up
            obj_offset += cj * up
            terms.append([(len(cols), -1.0)])
            cols.append(-a)
            costs.append(-cj)
            names.append(name)
        else:
            terms.append([(len(cols), 1.0), (len(cols) + 1, -1.0)])
            cols.extend([a, -a])
            costs.extend([cj, -cj])
            names.extend([f"{name}+", f"{name}-"])

    num_structural = len(cols)
    ineq = [i for i, s in enumerate(glp.senses) if s != "E"]
    total_rows = m + len(ub_rows)
    total_cols = num_structural + len(ineq) + len(ub_rows)

    A_std = np.zeros((total_rows, total_cols))
    if num_structural:
        A_std[:m, :num_structural] = np.column_stack(cols)
    b_std = np.concatenate([b, np.array([w for _, w in ub_rows], dtype=float)])
    c_std = np.zeros(total_cols)
    c_std[:num_structural] = costs
    row_names = list(glp.row_names)

    k = num_structural
    for i in ineq:
        A_std[i, k] = 1.0 if glp.senses[i] == "L" else -1.0
        names.append(f"slack_{glp.row_names[i]}")
        k += 1
    for r, (col, width) in enumerate(ub_rows):
        A_std[m + r, col] = 1.0
        A_std[m + r, k] = 1.0
        names.append(f"ubslack_{names[col]}")
        row_names.append(f"ub_{names[col]}")
        k += 1

    lp = LinearProgram(A_std, b_std, c_std, col_names=names, row_names=row_names)
    return lp, ColumnMap(terms, offset, float(obj_offset), num_structural)


@dataclass(frozen=True)
class RandomLpSpec:
    """Parameters of a dense Gaussian instance; ``variance`` is sigma squared."""

    m: int
    n: int
    seed: int = 0
    mean: float = -9.0
    variance: float = 9.0
    convex_lambda: float = 0.5

    def __post_init__(self):
        if self.m < 1 or self.n <= self.m:
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        if self.variance <= 0:
            raise ValueError("variance must be positive")
        if not 0.0 <= self.convex_lambda <= 1.0:
            raise ValueError("convex_lambda must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def random_dense_lp(spec: RandomLpSpec) -> tuple[LinearProgram, np.ndarray]:
    """Draw a dense LP with i.i.d. Gaussian A and c and a strictly interior x0.

    b is the convex combination lam*A@x1 + (1-lam)*A@x2 of two positive
    vectors, so x0 = lam*x1 + (1-lam)*x2 is feasible.
    """
    rng = np.random.default_rng(spec.seed)
    std = np.sqrt(spec.variance)
    A = rng.normal(spec.mean, std, size=(spec.m, spec.n))
    c = rng.normal(spec.mean, std, size=spec.n)
    x1 = np.abs(rng.standard_normal(spec.n)) + 0.1
    x2 = np.abs(rng.standard_normal(spec.n)) + 0.1
    lam = spec.convex_lambda
    b = lam * (A @ x1) + (1.0 - lam) * (A @ x2)
    x0 = lam * x1 + (1.0 - lam) * x2
    return LinearProgram(A, b, c), x0


@dataclass(frozen=True)
class Phase1Problem:
    augmented_lp: LinearProgram
    artificial_index: int | None
    big_m: float
    x0: np.ndarray


def phase1(lp: LinearProgram) -> Phase1Problem:
    """Big-M augmentation ``[A | b - A e]`` with start point ``(e, 1)``.

    If ``e`` is already feasible no column is added and ``x0 = e``.
    """
    n = lp.num_cols
    e = np.ones(n)
    r = lp.b - lp.A @ e
    big_m = 1e6 * max(1.0, float(np.max(np.abs(lp.c), initial=0.0)))
    if np.linalg.norm(r) <= 1e-12 * (1.0 + np.linalg.norm(lp.b)):
        return Phase1Problem(lp, None, big_m, e)
    A_aug = np.column_stack([lp.A, r])
    c_aug = np.append(lp.c, big_m)
    aug = LinearProgram(
        A_aug, lp.b, c_aug, col_names=lp.col_names + ["artificial"], row_names=lp.row_names
    )
    return Phase1Problem(aug, n, big_m, np.ones(n + 1))
