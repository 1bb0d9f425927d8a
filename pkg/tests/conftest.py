from pathlib import Path

import numpy as np
import pytest

from dikin_accel import LinearProgram, RandomLpSpec, random_dense_lp

DATA = Path(__file__).parent / "data"

MICRO_MPS = """NAME          TEST
ROWS
 N  COST
 E  R1
COLUMNS
    X1        COST      1.0          R1        1.0
    X2        COST      2.0          R1        1.0
RHS
    RHS       R1        2.0
ENDATA
"""


def micro_lp() -> LinearProgram:
    return LinearProgram(np.array([[1.0, 1.0]]), np.array([2.0]), np.array([1.0, 2.0]))


def small_random_family(count: int = 50, seed: int = 2024):
    """Seeded (m, n) draws with m in 3..6 and n in max(6, m+1)..12."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m = int(rng.integers(3, 7))
        n = int(rng.integers(max(6, m + 1), 13))
        lp, x0 = random_dense_lp(RandomLpSpec(m, n, i))
        out.append((lp, x0))
    return out


def invariant_violations(outcome, lp, alpha: float, beta: float) -> list[str]:
    """Per-iteration invariant checks on a solve trace; empty list when all hold."""
    bad = []
    bnorm = float(np.linalg.norm(lp.b))
    prev = None
    for rec in outcome.trace:
        if rec.primal_residual > 1e-7 * (1.0 + bnorm):
            bad.append(f"k={rec.k}: primal residual {rec.primal_residual:.3e}")
        if not rec.min_x > 0:
            bad.append(f"k={rec.k}: min x {rec.min_x:.3e}")
        if rec.lemma2_residual >= 1e-8:
            bad.append(f"k={rec.k}: lemma2 residual {rec.lemma2_residual:.3e}")
        if rec.infnorm_relative_step is not None and rec.infnorm_relative_step > alpha + beta + 1e-12:
            bad.append(f"k={rec.k}: relative step {rec.infnorm_relative_step:.6f}")
        if prev is not None and not rec.obj < prev.obj + 1e-10 * (1.0 + abs(prev.obj)):
            bad.append(f"k={rec.k}: objective rose {prev.obj!r} -> {rec.obj!r}")
        prev = rec
    return bad


@pytest.fixture
def micro():
    return micro_lp()


@pytest.fixture
def micro_mps_text():
    return MICRO_MPS


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
