"""Reader for fixed- and free-format MPS files.

Supported sections: NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA. RANGES and
integer markers are rejected. Every error carries a 1-based line number.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

from .model import GeneralLP

MpsSource = Union[str, bytes, IO[str], IO[bytes]]

_SENSE = {"E": "E", "L": "L", "G": "G", "N": "N"}
_VALUE_BOUNDS = {"LO", "UP", "FX"}
_FLAG_BOUNDS = {"FR", "MI", "PL"}
_SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"}


class MpsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class TruncatedFile(MpsError):
    pass


class Unsupported(MpsError):
    pass


class UndeclaredRow(MpsError):
    pass


class UndeclaredColumn(MpsError):
    pass


class MalformedNumber(MpsError):
    pass


class MalformedRecord(MpsError):
    pass


class EmptyProblem(MpsError):
    pass


@dataclass
class MpsDocument:
    name: str = ""
    rows: list[tuple[str, str]] = field(default_factory=list)
    columns: dict[tuple[str, str], float] = field(default_factory=dict)
    col_order: list[str] = field(default_factory=list)
    rhs: dict[str, float] = field(default_factory=dict)
    bounds: list[tuple[str, str, float | None]] = field(default_factory=list)
    objective: str | None = None
    duplicates: int = 0
    endata_line: int | None = None

    @property
    def has_duplicates(self) -> bool:
        return self.duplicates > 0

    def constraint_nonzeros(self) -> int:
        """Nonzero COLUMNS entries outside N rows, after duplicate merging."""
        senses = dict((name, sense) for sense, name in self.rows)
        return sum(1 for (_, r), v in self.columns.items() if senses[r] != "N" and v != 0.0)


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedNumber(f"cannot parse {token!r} as a number", lineno) from None
    if math.isnan(value):
        raise MalformedNumber(f"NaN value {token!r}", lineno)
    return value


def _fixed_fields(line: str) -> list[str]:
    """Split a line on the classic MPS column boundaries."""
    spans = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)]
    out = [line[a:b].strip() for a, b in spans]
    while out and not out[-1]:
        out.pop()
    return out


def _open(source: MpsSource) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("latin-1"))
    if isinstance(source, str):
        return io.StringIO(source)
    first = source.read()
    if isinstance(first, bytes):
        first = first.decode("latin-1")
    return io.StringIO(first)


def read_mps(source: MpsSource) -> MpsDocument:
    """Tokenize an MPS stream into an MpsDocument."""
    doc = MpsDocument()
    declared: dict[str, str] = {}
    known_cols: set[str] = set()
    section = None
    seen_endata = False
    lineno = 0
    for lineno, raw in enumerate(_open(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not line[0].isspace():
            head, _, rest = line.strip().partition(" ")
            head = head.upper()
            if head not in _SECTIONS:
                raise Unsupported(f"section {head!r} is not supported", lineno)
            section = head
            if head == "NAME":
                doc.name = rest.strip().split()[0] if rest.strip() else ""
            elif head == "ENDATA":
                seen_endata = True
                doc.endata_line = lineno
                break
            continue

        tokens = line.split()
        if section == "ROWS":
            if len(tokens) != 2:
                tokens = _fixed_fields(line)
            if len(tokens) != 2 or tokens[0].upper() not in _SENSE:
                raise MalformedRecord(f"bad ROWS record {line.strip()!r}", lineno)
            sense, name = tokens[0].upper(), tokens[1]
            if name in declared:
                raise MalformedRecord(f"row {name!r} declared twice", lineno)
            declared[name] = sense
            doc.rows.append((sense, name))
            if sense == "N" and doc.objective is None:
                doc.objective = name
        elif section == "COLUMNS":
            if "'MARKER'" in line:
                raise Unsupported("integer markers are not supported", lineno)
            if len(tokens) not in (3, 5):
                tokens = _fixed_fields(line)
            if len(tokens) not in (3, 5):
                raise MalformedRecord(f"bad COLUMNS record {line.strip()!r}", lineno)
            col = tokens[0]
            if col not in known_cols:
                known_cols.add(col)
                doc.col_order.append(col)
            for row, val in zip(tokens[1::2], tokens[2::2]):
                if row not in declared:
                    raise UndeclaredRow(f"row {row!r} used before declaration", lineno)
                value = _number(val, lineno)
                if not math.isfinite(value) and declared[row] != "N":
                    raise MalformedNumber(f"non-finite constraint coefficient {val!r}", lineno)
                key = (col, row)
                if key in doc.columns:
                    doc.duplicates += 1
                    doc.columns[key] += value
                else:
                    doc.columns[key] = value
        elif section == "RHS":
            if len(tokens) not in (2, 3, 4, 5):
                tokens = _fixed_fields(line)
            if len(tokens) not in (2, 3, 4, 5):
                raise MalformedRecord(f"bad RHS record {line.strip()!r}", lineno)
            pairs = tokens[1:] if len(tokens) % 2 == 1 else tokens
            for row, val in zip(pairs[0::2], pairs[1::2]):
                if row not in declared:
                    raise UndeclaredRow(f"row {row!r} used before declaration", lineno)
                doc.rhs[row] = doc.rhs.get(row, 0.0) + _number(val, lineno)
        elif section == "BOUNDS":
            if not tokens:
                continue
            kind = tokens[0].upper()
            if kind in _VALUE_BOUNDS:
                if len(tokens) not in (3, 4):
                    raise MalformedRecord(f"bad BOUNDS record {line.strip()!r}", lineno)
                col, value = tokens[-2], _number(tokens[-1], lineno)
            elif kind in _FLAG_BOUNDS:
                if len(tokens) not in (2, 3):
                    raise MalformedRecord(f"bad BOUNDS record {line.strip()!r}", lineno)
                col, value = tokens[-1], None
            else:
                raise Unsupported(f"bound type {kind!r} is not supported", lineno)
            if col not in known_cols:
                raise UndeclaredColumn(f"column {col!r} not in COLUMNS", lineno)
            doc.bounds.append((kind, col, value))
        else:
            raise MalformedRecord("data record outside of a section", lineno)

    if not seen_endata:
        raise TruncatedFile("missing ENDATA", max(lineno, 1))
    return doc


def to_general_lp(doc: MpsDocument) -> GeneralLP:
    """Assemble the dense GeneralLP; extra N rows are dropped."""
    cons = [(sense, name) for sense, name in doc.rows if sense != "N"]
    row_index = {name: i for i, (_, name) in enumerate(cons)}
    col_index = {name: j for j, name in enumerate(doc.col_order)}
    m, n = len(cons), len(doc.col_order)
    if m == 0 or n == 0:
        raise EmptyProblem("problem has no constraints or no columns", doc.endata_line)
    A = np.zeros((m, n))
    c = np.zeros(n)
    for (col, row), value in doc.columns.items():
        if row == doc.objective:
            c[col_index[col]] += value
        elif row in row_index:
            A[row_index[row], col_index[col]] += value
    b = np.zeros(m)
    offset = 0.0
    for row, value in doc.rhs.items():
        if row in row_index:
            b[row_index[row]] = value
        elif row == doc.objective:
            offset = -value

    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    for kind, col, value in doc.bounds:
        j = col_index[col]
        if kind == "LO":
            lower[j] = value
        elif kind == "UP":
            upper[j] = value
            if value < 0 and lower[j] == 0.0:
                lower[j] = -np.inf
        elif kind == "FX":
            lower[j] = upper[j] = value
        elif kind == "FR":
            lower[j], upper[j] = -np.inf, np.inf
        elif kind == "MI":
            lower[j] = -np.inf
        elif kind == "PL":
            upper[j] = np.inf

    return GeneralLP(
        A,
        b,
        c,
        senses=[sense for sense, _ in cons],
        lower=lower,
        upper=upper,
        col_names=list(doc.col_order),
        row_names=[name for _, name in cons],
        objective_offset=offset,
        name=doc.name,
    )


def parse_mps(source: MpsSource) -> tuple[GeneralLP, float]:
    """Parse MPS text into a GeneralLP and the sparsity nnz(A) / (m n)."""
    doc = read_mps(source)
    glp = to_general_lp(doc)
    nnz = int(np.count_nonzero(glp.A))
    if nnz == 0:
        raise EmptyProblem("constraint matrix has no nonzero entries", doc.endata_line)
    return glp, nnz / glp.A.size


def clamp_infinities(glp: GeneralLP, value: float = 1e9) -> GeneralLP:
    """Replace entries of b and c at or beyond +-value (or infinite) by +-value."""
    def clamp(v: np.ndarray) -> np.ndarray:
        out = np.array(v, dtype=float)
        big = ~np.isfinite(out) | (np.abs(out) >= value)
        out[big] = np.sign(out[big]) * value
        return out

    return GeneralLP(
        glp.A,
        clamp(glp.b),
        clamp(glp.c),
        senses=glp.senses,
        lower=glp.lower,
        upper=glp.upper,
        col_names=glp.col_names,
        row_names=glp.row_names,
        objective_offset=glp.objective_offset,
        name=glp.name,
    )
