"""Base matrices of uncoupled, terminated, and tailbiting (dv, 2dv) ensembles.

A protograph is stored as its M x N integer base matrix; entry b[k, j]
counts the edges between CN type k and VN type j.  Coupled constructions
are assembled from 1x2 blocks B0 = (1 1), one spatial position per block
column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProtographError",
    "InvalidGeometryError",
    "BandOverlapError",
    "BaseMatrix",
    "EnsembleKind",
    "ValidationReport",
    "build_tailbiting",
    "build_terminated",
    "build_uncoupled",
    "validate",
]


class ProtographError(ValueError):
    pass


class InvalidGeometryError(ProtographError):
    """Requested ensemble geometry is inconsistent (e.g. odd N)."""


class BandOverlapError(InvalidGeometryError):
    """Wrapped coupling band would stack B0 blocks on top of each other."""


@dataclass(frozen=True)
class BaseMatrix:
    """Nonnegative integer protograph matrix.

    Invariants: entries >= 0, no all-zero row or column, and the design
    rate (N - M)/N lies in (0, 1).
    """

    b: np.ndarray

    def __post_init__(self):
        b = np.ascontiguousarray(self.b, dtype=np.int64)
        if b.ndim != 2:
            raise ProtographError(f"base matrix must be 2-D, got shape {b.shape}")
        if np.any(b < 0):
            raise ProtographError("base matrix entries must be nonnegative")
        zero_rows = np.flatnonzero(b.sum(axis=1) == 0)
        if zero_rows.size:
            raise ProtographError(f"all-zero CN row(s) {zero_rows.tolist()}")
        zero_cols = np.flatnonzero(b.sum(axis=0) == 0)
        if zero_cols.size:
            raise ProtographError(f"all-zero VN column(s) {zero_cols.tolist()}")
        if not 0.0 < (b.shape[1] - b.shape[0]) / b.shape[1] < 1.0:
            raise ProtographError(f"design rate of a {b.shape} matrix is not in (0, 1)")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @property
    def n_checks(self) -> int:
        return self.b.shape[0]

    @property
    def n_vars(self) -> int:
        return self.b.shape[1]

    @property
    def rate(self) -> float:
        """Design rate (N - M)/N."""
        return (self.n_vars - self.n_checks) / self.n_vars

    @property
    def vn_degrees(self) -> np.ndarray:
        return self.b.sum(axis=0)

    @property
    def cn_degrees(self) -> np.ndarray:
        return self.b.sum(axis=1)

    def to_text(self) -> str:
        """Plain-text form: header line ``M N`` then M integer rows."""
        lines = [f"{self.n_checks} {self.n_vars}"]
        lines += [" ".join(str(x) for x in row) for row in self.b]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> BaseMatrix:
        rows = [line.split() for line in text.strip().splitlines() if line.strip()]
        m, n = int(rows[0][0]), int(rows[0][1])
        b = np.array([[int(x) for x in row] for row in rows[1:]], dtype=np.int64)
        if b.shape != (m, n):
            raise ProtographError(f"header says {m}x{n} but body has shape {b.shape}")
        return cls(b=b)

    def to_json(self) -> str:
        return json.dumps(
            {"rows": self.n_checks, "cols": self.n_vars, "entries": self.b.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> BaseMatrix:
        doc = json.loads(text)
        b = np.array(doc["entries"], dtype=np.int64)
        if b.shape != (doc["rows"], doc["cols"]):
            raise ProtographError("JSON dimensions do not match entries")
        return cls(b=b)


@dataclass(frozen=True)
class EnsembleKind:
    """Ensemble family tag plus its geometry parameters.

    ``positions`` is the spatial-position count, i.e. the number of block
    columns of B0 (N/2 for the coupled constructions here).
    """

    tag: str  # "uncoupled" | "terminated" | "tailbiting"
    dv: int
    positions: int = 1

    TAGS = ("uncoupled", "terminated", "tailbiting")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise InvalidGeometryError(f"unknown ensemble tag {self.tag!r}")
        if self.dv < 2:
            raise InvalidGeometryError(f"VN degree must be >= 2, got {self.dv}")
        if self.tag != "uncoupled" and self.positions < self.dv:
            raise InvalidGeometryError(
                f"coupled ensembles need positions >= dv, got {self.positions} < {self.dv}"
            )


def _check_even(n_types: int) -> int:
    if n_types % 2:
        raise InvalidGeometryError(f"VN-type count must be even, got {n_types}")
    return n_types // 2


def build_tailbiting(dv: int, n_types: int) -> BaseMatrix:
    """Tailbiting SC base matrix: M = N/2 rows, circulant band of dv blocks.

    CN block-row k carries B0 = (1 1) at block columns (k - t) mod M for
    t = 0..dv-1, so every column sums to dv and every row to 2*dv.
    """
    if dv < 2:
        raise InvalidGeometryError(f"VN degree must be >= 2, got {dv}")
    m = _check_even(n_types)
    if m < dv:
        raise BandOverlapError(
            f"M = N/2 = {m} < dv = {dv}: wrapped band would stack B0 blocks"
        )
    b = np.zeros((m, n_types), dtype=np.int64)
    for k in range(m):
        for t in range(dv):
            c = (k - t) % m
            b[k, 2 * c] = 1
            b[k, 2 * c + 1] = 1
    return BaseMatrix(b=b)


def build_terminated(dv: int, n_types: int) -> BaseMatrix:
    """Terminated SC base matrix: L = N/2 positions, L + dv - 1 rows.

    Block-row r carries B0 at block columns r - t for t = 0..dv-1 kept
    inside [0, L); the extra dv - 1 rows cost rate:
    R = 1 - (L + dv - 1)/(2L).
    """
    if dv < 2:
        raise InvalidGeometryError(f"VN degree must be >= 2, got {dv}")
    length = _check_even(n_types)
    if length < dv:
        raise InvalidGeometryError(f"L = N/2 = {length} < dv = {dv}")
    rows = length + dv - 1
    b = np.zeros((rows, n_types), dtype=np.int64)
    for r in range(rows):
        for t in range(dv):
            c = r - t
            if 0 <= c < length:
                b[r, 2 * c] = 1
                b[r, 2 * c + 1] = 1
    return BaseMatrix(b=b)


def build_uncoupled(dv: int) -> BaseMatrix:
    """Uncoupled (dv, 2dv) protograph: the 1x2 matrix (dv dv)."""
    if dv < 2:
        raise InvalidGeometryError(f"VN degree must be >= 2, got {dv}")
    return BaseMatrix(b=np.array([[dv, dv]], dtype=np.int64))


def kind_of(tag: str, dv: int, n_types: int) -> EnsembleKind:
    positions = 1 if tag == "uncoupled" else n_types // 2
    return EnsembleKind(tag=tag, dv=dv, positions=positions)


def build(kind: EnsembleKind) -> BaseMatrix:
    if kind.tag == "uncoupled":
        return build_uncoupled(kind.dv)
    if kind.tag == "terminated":
        return build_terminated(kind.dv, 2 * kind.positions)
    return build_tailbiting(kind.dv, 2 * kind.positions)


@dataclass
class ValidationReport:
    passed: bool
    rate: float
    vn_degrees: list[int]
    cn_degrees: list[int]
    failures: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        status = "pass" if self.passed else "fail"
        lines = [
            f"{status}: rate = {self.rate:.6g}",
            f"VN degrees: min {min(self.vn_degrees)}, max {max(self.vn_degrees)}",
            f"CN degrees: min {min(self.cn_degrees)}, max {max(self.cn_degrees)}",
        ]
        lines += [f"  - {msg}" for msg in self.failures]
        return "\n".join(lines)


def validate(matrix: BaseMatrix, kind: EnsembleKind) -> ValidationReport:
    """Degree/rate report plus invariant checks for the claimed ensemble."""
    failures: list[str] = []
    b = matrix.b
    vn_deg = matrix.vn_degrees
    cn_deg = matrix.cn_degrees

    for j in np.flatnonzero(vn_deg == 0):
        failures.append(f"all-zero VN column {j}")
    for k in np.flatnonzero(cn_deg == 0):
        failures.append(f"all-zero CN row {k}")
    if not 0.0 < matrix.rate < 1.0:
        failures.append(f"design rate {matrix.rate} outside (0, 1)")

    if np.any(vn_deg != kind.dv):
        bad = int(np.flatnonzero(vn_deg != kind.dv)[0])
        failures.append(f"VN column {bad} has degree {int(vn_deg[bad])}, expected {kind.dv}")

    if kind.tag == "uncoupled":
        if b.shape != (1, 2):
            failures.append(f"uncoupled matrix must be 1x2, got {b.shape}")
    elif kind.tag == "tailbiting":
        if b.shape != (kind.positions, 2 * kind.positions):
            failures.append(f"tailbiting matrix must be Mx2M, got {b.shape}")
        if np.any(cn_deg != 2 * kind.dv):
            failures.append("tailbiting CN degrees must all equal 2*dv")
    elif kind.tag == "terminated":
        rows = kind.positions + kind.dv - 1
        if b.shape != (rows, 2 * kind.positions):
            failures.append(f"terminated matrix must be {rows}x{2 * kind.positions}, got {b.shape}")
        if np.any(cn_deg > 2 * kind.dv):
            failures.append("terminated CN degrees must not exceed 2*dv")

    return ValidationReport(
        passed=not failures,
        rate=matrix.rate,
        vn_degrees=vn_deg.tolist(),
        cn_degrees=cn_deg.tolist(),
        failures=failures,
    )
