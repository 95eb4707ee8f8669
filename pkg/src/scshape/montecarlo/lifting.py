"""Quasi-cyclic copy-and-permute lifting of a protograph.

Every base-matrix entry becomes one (or, for multiplicities, several
distinct) circulant permutation blocks of size Q with seeded random
shifts; shift sets are resampled until the lifted graph is 4-cycle-free
or the attempt budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..protograph import BaseMatrix

__all__ = ["GeometryOverflowError", "LiftedCode", "lift", "write_alist", "read_alist"]


class GeometryOverflowError(ValueError):
    """A base-matrix multiplicity exceeds the lifting factor."""


@dataclass
class LiftedCode:
    """Sparse parity-check matrix H (MQ x NQ) plus its lifting descriptors.

    ``shifts[(k, j)]`` lists the circulant shifts of the blocks placed at
    base-matrix cell (k, j); bit i belongs to VN type i // Q.
    """

    base: BaseMatrix
    q: int
    h: sp.csr_matrix
    shifts: dict = field(repr=False)
    girth_ge_6: bool
    attempts: int
    seed: int

    @property
    def n(self) -> int:
        return self.base.n_vars * self.q

    @property
    def m(self) -> int:
        return self.base.n_checks * self.q

    @property
    def rate(self) -> float:
        return self.base.rate


def _assemble(base: BaseMatrix, q: int, shifts: dict) -> sp.csr_matrix:
    rows_idx = []
    cols_idx = []
    r = np.arange(q)
    for (k, j), shift_list in shifts.items():
        for s in shift_list:
            rows_idx.append(k * q + r)
            cols_idx.append(j * q + (r + s) % q)
    rows_idx = np.concatenate(rows_idx)
    cols_idx = np.concatenate(cols_idx)
    data = np.ones(len(rows_idx), dtype=np.int8)
    h = sp.coo_matrix(
        (data, (rows_idx, cols_idx)),
        shape=(base.n_checks * q, base.n_vars * q),
    ).tocsr()
    h.sum_duplicates()
    return h


def _count_4cycles(h: sp.csr_matrix) -> int:
    # Two CN rows sharing >= 2 VNs form a length-4 cycle.
    gram = (h @ h.T).tocoo()
    off = gram.row != gram.col
    return int(np.count_nonzero(gram.data[off] >= 2) // 2)


def _sample_shifts(base: BaseMatrix, q: int, rng) -> dict:
    """Greedy girth-aware shift selection, cell by cell.

    Each new shift avoids every value that would close a length-4 cycle
    with already-placed circulants; ties among the surviving values are
    broken randomly.  Cells without an admissible value fall back to a
    random pick (the caller verifies the lifted graph).
    """
    b = base.b
    rows_of_col: dict[int, list[int]] = {}
    shifts: dict[tuple[int, int], tuple[int, ...]] = {}
    for k, j in zip(*np.nonzero(b)):
        k, j = int(k), int(j)
        chosen: list[int] = []
        for _ in range(int(b[k, j])):
            forbidden = set(chosen)
            if q % 2 == 0:
                # Two circulants in one cell close a 4-cycle when their
                # shifts differ by q/2.
                forbidden.update((a + q // 2) % q for a in chosen)
            for (k2, j2), s2 in shifts.items():
                if k2 == k and j2 != j:
                    # Same block row: difference multisets must stay distinct.
                    for a in chosen:
                        for t in s2:
                            for tp in s2:
                                if t != tp:
                                    forbidden.add((a - tp + t) % q)
            for k2 in rows_of_col.get(j, []):
                if k2 == k:
                    continue
                s_right = shifts[(k2, j)]
                for a in chosen:
                    # Both rows meet in column j alone (multiplicities).
                    for c in s_right:
                        for cp in s_right:
                            if c != cp:
                                forbidden.add((a + c - cp) % q)
                for j2 in np.flatnonzero(b[k2]):
                    j2 = int(j2)
                    if j2 == j or (k, j2) not in shifts or (k2, j2) not in shifts:
                        continue
                    # Cycle (k,j)-(k,j2)-(k2,j2)-(k2,j): s = b - c + d closes it.
                    for sb in shifts[(k, j2)]:
                        for sc in shifts[(k2, j2)]:
                            for sd in s_right:
                                forbidden.add((sb - sc + sd) % q)
            allowed = [s for s in range(q) if s not in forbidden]
            pool = allowed if allowed else [s for s in range(q) if s not in chosen]
            chosen.append(int(pool[rng.integers(len(pool))]))
        shifts[(k, j)] = tuple(chosen)
        rows_of_col.setdefault(j, []).append(k)
    return shifts


def lift(base: BaseMatrix, q: int, seed: int = 0, max_attempts: int = 100) -> LiftedCode:
    """Lift ``base`` by factor ``q`` with seeded circulant shifts.

    Multiplicities b[k, j] > 1 are realized as b circulants with distinct
    shifts, so the derived graph never has parallel edges.  Shift sets are
    drawn by a greedy girth-aware pass and resampled up to
    ``max_attempts`` times; if girth 6 is never reached the attempt with
    the fewest 4-cycles is kept.
    """
    if q < 1:
        raise ValueError(f"lifting factor must be >= 1, got {q}")
    if int(base.b.max()) > q:
        raise GeometryOverflowError(
            f"multiplicity {int(base.b.max())} exceeds lifting factor {q}"
        )
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(1, max_attempts + 1):
        shifts = _sample_shifts(base, q, rng)
        h = _assemble(base, q, shifts)
        n4 = _count_4cycles(h)
        if best is None or n4 < best[0]:
            best = (n4, shifts, h, attempt)
        if n4 == 0:
            break
    n4, shifts, h, attempt = best
    return LiftedCode(
        base=base,
        q=q,
        h=h,
        shifts=shifts,
        girth_ge_6=(n4 == 0),
        attempts=attempt,
        seed=seed,
    )


def write_alist(code_or_h, path) -> None:
    """Write a parity-check matrix in alist format (column-major lists).

    Layout: ``N M``, max column/row degrees, per-column and per-row
    degrees, then 1-indexed neighbor lists padded with zeros.
    """
    h = code_or_h.h if isinstance(code_or_h, LiftedCode) else sp.csr_matrix(code_or_h)
    m, n = h.shape
    hc = h.tocsc()
    col_deg = np.diff(hc.indptr)
    row_deg = np.diff(h.indptr)
    dmax_c = int(col_deg.max())
    dmax_r = int(row_deg.max())
    lines = [f"{n} {m}", f"{dmax_c} {dmax_r}"]
    lines.append(" ".join(str(int(d)) for d in col_deg))
    lines.append(" ".join(str(int(d)) for d in row_deg))
    for j in range(n):
        nbrs = (hc.indices[hc.indptr[j]:hc.indptr[j + 1]] + 1).tolist()
        nbrs += [0] * (dmax_c - len(nbrs))
        lines.append(" ".join(str(x) for x in nbrs))
    for k in range(m):
        nbrs = (h.indices[h.indptr[k]:h.indptr[k + 1]] + 1).tolist()
        nbrs += [0] * (dmax_r - len(nbrs))
        lines.append(" ".join(str(x) for x in nbrs))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_alist(path) -> sp.csr_matrix:
    """Read an alist file back into a binary CSR parity-check matrix."""
    with open(path) as fh:
        tok = [[int(x) for x in line.split()] for line in fh if line.strip()]
    n, m = tok[0]
    col_deg = tok[2]
    rows_idx = []
    cols_idx = []
    for j in range(n):
        for r in tok[4 + j][: col_deg[j]]:
            if r:
                rows_idx.append(r - 1)
                cols_idx.append(j)
    data = np.ones(len(rows_idx), dtype=np.int8)
    return sp.coo_matrix((data, (rows_idx, cols_idx)), shape=(m, n)).tocsr()
