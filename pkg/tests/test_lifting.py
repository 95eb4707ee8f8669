import numpy as np
import pytest

from scshape.montecarlo.lifting import (
    GeometryOverflowError,
    lift,
    read_alist,
    write_alist,
)
from scshape.protograph import build_tailbiting, build_terminated, build_uncoupled

from oracles import gf2_nullspace


class TestLift:
    def test_paper_scale_blocklength(self):
        code = lift(build_tailbiting(5, 128), 512, seed=3)
        assert code.n == 2**16
        assert code.m == 2**15
        assert code.girth_ge_6

    def test_q1_degenerates_to_protograph(self):
        base = build_tailbiting(2, 8)
        code = lift(base, 1, seed=0)
        assert (code.h.toarray() == (base.b > 0)).all()

    def test_degree_histograms_scale_with_q(self):
        base = build_tailbiting(5, 64)
        code = lift(base, 16, seed=2)
        h = code.h
        col_w = np.asarray(h.sum(axis=0)).ravel()
        row_w = np.asarray(h.sum(axis=1)).ravel()
        assert (col_w == 5).all()
        assert (row_w == 10).all()
        assert h.nnz == 16 * base.b.sum()

    def test_girth6_at_desk_scale(self):
        code = lift(build_tailbiting(5, 128), 64, seed=1)
        assert code.girth_ge_6
        gram = (code.h @ code.h.T).tocoo()
        off = gram.row != gram.col
        assert not (gram.data[off] >= 2).any()

    def test_multiplicities_become_distinct_circulants(self):
        code = lift(build_uncoupled(3), 8, seed=0)
        assert code.h.max() == 1  # no parallel edges
        assert code.h.nnz == 6 * 8
        assert len(code.shifts[(0, 0)]) == 3
        assert len(set(code.shifts[(0, 0)])) == 3

    def test_overflow_rejected(self):
        with pytest.raises(GeometryOverflowError):
            lift(build_uncoupled(5), 4, seed=0)

    def test_bad_q_rejected(self):
        with pytest.raises(ValueError):
            lift(build_tailbiting(3, 12), 0, seed=0)

    def test_seed_reproducible(self):
        a = lift(build_tailbiting(4, 32), 32, seed=11)
        b = lift(build_tailbiting(4, 32), 32, seed=11)
        assert a.shifts == b.shifts
        assert (a.h != b.h).nnz == 0

    def test_metadata_recorded(self):
        code = lift(build_terminated(3, 16), 16, seed=5)
        assert code.attempts >= 1
        assert code.seed == 5
        assert code.q == 16

    def test_nullspace_codewords_check_out(self):
        # Brute-force GF(2) null space on a tiny lift; every basis
        # codeword satisfies every parity check.
        code = lift(build_tailbiting(2, 8), 4, seed=7)
        h = code.h.toarray()
        basis = gf2_nullspace(h)
        assert basis.shape[0] >= code.n - code.m
        for cw in basis:
            assert not ((h @ cw) % 2).any()


class TestAlist:
    def test_round_trip(self, tmp_path):
        code = lift(build_tailbiting(3, 24), 8, seed=4)
        path = tmp_path / "code.alist"
        write_alist(code, path)
        back = read_alist(path)
        assert (back != code.h).nnz == 0

    def test_header_and_degrees(self, tmp_path):
        code = lift(build_tailbiting(5, 32), 4, seed=9)
        path = tmp_path / "code.alist"
        write_alist(code, path)
        lines = path.read_text().splitlines()
        assert lines[0] == f"{code.n} {code.m}"
        assert lines[1] == "5 10"
        assert [int(x) for x in lines[2].split()] == [5] * code.n
        assert [int(x) for x in lines[3].split()] == [10] * code.m
