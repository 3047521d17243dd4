import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periph.cxmat import (
    CMatrix,
    char_poly,
    cluster_eigenvalues,
    e_map,
    is_regular,
    jordan_block,
    numerical_nullity,
    projective_distance,
    sl_lift,
)
from periph.errors import AmbiguityError, AmbiguousRankError, BranchError

J3 = jordan_block(3, 1.0)


def complex_matrices(n, bound=2.0):
    part = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(part, part), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array([complex(a, b) for a, b in xs]).reshape(n, n)
    )


class TestCMatrix:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            CMatrix([[1, np.nan], [0, 1]])

    def test_rejects_nonsquare_and_bad_tol(self):
        with pytest.raises(ValueError):
            CMatrix(np.ones((2, 3)))
        with pytest.raises(ValueError):
            CMatrix(np.eye(2), tol=0)

    def test_entries_read_only(self):
        A = CMatrix(np.eye(3))
        with pytest.raises(ValueError):
            A.entries[0, 0] = 2

    def test_algebra(self):
        A = CMatrix([[2, 1], [0, 3]])
        assert np.allclose((A @ A.inv()).entries, np.eye(2))
        assert A.det() == pytest.approx(6)
        assert CMatrix.identity(4).n == 4


class TestCharPoly:
    def test_identity(self):
        sd = char_poly(np.eye(3))
        assert np.allclose(sd.eigenvalues, 1)
        assert np.allclose(sd.charpoly, [1, -3, 3, -1])

    def test_diag_126(self):
        sd = char_poly(np.diag([1, 2, 6]))
        assert sorted(sd.eigenvalues.real) == pytest.approx([1, 2, 6])
        assert [sd.sigma(k) for k in (1, 2, 3)] == pytest.approx([9, 20, 12])
        assert sd.discriminant_ok

    def test_jordan_same_charpoly_as_identity(self):
        assert np.allclose(char_poly(J3).charpoly, char_poly(np.eye(3)).charpoly)
        assert not char_poly(J3).discriminant_ok
        assert is_regular(J3) and not is_regular(np.eye(3))

    @given(complex_matrices(3))
    def test_eigen_product_is_det(self, A):
        det = np.linalg.det(A)
        sd = char_poly(A)
        assert abs(np.prod(sd.eigenvalues) - det) <= 1e-8 * max(1, abs(det))
        assert sd.charpoly[0] == 1


class TestRegular:
    @pytest.mark.parametrize(
        "A, expected",
        [(J3, True), (np.eye(3), False), (np.diag([1, 1, 2]), False), (np.diag([1, 2, 3]), True)],
    )
    def test_examples(self, A, expected):
        assert is_regular(A) is expected

    @given(st.integers(0, 10_000), st.sampled_from(["J3", "id", "112", "block"]))
    def test_conjugation_invariant(self, seed, kind):
        rng = np.random.default_rng(seed)
        A = {
            "J3": J3,
            "id": np.eye(3),
            "112": np.diag([1.0, 1.0, 2.0]),
            "block": np.array([[1, 1, 0], [0, 1, 0], [0, 0, 2.0]]),
        }[kind]
        G = np.eye(3) + 0.3 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        if np.linalg.cond(G) >= 1e3:
            return
        assert is_regular(np.linalg.solve(G.T, (G @ A).T).T) == is_regular(A)

    def test_ambiguous_rank_warns_false(self):
        # eigenvalue cluster whose rank decision has no singular-value gap
        A = np.array([[1, 1e-2, 0], [0, 1, 0], [0, 0, 5]], dtype=complex)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            assert is_regular(A, tol=1e-9) is False
        assert any("ambiguous" in str(w.message) for w in caught)

    def test_numerical_nullity_gap(self):
        assert numerical_nullity(np.diag([1.0, 1e-12]), 1e-6) == 1
        with pytest.raises(AmbiguousRankError):
            numerical_nullity(np.diag([1e-5, 1e-7]), 1e-6)


class TestEMap:
    def test_examples(self):
        assert np.allclose(e_map([1, 1]), [1, 1, 1])
        assert np.allclose(e_map([1, 8]), [0.5, 0.5, 4])
        assert np.allclose(e_map([8, 1]), [0.25, 2, 2])

    def test_branch_rejection(self):
        with pytest.raises(BranchError):
            e_map([-1.5, 1])

    @given(st.lists(st.tuples(st.floats(0, 0.99), st.floats(-np.pi, np.pi)), min_size=1, max_size=5))
    def test_product_one(self, polar):
        a = [1 + r * np.exp(1j * th) for r, th in polar]
        assert abs(np.prod(e_map(a)) - 1) < 1e-12

    def test_clusters(self):
        out = cluster_eigenvalues([1, 1 + 1e-9, 2], 1e-6)
        assert [m for _, m in out] == [2, 1]


class TestSlLift:
    def test_examples(self):
        assert np.allclose(sl_lift(np.eye(3), np.eye(3)).entries, np.eye(3))
        assert np.allclose(sl_lift(2 * np.eye(3), np.eye(3)).entries, np.eye(3))
        R = np.diag([4, 1, 0.25])
        zeta = 0.3 - 1.7j
        assert np.allclose(sl_lift(zeta * R, R).entries, R)

    def test_ambiguity(self):
        with pytest.raises(AmbiguityError):
            sl_lift(np.eye(3), np.diag([5, 1, 0.2]))

    @given(st.integers(0, 1000))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        R = np.eye(3) + 0.1 * rng.normal(size=(3, 3))
        R = R / np.linalg.det(R) ** (1 / 3)
        P = (0.5 + rng.uniform()) * np.exp(1j * rng.uniform(0, 6)) * R
        once = sl_lift(P, R)
        assert np.allclose(sl_lift(once, R).entries, once.entries)


class TestProjectiveDistance:
    def test_examples(self):
        assert projective_distance(np.eye(3), np.eye(3)) == pytest.approx(0)
        assert projective_distance(np.eye(3), 2 * np.eye(3)) == pytest.approx(0, abs=1e-15)
        assert projective_distance(np.diag([1, 1, 2]), np.diag([1, 2, 1])) > 0.1
