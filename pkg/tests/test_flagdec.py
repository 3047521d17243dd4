import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periph.cxmat import e_map, jordan_block
from periph.errors import AmbiguityError, DecorationMismatchError, RegularityError, WeylActionError
from periph.flagdec import (
    Decoration,
    Flag,
    PeripheralHolonomy,
    common_flags,
    decorate,
    hol_periph,
    holonomy_of_pair,
    is_unipotent_regular,
    select_decoration,
    weyl_action,
)
from periph.fpgroup import evaluate
from periph.symlift import r_n

J3 = jordan_block(3, 1.0)
A126, B133 = np.diag([1.0, 2, 6]), np.diag([1.0, 3, 3])


def random_conj(seed, n=3):
    rng = np.random.default_rng(seed)
    G = np.eye(n) + 0.3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return G


class TestFlag:
    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            Flag(np.array([[1, 1], [1, 1 + 1e-12]]))

    def test_distance(self):
        assert Flag.standard(3).distance(Flag.standard(3)) == pytest.approx(0)
        assert Flag.standard(3).distance(Flag.standard(3).permuted([2, 1, 0])) > 1

    def test_holonomy_validation(self):
        with pytest.raises(ValueError):
            PeripheralHolonomy([1, 0], [1, 1])
        with pytest.raises(ValueError):
            PeripheralHolonomy([1, np.inf], [1, 1])


class TestCommonFlags:
    def test_jordan_unique(self):
        flags = common_flags(J3, J3)
        assert len(flags) == 1
        assert flags[0].distance(Flag.standard(3)) < 1e-12

    def test_distinct_eigenvalues(self):
        flags = common_flags(A126, B133)
        assert len(flags) == 6
        orders = {tuple(np.argmax(np.abs(f.basis), axis=0)) for f in flags}
        assert orders == set(itertools.permutations(range(3)))

    def test_two_block_plus_simple(self):
        A = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 2.0]])
        assert len(common_flags(A, A @ A)) == 3

    def test_not_regular(self):
        with pytest.raises(RegularityError):
            common_flags(np.diag([1.0, 1, 2]), np.eye(3))

    def test_noncommuting(self):
        with pytest.raises(ValueError):
            common_flags(A126, J3)

    @given(st.integers(0, 5000))
    def test_count_n_factorial(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.normal(size=3) + 1j * rng.normal(size=3)
        if min(abs(d[i] - d[j]) for i in range(3) for j in range(i)) < 0.1:
            return
        G = random_conj(seed)
        if np.linalg.cond(G) > 1e2:
            return
        A = G @ np.diag(d) @ np.linalg.inv(G)
        assert len(common_flags(A, A @ A + A)) == 6


class TestDecorate:
    def test_diagonal_pair(self):
        dec = decorate(Flag.standard(3), A126, B133)
        h = dec.holonomy()
        assert np.allclose(h.L, [2, 3]) and np.allclose(h.M, [3, 1])

    def test_mismatch(self):
        with pytest.raises(DecorationMismatchError):
            decorate(Flag.standard(3), J3.T, J3.T)

    def test_geom(self, reps, lm, geom3_prob):
        h = hol_periph(reps["geom3"], *lm, geom3_prob.decoration)
        assert np.allclose(h.L, 1) and np.allclose(h.M, 1)

    def test_sl2_image(self):
        t = 1.1
        A = r_n(np.diag([t, 1 / t]), 3)
        h = holonomy_of_pair(A, A, Decoration(Flag.standard(3)))
        assert np.allclose(h.L, [t**-2, t**-2])
        assert h.L[0] == pytest.approx(0.8264462809917354)

    @given(st.integers(0, 2000), st.complex_numbers(min_magnitude=0.5, max_magnitude=2))
    def test_scalar_invariance(self, seed, c):
        G = random_conj(seed)
        if np.linalg.cond(G) > 1e2:
            return
        A, B = G @ A126 @ np.linalg.inv(G), G @ B133 @ np.linalg.inv(G)
        f = Flag(G)
        h1 = holonomy_of_pair(A, B, Decoration(f))
        h2 = holonomy_of_pair(c * A, B / c, Decoration(f))
        assert np.allclose(h1.L, h2.L, atol=1e-12) and np.allclose(h1.M, h2.M, atol=1e-12)

    @given(st.integers(0, 2000))
    def test_conjugation_equivariance(self, seed):
        G = random_conj(seed)
        if np.linalg.cond(G) > 1e2:
            return
        Gi = np.linalg.inv(G)
        h1 = decorate(Flag.standard(3), A126, B133).holonomy()
        h2 = decorate(Flag(G), G @ A126 @ Gi, G @ B133 @ Gi).holonomy()
        assert np.allclose(h1.L, h2.L, atol=1e-7) and np.allclose(h1.M, h2.M, atol=1e-7)

    def test_e_map_consistency(self, geom3_prob):
        from periph.defsolve import solve_to_target

        v = np.array([1.03 * np.exp(0.02j), 0.98 * np.exp(-0.01j)])
        res = solve_to_target(geom3_prob.with_target(v))
        eig = np.linalg.eigvals(evaluate(res.rep, geom3_prob.longitude))
        target = e_map(res.holonomy.L)
        best = min(
            max(min(abs(z * e - t) for e in eig) for t in target) for z in np.exp(2j * np.pi * np.arange(3) / 3)
        )
        assert best < 1e-8


class TestSelect:
    def test_single(self):
        f = Flag(np.diag([1.0, 2, 3]))
        assert select_decoration([f], Flag.standard(3)).flag is f

    def test_identity_ordering(self):
        flags = common_flags(A126, B133)
        dec = select_decoration(flags, Flag.standard(3), (A126, B133))
        assert np.allclose(dec.holonomy().L, [2, 3])

    def test_tie(self):
        f = Flag.standard(3)
        with pytest.raises(AmbiguityError):
            select_decoration([f, Flag(np.eye(3) * 2)], f)

    def test_small_deformation_continues_standard(self):
        t = 1e-3
        A = J3 + np.diag([0, t, 3 * t])
        # B commuting with A: a polynomial in A
        flags = common_flags(A, A @ A)
        dec = select_decoration(flags, Flag.standard(3))
        assert dec.flag.distance(Flag.standard(3)) < 1e-2


class TestWeyl:
    def test_examples(self):
        dec = decorate(Flag.standard(3), A126, B133)
        assert np.allclose(weyl_action(dec, [0, 1, 2]).holonomy().L, [2, 3])
        assert np.allclose(weyl_action(dec, [0, 2, 1]).holonomy().L, [6, 1 / 3])
        assert np.allclose(weyl_action(dec, [2, 1, 0]).holonomy().L, [1 / 3, 1 / 2])

    def test_permuted_flag_is_invariant(self):
        dec = decorate(Flag.standard(3), A126, B133)
        w = weyl_action(dec, [1, 2, 0])
        again = decorate(w.flag, A126, B133)
        assert np.allclose(again.holonomy().L, w.holonomy().L)

    @given(st.permutations([0, 1, 2]))
    def test_inverse(self, perm):
        dec = decorate(Flag.standard(3), A126, B133)
        inv = list(np.argsort(perm))
        back = weyl_action(weyl_action(dec, perm), inv)
        assert np.allclose(back.flag.basis, dec.flag.basis)
        assert np.allclose(back.eigen_order_l, dec.eigen_order_l)

    def test_jordan_incompatible(self):
        dec = decorate(common_flags(J3, J3)[0], J3, J3)
        with pytest.raises(WeylActionError):
            weyl_action(dec, [1, 0, 2])
        with pytest.raises(WeylActionError):
            weyl_action(dec, [0, 0, 1])


@pytest.mark.parametrize(
    "A, expected", [(J3, True), (np.eye(3), False), (np.diag([1, 2, 0.5]), False)]
)
def test_unipotent_regular(A, expected):
    assert is_unipotent_regular(A) is expected
