import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periph.cxmat import projective_distance
from periph.fpgroup import (
    Presentation,
    Representation,
    Word,
    abelianized_exponents,
    commutator,
    evaluate,
    find_commuting_words,
    homological_longitude,
    relator_residual,
)

RHO1_G1 = np.array([[1, 1, -0.5 - 0.5j * np.sqrt(3)], [0, 1, -1], [0, 0, 1]])

words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12).map(lambda xs: Word(tuple(xs)))


class TestWord:
    def test_parse_and_format(self, pres):
        w = pres.word("G1 g3 G1 g3")
        assert w.letters == (-1, 2, -1, 2)
        assert pres.format(w) == "G1 g3 G1 g3"
        assert Word.parse("aBAb", ["a", "b"]).letters == (1, -2, -1, 2)

    def test_parse_errors(self, pres):
        with pytest.raises(ValueError):
            pres.word("g2")
        with pytest.raises(ValueError):
            Word((0,))

    def test_inverse_and_reduce(self):
        w = Word((1, 2, -2, -1, 2))
        assert w.reduced().letters == (2,)
        assert (w * w.inverse()).reduced().letters == ()
        assert (Word((1, 2)) ** -2).letters == (-2, -1, -2, -1)


class TestPresentation:
    def test_fig8(self, pres):
        assert pres.ngens == 2
        lhs, rhs = pres.relators[0]
        assert pres.format(lhs) == "g3 G1 G3 g1 g3"
        assert pres.format(rhs) == "g1 g3 G1 G3 g1"
        # the expansion of [g3, g1^-1] g3 has 5 letters
        assert len(lhs) == 5

    def test_exponents(self, pres):
        g1, g3 = Word((1,)), Word((2,))
        assert abelianized_exponents(g1 * g3 * g1.inverse(), 2).tolist() == [0, 1]
        assert abelianized_exponents(commutator(g3, g1.inverse()), 2).tolist() == [0, 0]
        lhs, rhs = pres.relators[0]
        assert abelianized_exponents(lhs * rhs.inverse(), 2).tolist() == [-1, 1]

    def test_empty_relator_rejected(self):
        with pytest.raises(ValueError):
            Presentation(("a",), ((Word(()), Word(())),))


class TestEvaluate:
    def test_examples(self, reps, pres):
        rho1 = reps["rho1"]
        assert np.allclose(evaluate(rho1, Word(())), np.eye(3))
        assert np.allclose(evaluate(rho1, pres.word("g1")), RHO1_G1)
        assert np.allclose(evaluate(rho1, pres.word("g1 G1")), np.eye(3))
        assert np.allclose(rho1["g1"], RHO1_G1)

    @given(words, words)
    def test_homomorphism(self, reps, w1, w2):
        rep = reps["rho2"]
        assert np.allclose(evaluate(rep, w1 * w2), evaluate(rep, w1) @ evaluate(rep, w2), atol=1e-9, rtol=1e-9)


class TestRepresentation:
    def test_trivial_rep_residual(self, pres):
        rep = Representation(pres, (np.eye(3), np.eye(3)))
        assert relator_residual(rep) == 0

    def test_corpus_residual(self, reps):
        assert relator_residual(reps["rho1"]) < 1e-12

    def test_perturbed_rep(self, reps):
        imgs = [g.copy() for g in reps["rho1"].images]
        imgs[1][1, 0] += 1e-3
        rep = Representation(reps["rho1"].presentation, imgs, residual_bound=1.0)
        assert relator_residual(rep) > 1e-6
        with pytest.raises(ValueError):
            Representation(reps["rho1"].presentation, imgs)

    def test_det_check(self, pres):
        with pytest.raises(ValueError):
            Representation(pres, (2 * np.eye(2), np.eye(2)))

    @given(st.integers(0, 1000))
    def test_residual_conjugation_invariant(self, reps, seed):
        rng = np.random.default_rng(seed)
        G = np.eye(3) + 0.2 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        if np.linalg.cond(G) > 1e2:
            return
        G = G / np.linalg.det(G) ** (1 / 3)
        rep = reps["rho1"]
        assert abs(relator_residual(rep.conjugate(G)) - relator_residual(rep)) < 1e2 * rep.tol


class TestCommutingWords:
    def test_longitude_search(self, reps, pres, lm):
        m = pres.word("g1")
        found = find_commuting_words(reps["geom2"], m, 8)
        assert found, "search found nothing"
        assert all(len(w) <= 8 for w in found)
        # powers of m are excluded
        assert not any(w.reduced().letters in ((1, 1), (1,), (-1,)) for w in found)
        for w in found:
            A, B = evaluate(reps["geom2"], w), evaluate(reps["geom2"], m)
            assert projective_distance(A @ B, B @ A) < 1e-8
        l = homological_longitude(reps["geom2"], m, 8)
        assert l is not None and abelianized_exponents(l, 2).sum() == 0
        assert l.reduced().letters in (lm[0].letters, lm[0].inverse().letters)

    def test_no_candidates(self, pres):
        rep = Representation(pres, (np.eye(2), np.eye(2)))
        # every word is a "power" of the identity, so nothing qualifies
        assert find_commuting_words(rep, pres.word("g1"), 3) == []

    def test_witness_relation(self, reps, lm):
        from periph.corpus8 import find_power_relation

        l, m = lm
        wl = find_power_relation(reps["rho2"], l, m, 5)
        M5 = np.linalg.matrix_power(evaluate(reps["rho2"], m), 5)
        assert projective_distance(evaluate(reps["rho2"], wl), M5) < 1e-8
