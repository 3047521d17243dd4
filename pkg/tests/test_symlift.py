import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periph.flagdec import PeripheralHolonomy, is_regular
from periph.fpgroup import Representation, evaluate, relator_residual
from periph.symlift import lift_rep, pgl2_locus_check, r_n


def sl2(seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-2, 2, size=(2, 2)) + 1j * rng.uniform(-2, 2, size=(2, 2))
    d = np.linalg.det(A)
    return A / np.sqrt(d) if abs(d) > 1e-3 else np.eye(2)


def test_examples():
    assert np.allclose(r_n(np.diag([2, 0.5]), 3), np.diag([4, 1, 0.25]))
    for n in range(2, 7):
        assert np.allclose(r_n(np.eye(2), n), np.eye(n))
    assert np.array_equal(r_n([[1, 1], [0, 1]], 3), [[1, 1, 1], [0, 1, 2], [0, 0, 1]])


def test_upper_triangular_preserved():
    R = r_n([[2, 3], [0, 0.5]], 5)
    assert np.allclose(np.tril(R, -1), 0)


@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(2, 6))
def test_homomorphism_and_det(s1, s2, n):
    A, B = sl2(s1), sl2(s2)
    assert np.allclose(r_n(A @ B, n), r_n(A, n) @ r_n(B, n), atol=1e-10 * max(1, np.abs(r_n(A @ B, n)).max()))
    assert abs(np.linalg.det(r_n(A, n)) - 1) < 1e-10 * max(1, np.abs(r_n(A, n)).max() ** n)


@given(st.floats(0.2, 5), st.integers(2, 8))
def test_diagonal_ratios(t, n):
    d = np.diag(r_n(np.diag([t, 1 / t]), n))
    assert np.allclose(d[1:] / d[:-1], t**-2)


def test_lift_rep(reps, lm):
    lifted = lift_rep(reps["geom2"], 3)
    assert relator_residual(lifted) < 1e-10
    for w in lm:
        A = evaluate(lifted, w)
        assert is_regular(A)
        assert np.abs(np.linalg.eigvals(A) - 1).max() < 1e-4  # defective triple eigenvalue splits like eps^(1/3)
        assert np.abs(np.linalg.matrix_power(A - np.eye(3), 3)).max() < 1e-8
    with pytest.raises(ValueError):
        lift_rep(lifted, 4)


def test_trivial_lift(pres):
    triv = Representation(pres, (np.eye(2), np.eye(2)))
    assert all(np.allclose(g, np.eye(4)) for g in lift_rep(triv, 4).images)


def test_pgl2_locus():
    t, s = 1.3, 0.7 + 0.2j
    assert pgl2_locus_check(PeripheralHolonomy([t**-2, t**-2], [s, s]))
    assert pgl2_locus_check(PeripheralHolonomy([1, 1], [1, 1]))
    assert not pgl2_locus_check(PeripheralHolonomy([1.1, 0.9], [1, 1]))
