"""The irreducible representation r_n : PGL(2,C) -> PGL(n,C).

Basis of the (n-1)-st symmetric power: monomials e1^(n-1-k) e2^k,
k = 0..n-1.  Column k of ``r_n(A)`` holds the coordinates of the image of
the k-th monomial, so upper-triangular inputs give upper-triangular
outputs and ``diag(t, 1/t)`` maps to ``diag(t^(n-1), t^(n-3), ...)``.
"""
from __future__ import annotations

from math import comb

import numpy as np

from .fpgroup import Representation


def _binomial_expand(x, y, power, n):
    """Coefficients of (x e1 + y e2)^power by powers of e2, length n."""
    out = np.zeros(n, dtype=np.complex128)
    for j in range(power + 1):
        out[j] = comb(power, j) * x ** (power - j) * y**j
    return out


def r_n(A, n: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.shape != (2, 2):
        raise ValueError("r_n expects a 2x2 matrix")
    if n < 2:
        raise ValueError("n must be >= 2")
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    R = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        # e1 -> a e1 + c e2, e2 -> b e1 + d e2
        left = _binomial_expand(a, c, n - 1 - k, n)
        right = _binomial_expand(b, d, k, n)
        R[:, k] = np.convolve(left, right)[:n]
    return R


def lift_rep(rep2: Representation, n: int) -> Representation:
    if rep2.n != 2:
        raise ValueError("lift_rep expects a representation into SL(2,C)")
    return rep2.with_images([r_n(g, n) for g in rep2.images])


def pgl2_locus_check(hol, tol: float = 1e-9) -> bool:
    """True when all L_k agree and all M_k agree (image of the PGL(2) locus)."""
    L = np.asarray(hol.L)
    M = np.asarray(hol.M)
    return bool(np.abs(L - L[0]).max() <= tol and np.abs(M - M[0]).max() <= tol)
