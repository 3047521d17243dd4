"""Flag decorations of commuting peripheral pairs and their holonomy data.

A decoration is a complete flag invariant under (rho(l), rho(m)), stored
by an explicit basis.  Conjugating both matrices into that basis makes
them upper triangular; consecutive ratios of the diagonals are the
vectors L and M.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .cxmat import (
    DEFAULT_TOL,
    _arr,
    char_poly,
    cluster_eigenvalues,
    cluster_radius,
    is_regular,
    numerical_nullity,
    projective_distance,
)
from .errors import AmbiguityError, DecorationMismatchError, RegularityError, WeylActionError
from .fpgroup import Representation, Word, evaluate

MAX_FLAG_COND = 1e8


@dataclass(frozen=True, eq=False)
class Flag:
    """Complete flag given by an ordered basis (columns of ``basis``).

    ``chains[j]`` labels the generalized eigenspace that column j belongs
    to; columns with the same label form a Jordan chain in order.
    """

    basis: np.ndarray
    chains: tuple = None

    def __post_init__(self):
        P = np.array(self.basis, dtype=np.complex128)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("flag basis must be square")
        if np.linalg.cond(P) >= MAX_FLAG_COND:
            raise ValueError("flag basis is numerically degenerate")
        P.setflags(write=False)
        object.__setattr__(self, "basis", P)
        if self.chains is None:
            object.__setattr__(self, "chains", tuple(range(P.shape[0])))

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def standard(cls, n: int) -> "Flag":
        return cls(np.eye(n))

    def distance(self, other: "Flag") -> float:
        """Sum over k of the largest principal angle between the k-dim subspaces."""
        total = 0.0
        for k in range(1, self.n):
            total += float(np.max(subspace_angles(self.basis[:, :k], other.basis[:, :k])))
        return total

    def permuted(self, perm) -> "Flag":
        perm = list(perm)
        return Flag(self.basis[:, perm], tuple(self.chains[p] for p in perm))


@dataclass(frozen=True)
class PeripheralHolonomy:
    """Consecutive diagonal ratios of the triangularized rho(l), rho(m)."""

    L: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        L = np.array(self.L, dtype=np.complex128)
        M = np.array(self.M, dtype=np.complex128)
        if L.shape != M.shape or L.ndim != 1:
            raise ValueError("L and M must be vectors of equal length")
        if not (np.all(np.isfinite(L)) and np.all(np.isfinite(M))):
            raise ValueError("holonomy entries must be finite")
        if np.any(L == 0) or np.any(M == 0):
            raise ValueError("holonomy entries must be nonzero")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return len(self.L) + 1

    @classmethod
    def from_diagonals(cls, dl, dm) -> "PeripheralHolonomy":
        dl = np.asarray(dl, dtype=np.complex128)
        dm = np.asarray(dm, dtype=np.complex128)
        return cls(dl[1:] / dl[:-1], dm[1:] / dm[:-1])


@dataclass(frozen=True, eq=False)
class Decoration:
    flag: Flag
    eigen_order_l: np.ndarray = field(default=None)
    eigen_order_m: np.ndarray = field(default=None)

    def holonomy(self) -> PeripheralHolonomy:
        return PeripheralHolonomy.from_diagonals(self.eigen_order_l, self.eigen_order_m)


def _commute_projectively(A, B, tol):
    C = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
    scale = 1.0 + np.abs(A).max() * np.abs(np.linalg.inv(A)).max()
    return projective_distance(C, np.eye(A.shape[0])) < tol * scale


def _chain_vectors(A, lam, r):
    """Basis v_1..v_r with v_j in ker (A - lam)^j, orthogonal to ker (A - lam)^(j-1)."""
    n = A.shape[0]
    X = A - lam * np.eye(n)
    vecs = []
    prev = np.zeros((n, 0), dtype=np.complex128)
    Xj = np.eye(n, dtype=np.complex128)
    for j in range(1, r + 1):
        Xj = Xj @ X
        _, _, vh = np.linalg.svd(Xj)
        null = vh[-j:].conj().T
        # direction of `null` orthogonal to the previous kernel
        resid = null - prev @ (prev.conj().T @ null)
        u, _, _ = np.linalg.svd(resid)
        v = u[:, 0]
        vecs.append(v / np.linalg.norm(v))
        prev = np.column_stack([prev, vecs[-1]])
    return vecs


def _multiset_permutations(labels):
    labels = sorted(labels)
    out = []

    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        for i, x in enumerate(remaining):
            if i and remaining[i - 1] == x:
                continue
            rec(prefix + [x], remaining[:i] + remaining[i + 1 :])

    rec([], labels)
    return out


def _lower_defect(P, A):
    T = np.linalg.solve(P, A @ P)
    return float(np.abs(np.tril(T, -1)).max()) / max(1.0, float(np.abs(T).max()))


def _check_tol(tol):
    return max(1e2 * tol, 10 * np.sqrt(tol))


def common_flags(A, B, tol: float = DEFAULT_TOL):
    """All complete flags invariant under the commuting pair (A, B).

    A must be regular.  For each eigenvalue cluster of A the invariant
    subspaces of each dimension inside its generalized eigenspace are
    unique, so flags correspond to orderings of the cluster labels
    (n! of them when the spectrum is simple).
    """
    A = _arr(A)
    B = _arr(B)
    n = A.shape[0]
    if not _commute_projectively(A, B, 1e2 * tol + 1e-10):
        raise ValueError("matrices do not commute projectively")
    if not is_regular(A, tol):
        raise RegularityError("first matrix is not regular: invariant flags are not isolated")
    clusters = cluster_eigenvalues(char_poly(A, tol).eigenvalues, cluster_radius(A, tol, n))
    chains = {c: _chain_vectors(A, lam, r) for c, (lam, r) in enumerate(clusters)}
    labels = [c for c, (_, r) in enumerate(clusters) for _ in range(r)]
    flags = []
    for seq in _multiset_permutations(labels):
        used = {c: 0 for c in chains}
        cols = []
        for c in seq:
            cols.append(chains[c][used[c]])
            used[c] += 1
        P = np.column_stack(cols)
        try:
            flag = Flag(P, tuple(seq))
        except ValueError:
            continue
        if _lower_defect(P, B) > _check_tol(tol) * 1e2:
            continue
        flags.append(flag)
    return flags


def _diagonals(flag: Flag, A, B):
    P = flag.basis
    TA = np.linalg.solve(P, A @ P)
    TB = np.linalg.solve(P, B @ P)
    return TA, TB


def decorate(flag: Flag, A, B, tol: float = DEFAULT_TOL) -> Decoration:
    """Decoration of (A, B) by ``flag``; raises if the flag is not invariant."""
    TA, TB = _diagonals(flag, _arr(A), _arr(B))
    for T in (TA, TB):
        defect = np.abs(np.tril(T, -1)).max() / max(1.0, np.abs(T).max())
        if defect > _check_tol(tol):
            raise DecorationMismatchError(f"flag not invariant (lower-triangular defect {defect:.3g})")
    return Decoration(flag, np.diag(TA).copy(), np.diag(TB).copy())


def select_decoration(flags, reference: Flag, pair=None, tol: float = DEFAULT_TOL) -> Decoration:
    """Flag closest to ``reference``; ``pair = (A, B)`` fills the eigenvalue orders."""
    flags = list(flags)
    if not flags:
        raise ValueError("no flags to select from")
    dists = [f.distance(reference) for f in flags]
    order = np.argsort(dists)
    if len(flags) > 1 and dists[order[1]] - dists[order[0]] <= 1e2 * tol:
        raise AmbiguityError("two flags are equally close to the reference")
    best = flags[order[0]]
    if pair is None:
        return Decoration(best)
    return decorate(best, pair[0], pair[1], tol)


def holonomy_of_pair(A, B, dec: Decoration, tol: float = DEFAULT_TOL) -> PeripheralHolonomy:
    return decorate(dec.flag, A, B, tol).holonomy()


def hol_periph(rep: Representation, l: Word, m: Word, dec: Decoration) -> PeripheralHolonomy:
    return holonomy_of_pair(evaluate(rep, l), evaluate(rep, m), dec, rep.tol)


def weyl_action(dec: Decoration, perm) -> Decoration:
    """Reorder the flag basis; position i of the result takes old position perm[i].

    Vectors of one Jordan chain must keep their relative order.
    """
    perm = list(perm)
    n = dec.flag.n
    if sorted(perm) != list(range(n)):
        raise WeylActionError(f"{perm} is not a permutation of {n} positions")
    chains = dec.flag.chains
    for c in set(chains):
        positions = [p for p in perm if chains[p] == c]
        if positions != sorted(positions):
            raise WeylActionError("permutation reorders vectors inside a Jordan chain")
    el = None if dec.eigen_order_l is None else np.asarray(dec.eigen_order_l)[perm]
    em = None if dec.eigen_order_m is None else np.asarray(dec.eigen_order_m)[perm]
    return Decoration(dec.flag.permuted(perm), el, em)


def is_unipotent_regular(A, tol: float = DEFAULT_TOL) -> bool:
    """All eigenvalues 1 and a single Jordan block.

    Unipotency is tested as ``tr A = n`` and ``(A - I)^n = 0`` rather than
    through individual eigenvalues, which split by O(eps^(1/n)).
    """
    A = _arr(A)
    n = A.shape[0]
    X = A - np.eye(n)
    scale = 1.0 + np.abs(X).max()
    if abs(np.trace(A) / n - 1) > tol * scale:
        return False
    if np.abs(np.linalg.matrix_power(X, n)).max() > 1e2 * tol * scale**n:
        return False
    return is_regular(A, tol)


def is_projectively_unipotent_regular(A, tol: float = DEFAULT_TOL) -> bool:
    """``is_unipotent_regular`` after dividing A by its mean eigenvalue."""
    A = _arr(A)
    mean = np.trace(A) / A.shape[0]
    if abs(mean) == 0:
        return False
    return is_unipotent_regular(A / mean, tol)


def is_projectively_unipotent(A, tol: float = DEFAULT_TOL) -> bool:
    A = _arr(A)
    n = A.shape[0]
    mean = np.trace(A) / n
    X = A / mean - np.eye(n)
    scale = 1.0 + np.abs(X).max()
    return bool(np.abs(np.linalg.matrix_power(X, n)).max() <= 1e2 * tol * scale**n)


def eigenspace_dimension(A, lam, tol: float = DEFAULT_TOL) -> int:
    A = _arr(A)
    scale = max(1.0, np.abs(A).max())
    return numerical_nullity(A - lam * np.eye(A.shape[0]), threshold=1e2 * np.sqrt(tol) * scale)
