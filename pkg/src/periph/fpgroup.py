"""Finitely presented groups, words and matrix representations."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cxmat import DEFAULT_TOL, CMatrix, projective_distance


@dataclass(frozen=True)
class Word:
    """Signed 1-based generator indices; ``-i`` is the inverse of generator ``i``."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise ValueError("letter 0 is not a generator index")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def reduced(self) -> "Word":
        out = []
        for x in self.letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return Word(tuple(out))

    def format(self, names) -> str:
        return " ".join(names[x - 1] if x > 0 else names[-x - 1].upper() for x in self.letters)

    @classmethod
    def parse(cls, text: str, names) -> "Word":
        """Parse whitespace separated letters, uppercase meaning inverse.

        ``"G1 g3 G1 g3"`` over generators ``["g1", "g3"]``.  Single-letter
        generator names may also be written without spaces (``"aBAb"``).
        """
        lower = [nm.lower() for nm in names]
        if len(set(lower)) != len(lower):
            raise ValueError("generator names must be case-insensitively distinct")
        tokens = text.split()
        if len(tokens) == 1 and all(len(nm) == 1 for nm in names) and len(tokens[0]) > 1:
            tokens = list(tokens[0])
        letters = []
        for tok in tokens:
            if tok.lower() not in lower:
                raise ValueError(f"unknown generator {tok!r}; expected one of {list(names)}")
            idx = lower.index(tok.lower()) + 1
            if tok == tok.lower() and tok != tok.upper():
                letters.append(idx)
            elif tok == tok.upper() and tok != tok.lower():
                letters.append(-idx)
            else:
                raise ValueError(f"cannot tell the sign of letter {tok!r}")
        return cls(tuple(letters))


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


@dataclass(frozen=True)
class Presentation:
    generator_names: tuple
    relators: tuple  # of (lhs, rhs) Word pairs

    def __post_init__(self):
        names = tuple(self.generator_names)
        rels = tuple((Word(l.letters), Word(r.letters)) for l, r in self.relators)
        if not names:
            raise ValueError("a presentation needs at least one generator")
        for lhs, rhs in rels:
            if len(lhs) + len(rhs) == 0:
                raise ValueError("empty relator")
            self.check_word(lhs, names)
            self.check_word(rhs, names)
        object.__setattr__(self, "generator_names", names)
        object.__setattr__(self, "relators", rels)

    @property
    def ngens(self) -> int:
        return len(self.generator_names)

    @staticmethod
    def check_word(w: Word, names):
        if any(abs(x) > len(names) for x in w.letters):
            raise ValueError(f"word {w.letters} references a missing generator")

    def word(self, text: str) -> Word:
        return Word.parse(text, self.generator_names)

    def format(self, w: Word) -> str:
        return w.format(self.generator_names)


def _slots(w: Word) -> np.ndarray:
    # slot 2i holds generator i, slot 2i+1 its inverse
    return np.array([2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1 for x in w.letters], dtype=np.int_)


def slot_stack(images) -> np.ndarray:
    """(S, n, n) array interleaving images and their inverses."""
    mats = []
    for g in images:
        mats.append(g)
        mats.append(np.linalg.inv(g))
    return np.array(mats, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Representation:
    """Generator images as determinant-one lifts.

    Construction checks ``|det - 1| < tol`` per image and that the relator
    residual is below ``residual_bound``.
    """

    presentation: Presentation
    images: tuple
    tol: float = DEFAULT_TOL
    residual_bound: float = 1e-8
    _slots: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        imgs = tuple(np.array(_as_array(g), dtype=np.complex128) for g in self.images)
        if len(imgs) != self.presentation.ngens:
            raise ValueError(f"expected {self.presentation.ngens} images, got {len(imgs)}")
        n = imgs[0].shape[0]
        for name, g in zip(self.presentation.generator_names, imgs):
            CMatrix(g, self.tol)  # shape / finiteness checks
            if g.shape != (n, n):
                raise ValueError("all images must have the same size")
            if abs(np.linalg.det(g) - 1) >= self.tol * max(1.0, np.abs(g).max() ** n):
                raise ValueError(f"image of {name} does not have determinant 1 (det={np.linalg.det(g):.6g})")
            g.setflags(write=False)
        object.__setattr__(self, "images", imgs)
        stack = slot_stack(imgs)
        stack.setflags(write=False)
        object.__setattr__(self, "_slots", stack)
        res = relator_residual(self)
        if res >= self.residual_bound:
            raise ValueError(f"relator residual {res:.3g} exceeds bound {self.residual_bound:g}")

    @property
    def n(self) -> int:
        return self.images[0].shape[0]

    @property
    def slot_matrices(self) -> np.ndarray:
        return self._slots

    def __getitem__(self, w) -> np.ndarray:
        if isinstance(w, str):
            w = self.presentation.word(w)
        return evaluate(self, w)

    def with_images(self, images, **kw) -> "Representation":
        kw.setdefault("tol", self.tol)
        kw.setdefault("residual_bound", self.residual_bound)
        return Representation(self.presentation, tuple(images), **kw)

    def conjugate(self, P) -> "Representation":
        """Images ``P^-1 g P``."""
        P = np.asarray(P, dtype=np.complex128)
        Pi = np.linalg.inv(P)
        return self.with_images([Pi @ g @ P for g in self.images])


def _as_array(g):
    return g.entries if isinstance(g, CMatrix) else g


def evaluate(rep: Representation, w: Word) -> np.ndarray:
    """Left-to-right product of generator images; empty word gives identity."""
    Presentation.check_word(w, rep.presentation.generator_names)
    return kernels.word_product(rep.slot_matrices[None], _slots(w))[0]


def evaluate_images(images, w: Word) -> np.ndarray:
    return kernels.word_product(slot_stack(images)[None], _slots(w))[0]


def relator_residual(rep: Representation) -> float:
    worst = 0.0
    for lhs, rhs in rep.presentation.relators:
        worst = max(worst, projective_distance(evaluate(rep, lhs), evaluate(rep, rhs)))
    return worst


def abelianized_exponents(w: Word, ngens: int | None = None) -> np.ndarray:
    ngens = ngens or max((abs(x) for x in w.letters), default=0)
    out = np.zeros(ngens, dtype=int)
    for x in w.letters:
        out[abs(x) - 1] += 1 if x > 0 else -1
    return out


def _power(M, k):
    return np.linalg.matrix_power(M, k) if k >= 0 else np.linalg.matrix_power(np.linalg.inv(M), -k)


def is_scalar_power(W, M, kmax, tol):
    """Integer k with ``W ~ M**k`` projectively, or None."""
    for k in sorted(range(-kmax, kmax + 1), key=abs):
        if projective_distance(_power(M, k), W) < tol:
            return k
    return None


def find_commuting_words(rep: Representation, m: Word, max_len: int, tol: float = 1e-8):
    """Words of length <= max_len whose image commutes projectively with rho(m).

    Images that are (scalar multiples of) powers of rho(m) are dropped, and
    results are deduplicated up to inversion and multiplication by powers
    of m, keeping the shortest representative.  When m is a single letter,
    words starting or ending with that letter are skipped since stripping
    them gives an equivalent shorter word.  Returns an empty list when
    nothing qualifies.
    """
    M = evaluate(rep, m)
    Minv = np.linalg.inv(M)
    S = 2 * rep.presentation.ngens
    inverse_slot = np.array([s ^ 1 for s in range(S)], dtype=np.int_)
    forbid = np.zeros(S, dtype=np.uint8)
    if len(m) == 1:
        g = abs(m.letters[0]) - 1
        forbid[2 * g] = forbid[2 * g + 1] = 1
    raw = kernels.commuting_words(rep.slot_matrices, inverse_slot, M, Minv, max_len, tol, forbid, forbid)
    words = [Word(tuple((s // 2 + 1) * (1 if s % 2 == 0 else -1) for s in slots)) for slots in raw]
    words.sort(key=lambda w: (len(w), w.letters))
    kmax = 4 * max_len + 4
    kept, kept_imgs = [], []
    for w in words:
        W = evaluate(rep, w)
        if is_scalar_power(W, M, kmax, tol * 1e2) is not None:
            continue
        dup = False
        for V in kept_imgs:
            for cand in (V, np.linalg.inv(V)):
                if is_scalar_power(W @ np.linalg.inv(cand), M, kmax, tol * 1e2) is not None:
                    dup = True
                    break
            if dup:
                break
        if not dup:
            kept.append(w)
            kept_imgs.append(W)
    return kept


def homological_longitude(rep: Representation, m: Word, max_len: int, weights=None, tol: float = 1e-8):
    """Shortest commuting word mapping to 0 under ``exponents . weights``.

    ``weights`` defaults to all ones (every generator a meridian).  Returns
    None if the search finds nothing.
    """
    weights = np.ones(rep.presentation.ngens, dtype=int) if weights is None else np.asarray(weights)
    for w in find_commuting_words(rep, m, max_len, tol):
        if int(abelianized_exponents(w, rep.presentation.ngens) @ weights) == 0:
            return w
    return None
