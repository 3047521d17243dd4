"""Figure-eight knot group data.

Presentation ``<g1, g3 | [g3, g1^-1] g3 = g1 [g3, g1^-1]>`` with the
commutator convention ``[a, b] = a b a^-1 b^-1``, the three printed
boundary-unipotent representations into SL(3,C) (rho1, rho2, rho3), the
parabolic SL(2,C) representation ``geom2`` and its lift ``geom3``.

Data files live in ``data/`` and are guarded by sha256 checksums in
``MANIFEST.json``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..errors import CorpusIntegrityError
from ..flagdec import is_projectively_unipotent_regular
from ..cxmat import projective_distance
from ..fpgroup import Presentation, Representation, Word, commutator, evaluate
from ..jsonio import eval_expression, representation_from_json
from ..symlift import lift_rep

DATA_DIR = Path(__file__).parent / "data"
NAMES = ("geom2", "geom3", "rho1", "rho2", "rho3")
PRINTED = ("rho1", "rho2", "rho3")


@dataclass(frozen=True)
class NamedRep:
    name: str
    rep: Representation
    provenance: str


def presentation_fig8() -> Presentation:
    g1, g3 = Word((1,)), Word((2,))
    c = commutator(g3, g1.inverse())
    return Presentation(("g1", "g3"), ((c * g3, g1 * c),))


def _data_dir(data_dir):
    return Path(data_dir) if data_dir is not None else DATA_DIR


def verify_checksums(data_dir=None) -> dict:
    """Compare every file listed in MANIFEST.json against its sha256."""
    d = _data_dir(data_dir)
    try:
        manifest = json.loads((d / "MANIFEST.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusIntegrityError(f"cannot read corpus manifest: {exc}") from exc
    for fname, digest in manifest["files"].items():
        path = d / fname
        if not path.exists():
            raise CorpusIntegrityError(f"missing corpus file {fname}")
        actual = hashlib.sha256(path.read_bytes()).hexdigest()
        if actual != digest:
            raise CorpusIntegrityError(f"checksum mismatch for {fname}")
    return manifest


def _read(fname, data_dir):
    verify_checksums(data_dir)
    return json.loads((_data_dir(data_dir) / fname).read_text())


# exact polynomial arithmetic over Z for the parabolic relator solve

def _padd(p, q):
    out = [0] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return out


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _pneg(p):
    return [-c for c in p]


def _mat_mul(A, B):
    return [
        [_padd(_pmul(A[i][0], B[0][j]), _pmul(A[i][1], B[1][j])) for j in range(2)]
        for i in range(2)
    ]


def _mat_inv(A):
    # determinant one
    return [[A[1][1], _pneg(A[0][1])], [_pneg(A[1][0]), A[0][0]]]


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _pgcd(p, q):
    """Monic gcd over Q of integer polynomials (coefficients by increasing degree)."""
    a = [Fraction(c) for c in _trim(p)]
    b = [Fraction(c) for c in _trim(q)]
    while any(b):
        while len(a) >= len(b) and any(a):
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] -= f * c
            a = _trim(a)
        a, b = b, a
    return [c / a[-1] for c in a]


def riley_polynomial(pres: Presentation | None = None):
    """Integer polynomial in z whose roots make g1 -> [[1,1],[0,1]],
    g3 -> [[1,0],[z,1]] a representation (coefficients by increasing degree).

    This is the gcd of all relator-entry polynomials with the abelian
    factor z removed, scaled to primitive integer coefficients.
    """
    pres = pres or presentation_fig8()
    one, zero, zz = [1], [0], [0, 1]
    gens = {1: [[one, one], [zero, one]], 2: [[one, zero], [zz, one]]}

    def ev(w):
        M = [[one, zero], [zero, one]]
        for x in w.letters:
            g = gens[abs(x)]
            M = _mat_mul(M, g if x > 0 else _mat_inv(g))
        return M

    g = [0]
    for lhs, rhs in pres.relators:
        L, R = ev(lhs), ev(rhs)
        for i in range(2):
            for j in range(2):
                d = _trim(_padd(L[i][j], _pneg(R[i][j])))
                if any(d):
                    g = d if not any(g) else _pgcd(g, d)
    if not any(g):
        raise CorpusIntegrityError("relator is satisfied identically by the parabolic family")
    while len(g) > 1 and g[0] == 0:
        g = g[1:]
    denom = math.lcm(*(Fraction(c).denominator for c in g))
    coeffs = [int(Fraction(c) * denom) for c in g]
    content = math.gcd(*coeffs)
    return [c // content for c in coeffs]


def parabolic_rep(zval) -> Representation:
    pres = presentation_fig8()
    g1 = np.array([[1, 1], [0, 1]], dtype=np.complex128)
    g3 = np.array([[1, 0], [zval, 1]], dtype=np.complex128)
    return Representation(pres, (g1, g3))


@lru_cache(maxsize=None)
def _derived_geom2():
    from ..defsolve import make_gauge, rank_check
    from ..errors import AmbiguousRankError, GaugeError

    coeffs = riley_polynomial()
    roots = np.roots(list(reversed(coeffs)))
    l, m = canonical_peripheral_words()
    candidates = []
    for zval in roots:
        rep2 = parabolic_rep(complex(zval))
        # an SL(2) lift of a parabolic may have trace -2, hence the projective test
        if not all(is_projectively_unipotent_regular(evaluate(rep2, w)) for w in (l, m)):
            continue
        try:
            rep3 = lift_rep(rep2, 3)
            nullity = rank_check(rep3, make_gauge(rep3, l, m)).nullity
        except (GaugeError, AmbiguousRankError):
            continue
        if nullity == 2:
            candidates.append(complex(zval))
    if not candidates:
        raise CorpusIntegrityError("no root of the Riley polynomial gives a rigid lift")
    # complex-conjugate roots give mirror images; fix the orientation by Im z > 0
    zval = max(candidates, key=lambda c: c.imag)
    return zval, coeffs


def _polish_root(zval, coeffs):
    # one Newton step on the integer polynomial
    p = np.polynomial.Polynomial(coeffs)
    return zval - p(zval) / p.deriv()(zval)


@lru_cache(maxsize=None)
def _load(name, data_dir):
    if name == "geom2":
        zval, coeffs = _derived_geom2()
        zval = _polish_root(zval, coeffs)
        stored = _read("geom2.json", data_dir)
        expected = eval_expression(stored["expressions"]["g3"][1][0])
        if abs(expected - zval) > 1e-12:
            raise CorpusIntegrityError(f"derived parabolic parameter {zval} disagrees with stored {expected}")
        rep = parabolic_rep(expected)
        poly = " + ".join(f"{c}*z^{k}" for k, c in enumerate(coeffs))
        return NamedRep("geom2", rep, f"parabolic solve of the relator, root of {poly} with Im z > 0")
    if name == "geom3":
        return NamedRep("geom3", lift_rep(_load("geom2", data_dir).rep, 3), "r_3 applied to geom2")
    if name in PRINTED:
        doc = _read(f"{name}.json", data_dir)
        return NamedRep(name, representation_from_json(doc), doc.get("provenance", ""))
    raise KeyError(f"unknown corpus representation {name!r}; expected one of {NAMES}")


def load_named(name: str, data_dir=None) -> NamedRep:
    return _load(name, None if data_dir is None else str(data_dir))


@lru_cache(maxsize=None)
def _peripheral(data_dir):
    return _read("peripheral.json", data_dir)


def canonical_peripheral_words(data_dir=None):
    """(longitude, meridian) pinned in the corpus; m = g1."""
    doc = _peripheral(None if data_dir is None else str(data_dir))
    pres = presentation_fig8()
    return pres.word(doc["longitude"]), pres.word(doc["meridian"])


def witness_pair(name: str = "rho2", data_dir=None):
    """(l', m', power) with rho(l') = rho(m')**power for ``name``."""
    doc = _peripheral(None if data_dir is None else str(data_dir))
    w = doc["witness"][name]
    pres = presentation_fig8()
    return pres.word(w["longitude"]), pres.word(w["meridian"]), int(w["power"])


def find_power_relation(rep: Representation, l: Word, m: Word, power: int, kmax: int = 12, tol: float = 1e-8):
    """Shortest l' = l^(+-1) m^k with rho(l') = rho(m)^power projectively, or None."""
    target = np.linalg.matrix_power(evaluate(rep, m), power) if power >= 0 else np.linalg.matrix_power(
        np.linalg.inv(evaluate(rep, m)), -power
    )
    best = None
    for sign in (1, -1):
        for k in range(-kmax, kmax + 1):
            cand = (l if sign > 0 else l.inverse()) * (m**k)
            cand = cand.reduced()
            if projective_distance(evaluate(rep, cand), target) < tol:
                if best is None or len(cand) < len(best):
                    best = cand
    return best
