"""JSON wire format for presentations, representations and decorations.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists.  A representation document looks like::

    {"n": 3,
     "presentation": {"generators": ["g1", "g3"],
                      "relators": [["g3 G1 G3 g1 g3", "g1 g3 G1 G3 g1"]]},
     "images": {"g1": [[[1, 0], ...], ...], "g3": ...},
     "tol": 1e-9}

Corpus files may add an ``"expressions"`` block with the same layout as
``"images"`` holding exact expression strings such as ``"-1/2 - i*sqrt(3)/2"``.
"""
from __future__ import annotations

import ast
import json
import math
import operator

import numpy as np

from .cxmat import DEFAULT_TOL
from .fpgroup import Presentation, Representation, Word

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def eval_expression(text: str) -> complex:
    """Evaluate an arithmetic expression in integers, ``i`` and ``sqrt``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "i":
            return 1j
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
        ):
            return math.sqrt(ev(node.args[0]))
        raise ValueError(f"unsupported expression element in {text!r}")

    return complex(ev(ast.parse(text, mode="eval")))


def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValueError(f"complex numbers are [re, im] pairs, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(A) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(A)]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex_from_json(v) for v in row] for row in rows], dtype=np.complex128)


def presentation_to_json(pres: Presentation) -> dict:
    return {
        "generators": list(pres.generator_names),
        "relators": [[pres.format(l), pres.format(r)] for l, r in pres.relators],
    }


def presentation_from_json(doc: dict) -> Presentation:
    names = tuple(doc["generators"])
    rels = []
    for pair in doc["relators"]:
        if isinstance(pair, str):
            rels.append((Word.parse(pair, names), Word(())))
        else:
            lhs, rhs = pair
            rels.append((Word.parse(lhs, names), Word.parse(rhs, names)))
    return Presentation(names, tuple(rels))


def representation_to_json(rep: Representation, **extra) -> dict:
    doc = {
        "n": rep.n,
        "presentation": presentation_to_json(rep.presentation),
        "images": {
            name: matrix_to_json(g) for name, g in zip(rep.presentation.generator_names, rep.images)
        },
        "tol": rep.tol,
    }
    doc.update(extra)
    return doc


def images_from_json(doc: dict, pres: Presentation, prefer_expressions: bool = True):
    exprs = doc.get("expressions") if prefer_expressions else None
    images = []
    for name in pres.generator_names:
        if exprs and name in exprs:
            images.append(np.array([[eval_expression(e) for e in row] for row in exprs[name]]))
        else:
            images.append(matrix_from_json(doc["images"][name]))
    return images


def representation_from_json(doc: dict, residual_bound: float = 1e-8) -> Representation:
    pres = presentation_from_json(doc["presentation"])
    images = images_from_json(doc, pres)
    n = int(doc.get("n", images[0].shape[0]))
    if any(g.shape != (n, n) for g in images):
        raise ValueError(f"images do not match declared dimension n={n}")
    return Representation(pres, tuple(images), tol=float(doc.get("tol", DEFAULT_TOL)), residual_bound=residual_bound)


def load_representation(path, residual_bound: float = 1e-8) -> Representation:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return representation_from_json(doc, residual_bound)


def dump_representation(rep: Representation, path, **extra):
    with open(path, "w") as fh:
        json.dump(representation_to_json(rep, **extra), fh, indent=1)
        fh.write("\n")


def decoration_to_json(dec) -> dict:
    out = {"flag": matrix_to_json(dec.flag.basis), "chains": list(dec.flag.chains)}
    if dec.eigen_order_l is not None:
        out["eigen_order_l"] = [complex_to_json(z) for z in dec.eigen_order_l]
        out["eigen_order_m"] = [complex_to_json(z) for z in dec.eigen_order_m]
    return out


def decoration_from_json(doc: dict):
    from .flagdec import Decoration, Flag

    flag = Flag(matrix_from_json(doc["flag"]), tuple(doc.get("chains", range(len(doc["flag"])))))
    el = doc.get("eigen_order_l")
    em = doc.get("eigen_order_m")
    return Decoration(
        flag,
        None if el is None else np.array([complex_from_json(v) for v in el]),
        None if em is None else np.array([complex_from_json(v) for v in em]),
    )
