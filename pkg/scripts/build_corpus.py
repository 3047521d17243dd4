"""Regenerate the figure-eight corpus JSON files and their checksum manifest.

Usage: python3 scripts/build_corpus.py [output_dir]
"""
from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from periph import corpus8
from periph.corpus8 import find_power_relation, parabolic_rep, presentation_fig8, riley_polynomial
from periph.defsolve import cusp_modulus
from periph.fpgroup import homological_longitude
from periph.jsonio import eval_expression, matrix_to_json, presentation_to_json, representation_from_json

VERSION = 1
LONGITUDE_MAX_LEN = 8

PRINTED = {
    "rho1": {
        "g1": [["1", "1", "-1/2 - i*sqrt(3)/2"], ["0", "1", "-1"], ["0", "0", "1"]],
        "g3": [["1", "0", "0"], ["1", "1", "0"], ["-1/2 - i*sqrt(3)/2", "-1", "1"]],
    },
    "rho2": {
        "g1": [["1", "1", "-1/2 - i*sqrt(7)/2"], ["0", "1", "-1"], ["0", "0", "1"]],
        "g3": [["1", "0", "0"], ["-1", "1", "0"], ["-1/2 + i*sqrt(7)/2", "1", "1"]],
    },
    "rho3": {
        "g1": [["1", "1", "-1/2"], ["0", "1", "-1"], ["0", "0", "1"]],
        "g3": [["1", "0", "0"], ["5/4 - i*sqrt(7)/4", "1", "0"], ["-1", "-5/4 - i*sqrt(7)/4", "1"]],
    },
}
GEOM2_Z = "1/2 + i*sqrt(3)/2"


def _doc(exprs, provenance):
    pres = presentation_fig8()
    images = {name: matrix_to_json([[eval_expression(e) for e in row] for row in rows]) for name, rows in exprs.items()}
    return {
        "version": VERSION,
        "n": len(next(iter(exprs.values()))),
        "presentation": presentation_to_json(pres),
        "expressions": exprs,
        "images": images,
        "tol": 1e-9,
        "provenance": provenance,
    }


def _write(path: Path, doc):
    path.write_text(json.dumps(doc, indent=1) + "\n")


def build(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    pres = presentation_fig8()
    docs = {}
    for name, exprs in PRINTED.items():
        docs[f"{name}.json"] = _doc(exprs, "printed boundary-unipotent representation, entries as exact radicals")

    coeffs = riley_polynomial(pres)
    zval = eval_expression(GEOM2_Z)
    if abs(np.polynomial.Polynomial(coeffs)(zval)) > 1e-12:
        raise SystemExit(f"{GEOM2_Z} is not a root of the Riley polynomial {coeffs}")
    geom2 = {"g1": [["1", "1"], ["0", "1"]], "g3": [["1", "0"], [GEOM2_Z, "1"]]}
    gdoc = _doc(geom2, "parabolic relator solve; root of the integer polynomial with Im z > 0")
    gdoc["riley_polynomial"] = coeffs
    docs["geom2.json"] = gdoc

    rep2 = parabolic_rep(zval)
    m = pres.word("g1")
    l = homological_longitude(rep2, m, LONGITUDE_MAX_LEN)
    if l is None:
        raise SystemExit("no longitude found")
    # orientation convention: the cusp modulus t(m)/t(l) lies in the upper half-plane
    if cusp_modulus(rep2, l, m).imag < 0:
        l = l.inverse()
    peripheral = {
        "version": VERSION,
        "meridian": pres.format(m),
        "longitude": pres.format(l),
        "search": {
            "rep": "geom2",
            "max_len": LONGITUDE_MAX_LEN,
            "method": "homological_longitude",
            "orientation": "Im(t(m)/t(l)) > 0",
        },
        "witness": {},
    }
    rho2 = representation_from_json(docs["rho2.json"])
    wl = find_power_relation(rho2, l, m, 5)
    if wl is None:
        raise SystemExit("no witnessing longitude for the rho2 relation")
    peripheral["witness"]["rho2"] = {"longitude": pres.format(wl), "meridian": pres.format(m), "power": 5}
    docs["peripheral.json"] = peripheral

    for fname, doc in docs.items():
        _write(out / fname, doc)
    manifest = {
        "version": VERSION,
        "files": {f: hashlib.sha256((out / f).read_bytes()).hexdigest() for f in sorted(docs)},
    }
    _write(out / "MANIFEST.json", manifest)
    return manifest


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else corpus8.DATA_DIR
    print(json.dumps(build(target), indent=1))
