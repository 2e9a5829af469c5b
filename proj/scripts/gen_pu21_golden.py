#!/usr/bin/env python3
# Regenerates tests/data/pu21_golden.json.
#
# Evaluates the PU21 encoder (pu21_encoder.m, "banding_glare" fit) in 50-digit
# arithmetic at 20 log-spaced luminances spanning the encoder's validity range.
# The output is committed; the C++ tests compare against it.
import json
import pathlib

import mpmath

mpmath.mp.dps = 50

ROOT = pathlib.Path(__file__).resolve().parent.parent
coeffs = json.loads((ROOT / "data/pu21/banding_glare.json").read_text())
p = [mpmath.mpf(repr(c)) for c in coeffs["coefficients"]]


def encode(y):
    yn = y ** p[3]
    return p[6] * (((p[0] + p[1] * yn) / (1 + p[2] * yn)) ** p[4] - p[5])


lo, hi = mpmath.log10(mpmath.mpf("0.005")), mpmath.log10(mpmath.mpf("10000"))
rows = []
for i in range(20):
    y = mpmath.power(10, lo + (hi - lo) * i / 19)
    rows.append({"luminance": float(y), "pu": float(encode(mpmath.mpf(float(y))))})

out = {"variant": coeffs["variant"], "values": rows}
(ROOT / "tests/data/pu21_golden.json").write_text(json.dumps(out, indent=2) + "\n")
