#!/usr/bin/env python3
# Copyright 2026 The lato Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes tests/fixtures/attention_golden.json.

A straight-line NumPy forward pass of one rotary multi-head attention block
over three tokens, kept separate from the C++ code so the regression fixture
does not share an implementation with what it checks.
"""
import json
import sys

import numpy as np

D_MODEL = 12
HEADS = 2
HEAD_DIM = D_MODEL // HEADS
LAYOUT = (2, 2, 2)  # text, row, column sub-dimensions of one head
BASE = 10000.0
POSITIONS = [(0, 0, 0), (3, 0, 0), (0, 12, 10)]


def rotate(vec, pos):
    out = vec.copy()
    start = 0
    for dim, p in zip(LAYOUT, pos):
        for j in range(dim // 2):
            theta = p * BASE ** (-2.0 * j / dim)
            a, b = vec[start + 2 * j], vec[start + 2 * j + 1]
            out[start + 2 * j] = a * np.cos(theta) - b * np.sin(theta)
            out[start + 2 * j + 1] = a * np.sin(theta) + b * np.cos(theta)
        start += dim
    return out


def main(path):
    rng = np.random.default_rng(20260101)
    z = rng.normal(size=(3, D_MODEL))
    w = {k: rng.normal(scale=D_MODEL ** -0.5, size=(D_MODEL, D_MODEL)) for k in "qkvo"}
    q, k, v = z @ w["q"].T, z @ w["k"].T, z @ w["v"].T
    heads_out = np.zeros((3, D_MODEL))
    for h in range(HEADS):
        sl = slice(h * HEAD_DIM, (h + 1) * HEAD_DIM)
        qh = np.array([rotate(q[i, sl], POSITIONS[i]) for i in range(3)])
        kh = np.array([rotate(k[i, sl], POSITIONS[i]) for i in range(3)])
        for i in range(3):
            logits = np.array([qh[i] @ kh[j] for j in range(3)]) / np.sqrt(HEAD_DIM)
            e = np.exp(logits - logits.max())
            weights = e / e.sum()
            heads_out[i, sl] = sum(weights[j] * v[j, sl] for j in range(3))
    out = heads_out @ w["o"].T
    doc = {
        "d_model": D_MODEL,
        "heads": HEADS,
        "layout": list(LAYOUT),
        "base": BASE,
        "positions": [list(p) for p in POSITIONS],
        "tokens": z.tolist(),
        "wq": w["q"].tolist(),
        "wk": w["k"].tolist(),
        "wv": w["v"].tolist(),
        "wo": w["o"].tolist(),
        "output": out.tolist(),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/attention_golden.json")
