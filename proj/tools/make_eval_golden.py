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

"""Writes the two-record evaluation fixture and its expected report.

The expected numbers are computed here from the formulas directly, so the
golden report does not depend on the C++ evaluation code.
"""
import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

ALPHA = 2.0
EPS = 1e-5
TABLE = {"slightly": 0.12, "normally": 0.25, "strongly": 0.40}


def shift(doc, dx, dy):
    return {k: [[x + dx, y + dy] for x, y in pts] for k, pts in doc.items()}


def l1(a, b):
    diffs = []
    for k in a:
        for (ax, ay), (bx, by) in zip(a[k], b[k]):
            diffs += [abs(ax - bx), abs(ay - by)]
    return sum(diffs) / len(diffs)


def rectified(s_arc, phi_ins, phi_real):
    p = min(1.0, (abs(phi_ins - phi_real) / (phi_ins + EPS)) ** ALPHA)
    return p, max(0.0, s_arc - p)


def main():
    with open(os.path.join(FIXTURES, "sample_source.json")) as f:
        face = json.load(f)
    records = [
        {"id": "noop", "instruction": "no-op", "s_arc": 0.9, "phi_real": 0.0,
         "predicted_landmarks": shift(face, 3, -1), "target_landmarks": face,
         "mock_scores": {"sc": 0.8, "vq": 0.7, "na": 0.6}},
        {"id": "scared", "instruction": "make her facial expression scared normally",
         "s_arc": 0.984, "phi_real": 0.05,
         "mock_scores": {"sc": 0.5, "vq": 0.4, "na": 0.9}},
    ]
    samples = []
    for r in records:
        phi_ins = 0.0 if r["instruction"] == "no-op" else TABLE[r["instruction"].split()[-1]]
        p, ip = rectified(r["s_arc"], phi_ins, r["phi_real"])
        err = l1(r["predicted_landmarks"], r["target_landmarks"]) if "predicted_landmarks" in r else None
        samples.append({"id": r["id"], "sc": r["mock_scores"]["sc"], "vq": r["mock_scores"]["vq"],
                        "na": r["mock_scores"]["na"], "s_arc": r["s_arc"], "phi_ins": phi_ins,
                        "phi_real": r["phi_real"], "penalty": p, "ip": ip,
                        "landmark_error": err, "errors": []})

    def agg(key):
        vals = [s[key] for s in samples if s[key] is not None]
        return {"count": len(vals), "missing": len(samples) - len(vals),
                "mean": sum(vals) / len(vals) if vals else None}

    report = {"schema_version": 1, "provenance": "mock", "malformed": 0, "samples": samples,
              "aggregates": {k: agg(k) for k in ("sc", "vq", "na", "ip", "landmark_error")}}
    with open(os.path.join(FIXTURES, "eval_fixture.jsonl"), "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")
    with open(os.path.join(FIXTURES, "eval_golden.json"), "w") as f:
        json.dump(report, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    sys.exit(main())
