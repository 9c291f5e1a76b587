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
"""Builds assets/canonical_face_v1.json from a reference 68-point frontal face.

The 2D layout is mirrored about the vertical midline and averaged, then each
point is lifted with a per-region depth profile (pixels, +Z toward camera).
"""
import json
import sys

# Frontal reference face on the 512x512 canvas, canonical 0..67 order.
REFERENCE = [
    [160, 198], [160, 226], [164, 247], [171, 267], [178, 291], [191, 312],
    [202, 322], [219, 336], [250, 346], [277, 339], [298, 326], [315, 315],
    [329, 295], [336, 271], [339, 247], [346, 226], [346, 198], [174, 174],
    [184, 167], [198, 167], [212, 167], [226, 174], [274, 174], [284, 171],
    [298, 167], [315, 171], [325, 178], [250, 202], [246, 222], [246, 236],
    [246, 250], [233, 257], [236, 260], [246, 264], [257, 260], [267, 257],
    [191, 198], [202, 195], [212, 195], [226, 202], [215, 205], [202, 202],
    [274, 202], [284, 198], [298, 198], [305, 202], [298, 205], [284, 205],
    [212, 281], [222, 278], [239, 278], [250, 278], [257, 278], [274, 278],
    [288, 284], [274, 298], [260, 305], [246, 308], [236, 305], [222, 298],
    [215, 281], [236, 284], [250, 284], [260, 284], [288, 284], [260, 291],
    [246, 295], [236, 291],
]

MIRROR = list(range(16, -1, -1))                      # jaw
MIRROR += [26, 25, 24, 23, 22, 21, 20, 19, 18, 17]    # brows
MIRROR += [27, 28, 29, 30, 35, 34, 33, 32, 31]        # nose
MIRROR += [45, 44, 43, 42, 47, 46, 39, 38, 37, 36, 41, 40]  # eyes
MIRROR += [54, 53, 52, 51, 50, 49, 48, 59, 58, 57, 56, 55]  # outer lip
MIRROR += [64, 63, 62, 61, 60, 67, 66, 65]            # inner lip


def depth(i):
    if i <= 16:
        return -40.0 + 40.0 * (1.0 - abs(i - 8) / 8.0)
    if i <= 26:
        return 10.0
    if i <= 30:
        return 10.0 + (i - 27) * 3.0
    if i <= 35:
        return {31: 25.0, 32: 32.0, 33: 40.0, 34: 32.0, 35: 25.0}[i]
    if i <= 47:
        return 5.0
    return 15.0


def main(out_path):
    assert len(REFERENCE) == 68 and sorted(MIRROR) == list(range(68))
    assert all(MIRROR[MIRROR[i]] == i for i in range(68))
    mid = sum(p[0] for p in REFERENCE) / 68.0
    pts = []
    for i in range(68):
        j = MIRROR[i]
        # mirrored partner reflected about the midline, then averaged
        x = 0.5 * ((REFERENCE[i][0] - mid) - (REFERENCE[j][0] - mid)) + 256.0
        y = 0.5 * (REFERENCE[i][1] + REFERENCE[j][1])
        pts.append([round(x, 6), round(y, 6), depth(i)])
    doc = {
        "schema_version": 1,
        "name": "canonical_face",
        "canvas": [512, 512],
        "mirror": MIRROR,
        "points": pts,
    }
    with open(out_path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "assets/canonical_face_v1.json")
