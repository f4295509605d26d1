#!/usr/bin/env python3
# Copyright 2026 The ptree-engine Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the bundled 4-experiment synthetic dataset.

16x16 two-channel images with sixteen 4x4 spots. Each spot's red channel is
set so that log2((red + 1) / (green + 1)) hits a per-experiment target.
Output is deterministic; rerunning overwrites the files in place.
"""
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
SIDE = 16
GREEN = 50

# gene -> (group, reference, target log-ratio per experiment e1..e4)
EXPRESSED, OFF = 1.2, 0.0
VHE, HE, NEU, HR, VHR = 2.0, 1.0, 0.0, -1.0, -2.0
GENES = [
    ("ref1", "X", 1, None),
    ("ref2", "X", 1, None),
    ("x1", "X", 0, [EXPRESSED, EXPRESSED, EXPRESSED, OFF]),
    ("x2", "X", 0, [EXPRESSED, EXPRESSED, OFF, EXPRESSED]),
    ("x3", "X", 0, [OFF, EXPRESSED, EXPRESSED, EXPRESSED]),
    ("x4", "X", 0, [EXPRESSED, OFF, OFF, OFF]),
    ("x5", "X", 0, [OFF, OFF, OFF, OFF]),
    ("y1", "Y", 0, [HE, HE, HE, NEU]),
    ("y2", "Y", 0, [VHR, VHR, NEU, VHR]),
    ("y3", "Y", 0, [HE, HE, NEU, NEU]),
    ("y4", "Y", 0, [NEU, NEU, NEU, NEU]),
    ("y5", "Y", 0, [VHE, VHE, VHE, VHE]),
    ("y6", "Y", 0, [NEU, HR, HR, NEU]),
    ("y7", "Y", 0, [HE, NEU, HE, HE]),
    ("y8", "Y", 0, [VHE, NEU, NEU, VHE]),
    ("y9", "Y", 0, [NEU, VHR, NEU, NEU]),
]
EXPERIMENTS = [("e1", "pgm"), ("e2", "pgm"), ("e3", "csv"), ("e4", "csv")]


def red_for(ratio):
    return max(0, min(255, round((GREEN + 1) * 2.0 ** ratio - 1)))


def images(e):
    green = [[GREEN] * SIDE for _ in range(SIDE)]
    red = [[GREEN] * SIDE for _ in range(SIDE)]
    for idx, (gene, _group, ref, targets) in enumerate(GENES):
        sx, sy = (idx % 4) * 4, (idx // 4) * 4
        for y in range(sy, sy + 4):
            for x in range(sx, sx + 4):
                if ref:
                    r = 0.4 if (x + y) % 2 == 0 else -0.4
                else:
                    r = targets[e]
                    # one off-target pixel per expressed X spot
                    if x == sx and y == sy and r == EXPRESSED:
                        r = OFF
                red[y][x] = red_for(r)
    return red, green


def write_pgm(path, grid):
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (SIDE, SIDE))
        f.write(bytes(v for row in grid for v in row))


def write_csv(path, grid):
    with open(path, "w") as f:
        for row in grid:
            f.write(",".join(str(v) for v in row) + "\n")


def main():
    with open(os.path.join(HERE, "spots.tsv"), "w") as f:
        f.write("gene_id\tx0\ty0\tx1\ty1\tgroup\treference\n")
        for idx, (gene, group, ref, _t) in enumerate(GENES):
            sx, sy = (idx % 4) * 4, (idx // 4) * 4
            f.write(f"{gene}\t{sx}\t{sy}\t{sx + 3}\t{sy + 3}\t{group}\t{ref}\n")

    with open(os.path.join(HERE, "manifest.tsv"), "w") as f:
        f.write("experiment_id\tred\tgreen\tmu\tsigma\n")
        for e, (name, ext) in enumerate(EXPERIMENTS):
            red, green = images(e)
            writer = write_pgm if ext == "pgm" else write_csv
            writer(os.path.join(HERE, f"{name}_red.{ext}"), red)
            writer(os.path.join(HERE, f"{name}_green.{ext}"), green)
            # e4 pins its reference statistics instead of estimating them
            stats = "0\t0.4" if name == "e4" else "-\t-"
            f.write(f"{name}\t{name}_red.{ext}\t{name}_green.{ext}\t{stats}\n")


if __name__ == "__main__":
    main()
