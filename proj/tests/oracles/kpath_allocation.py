#!/usr/bin/env python3
"""Independent largest-remainder k-path allocation oracle.

Computes per-segment interior point counts for a hexagonal cell directly
from the reciprocal basis, without touching the C++ implementation. The
frozen output is asserted in tests/test_bz.cpp and the acceptance suite.

Convention: every path vertex is a sample point exactly once; the
remaining (total - n_vertices) points are split over segments
proportionally to Cartesian segment length, floors first, then one extra
point per segment in order of descending fractional remainder (ties by
lower segment index).
"""

import math
import sys

POINTS = {
    "Gamma": (0.0, 0.0, 0.0),
    "M": (0.5, 0.0, 0.0),
    "K": (1.0 / 3.0, 1.0 / 3.0, 0.0),
    "A": (0.0, 0.0, 0.5),
    "L": (0.5, 0.0, 0.5),
    "H": (1.0 / 3.0, 1.0 / 3.0, 0.5),
}


def reciprocal_hex(a, c):
    # direct: a1=(a,0,0), a2=(-a/2, a*sqrt(3)/2, 0), a3=(0,0,c)
    tp = 2.0 * math.pi
    b1 = (tp / a, tp / (a * math.sqrt(3.0)), 0.0)
    b2 = (0.0, 2.0 * tp / (a * math.sqrt(3.0)), 0.0)
    b3 = (0.0, 0.0, tp / c)
    return b1, b2, b3


def cart(frac, B):
    return tuple(sum(frac[i] * B[i][j] for i in range(3)) for j in range(3))


def allocate(a, c, labels, total):
    B = reciprocal_hex(a, c)
    verts = [cart(POINTS[l], B) for l in labels]
    nseg = len(verts) - 1
    lengths = []
    for i in range(nseg):
        d = [verts[i + 1][j] - verts[i][j] for j in range(3)]
        lengths.append(math.sqrt(sum(x * x for x in d)))
    lsum = sum(lengths)
    extra = total - len(labels)
    quotas = [extra * L / lsum for L in lengths]
    base = [math.floor(q) for q in quotas]
    rem = [q - b for q, b in zip(quotas, base)]
    leftover = extra - sum(base)
    order = sorted(range(nseg), key=lambda i: (-rem[i], i))
    for i in order[:leftover]:
        base[i] += 1
    return lengths, base


def main():
    a, c, total = 3.09, 10.08, 113
    labels = ["Gamma", "M", "K", "Gamma", "A", "L", "H", "A"]
    lengths, interior = allocate(a, c, labels, total)
    print(f"# a={a} c={c} total={total}")
    print("# seg  from->to        length(1/Ang)      interior")
    for i in range(len(interior)):
        seg = f"{labels[i]}->{labels[i + 1]}"
        print(f"{i}  {seg:<14} {lengths[i]:.12f}  {interior[i]}")
    print("interior_counts =", interior)
    print("total_check =", sum(interior) + len(labels))
    assert sum(interior) + len(labels) == total


if __name__ == "__main__":
    sys.exit(main())
