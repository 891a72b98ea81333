#!/usr/bin/env python3
"""Independent continuity scan for eigenvalue files.

Reads the text eigenvalue format (header '# nk=.. nbands=..', 'k <idx> ...'
records) and reports the largest |de| between the same band at adjacent
k-points. Frozen before the tight-binding solver existed; the bundled
sample parameters must keep the overall maximum below 0.5 eV on the
113-point band path.
"""
import sys


def load(path):
    nk = nbands = None
    rows = []
    tokens = []
    with open(path) as fh:
        for line in fh:
            if "#" in line:
                body = line[line.index("#") + 1 :]
                for tok in body.split():
                    if tok.startswith("nk="):
                        nk = int(tok[3:])
                    elif tok.startswith("nbands="):
                        nbands = int(tok[7:])
                line = line[: line.index("#")]
            tokens.extend(line.split())
    if nk is None or nbands is None:
        raise SystemExit(f"{path}: missing nk=/nbands= header")
    i = 0
    for k in range(nk):
        assert tokens[i] == "k" and int(tokens[i + 1]) == k, f"bad record at k={k}"
        i += 6  # k idx fx fy fz w
        row = sorted(float(tokens[i + n]) for n in range(nbands))
        i += nbands
        rows.append(row)
    return rows


def main():
    if len(sys.argv) != 2:
        raise SystemExit("usage: eig_continuity.py <file.eig>")
    rows = load(sys.argv[1])
    worst = 0.0
    where = (0, 0)
    for k in range(1, len(rows)):
        for n, (a, b) in enumerate(zip(rows[k - 1], rows[k])):
            d = abs(b - a)
            if d > worst:
                worst, where = d, (k, n)
    print(f"max adjacent-k jump: {worst:.6f} eV (k {where[0]-1}->{where[0]}, band {where[1]})")
    return 0 if worst < 0.5 else 1


if __name__ == "__main__":
    sys.exit(main())
