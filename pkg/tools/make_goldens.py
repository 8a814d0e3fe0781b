"""Write the bundled golden tables from a hand transcription of the published ones.

Nothing here calls build_q or decompose: the Q polynomials are entered
monomial by monomial, I_N is assembled from them, and the Racah lines come
from the transcribed coefficient list in ``zernike_hn.racah``.

    python3 tools/make_goldens.py [--check]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from zernike_hn.phasepoly import PhasePolynomial, gamma
from zernike_hn.racah import table2_reference
from zernike_hn.tables import TABLE2_MAX, format_table1, format_table2, golden_name

OUT = Path(__file__).resolve().parent.parent / "src" / "zernike_hn" / "goldens"

# TABLE1[N][j] lists (coeff, a, b) for coeff * q1^a q2^b in Q^(N-j, j)
TABLE1 = {
    1: [[(1, 0, 1)]],
    2: [[(1, 2, 0), (1, 0, 2)]],
    3: [[(1, 0, 3)],
        [(1, 3, 0), (3, 1, 2)],
        [(-1, 0, 3)]],
    4: [[(-1, 4, 0), (1, 0, 4)],
        [(4, 3, 1), (4, 1, 3)],
        [(1, 4, 0), (-1, 0, 4)]],
    5: [[(1, 0, 5)],
        [(-1, 5, 0), (5, 1, 4)],
        [(5, 4, 1), (10, 2, 3), (-1, 0, 5)],
        [(1, 5, 0), (-5, 1, 4)],
        [(1, 0, 5)]],
    6: [[(1, 6, 0), (1, 0, 6)],
        [(-6, 5, 1), (6, 1, 5)],
        [(-1, 6, 0), (15, 4, 2), (15, 2, 4), (-1, 0, 6)],
        [(6, 5, 1), (-6, 1, 5)],
        [(1, 6, 0), (1, 0, 6)]],
    7: [[(1, 0, 7)],
        [(1, 7, 0), (7, 1, 6)],
        [(-7, 6, 1), (21, 2, 5), (-1, 0, 7)],
        [(-1, 7, 0), (-7, 1, 6), (21, 5, 2), (35, 3, 4)],
        [(7, 6, 1), (-21, 2, 5), (1, 0, 7)],
        [(1, 7, 0), (7, 1, 6)],
        [(-1, 0, 7)]],
    8: [[(-1, 8, 0), (1, 0, 8)],
        [(8, 7, 1), (8, 1, 7)],
        [(1, 8, 0), (-28, 6, 2), (28, 2, 6), (-1, 0, 8)],
        [(-8, 7, 1), (-8, 1, 7), (56, 5, 3), (56, 3, 5)],
        [(-1, 8, 0), (28, 6, 2), (-28, 2, 6), (1, 0, 8)],
        [(8, 7, 1), (8, 1, 7)],
        [(1, 8, 0), (-1, 0, 8)]],
}

# relation column of the published integrals table
RELATIONS = {
    1: "H1 = I1 + I1'",
    2: "H2 = I2 + I2' - g2*C^2",
    3: "H3 = I3 + I3' - g2*C^2",
    4: "H4 = I4 + I4' - g2*C^2 + g4*C^4",
    5: "H5 = I5 + I5' - g2*C^2 + g4*C^4",
    6: "H6 = I6 + I6' - g2*C^2 + g4*C^4 - g6*C^6",
}


def q_entry(n: int, j: int) -> PhasePolynomial:
    out = PhasePolynomial()
    for c, a, b in TABLE1[n][j]:
        out = out + PhasePolynomial.monomial((a, b, 0, 0), c)
    return out


def integral(order: int) -> PhasePolynomial:
    p1, p2 = PhasePolynomial.var(2), PhasePolynomial.var(3)
    out = p2 * p2
    for n in range(1, order + 1):
        inner = PhasePolynomial()
        for j in range(len(TABLE1[n])):
            inner = inner + p2 ** (n - j) * p1 ** j * q_entry(n, j)
        out = out + gamma(n) * inner
    return out


def render() -> dict:
    files = {}
    for n in TABLE1:
        files[golden_name("1", n)] = format_table1(n, [q_entry(n, j) for j in range(len(TABLE1[n]))])
    for n in range(1, TABLE2_MAX + 1):
        files[golden_name("2", n)] = format_table2(n, integral(n), RELATIONS[n], table2_reference(n))
    return files


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args(argv)
    stale = []
    for name, text in render().items():
        path = OUT / name
        if args.check:
            if not path.exists() or path.read_bytes() != text.encode("utf-8"):
                stale.append(name)
        else:
            OUT.mkdir(parents=True, exist_ok=True)
            path.write_bytes(text.encode("utf-8"))
    if stale:
        print("out of date:", ", ".join(stale), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
