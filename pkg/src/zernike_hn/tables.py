"""Text layout of the Q and integral/Racah tables and the bundled golden files."""

from __future__ import annotations

import difflib
from importlib import resources
from typing import List, Optional, Sequence

from .phasepoly import ParamPolynomial, PhasePolynomial
from .racah import decompose, format_table_lines
from .zernike import ModelSpec, build_i, build_q, phi, relation_text

TABLE1_MAX = 8
TABLE2_MAX = 6


def q_label(n: int, j: int) -> str:
    return f"Q({n - j},{j})"


def format_table1(order: int, qs: Sequence[PhasePolynomial]) -> str:
    """``qs[j]`` is Q^(N-j, j) for j = 0 .. phi(N)."""
    if len(qs) != phi(order) + 1:
        raise ValueError(f"N={order} needs {phi(order) + 1} polynomials, got {len(qs)}")
    lines = [f"# N={order} phi={phi(order)}"]
    lines += [f"{q_label(order, j)} = {q.serialize()}" for j, q in enumerate(qs)]
    return "\n".join(lines) + "\n"


def format_table2(order: int, integral: PhasePolynomial, relation: str,
                  racah: Sequence[ParamPolynomial]) -> str:
    lines = [f"# N={order}", "[I]", integral.serialize(), "[relation]", relation, "[racah]"]
    lines += format_table_lines(racah)
    return "\n".join(lines) + "\n"


def render_table1(order: int) -> str:
    return format_table1(order, [build_q(order, j) for j in range(phi(order) + 1)])


def render_integrals(order: int) -> str:
    return format_table2(order, build_i(ModelSpec(order)), relation_text(order),
                         decompose(ModelSpec(order)).table_coefficients())


def golden_name(kind: str, order: int) -> str:
    return f"table{kind}_N{order}.txt"


def load_golden(kind: str, order: int) -> Optional[str]:
    ref = resources.files("zernike_hn").joinpath("goldens", golden_name(kind, order))
    if not ref.is_file():
        return None
    return ref.read_bytes().decode("utf-8")


def diff(expected: str, actual: str, name: str) -> List[str]:
    return list(difflib.unified_diff(expected.splitlines(), actual.splitlines(),
                                     f"golden/{name}", f"computed/{name}", lineterm=""))


def section(text: str, name: str) -> str:
    """Lines of one ``[name]`` block of a table-2 file, header excluded."""
    out, inside = [], False
    for line in text.splitlines():
        if line.startswith("["):
            inside = line == f"[{name}]"
            continue
        if inside:
            out.append(line)
    return "\n".join(out) + "\n"
