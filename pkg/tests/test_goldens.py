import subprocess
import sys
from pathlib import Path

import pytest

from zernike_hn.tables import load_golden, render_integrals, render_table1, section

ROOT = Path(__file__).resolve().parent.parent


@pytest.mark.parametrize("n", range(1, 9))
def test_table1_byte_exact(n):
    assert render_table1(n).encode("utf-8") == load_golden("1", n).encode("utf-8")


@pytest.mark.parametrize("n", range(1, 7))
def test_table2_byte_exact(n):
    assert render_integrals(n) == load_golden("2", n)


def test_goldens_end_with_lf_only():
    for n in range(1, 9):
        text = load_golden("1", n)
        assert "\r" not in text and text.endswith("\n")


def test_no_golden_beyond_tables():
    assert load_golden("1", 9) is None
    assert load_golden("2", 7) is None


def test_golden_sections():
    text = load_golden("2", 2)
    assert section(text, "relation") == "H2 = I2 + I2' - g2*C^2\n"
    assert section(text, "racah") == "L1: -1 * g1^2 - 2 * g2 H\n(2L1)^3: -1 * g2^2\n"


def test_goldens_match_transcription():
    # the bundled files are exactly what the hand transcription produces
    proc = subprocess.run([sys.executable, str(ROOT / "tools" / "make_goldens.py"), "--check"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
