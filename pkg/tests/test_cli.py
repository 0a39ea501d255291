import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lira.cli import run
from lira.errors import LiraSyntaxError, ValidationError
from lira.workspace import fixture_names, load_fixture, parse_workspace

BASE = """
[ring]
vars = x, y, z

[liealgebra]
rank = 3
anchor.e1 = "1", "0", "0"
anchor.e2 = "0", "1", "0"
anchor.e3 = "0", "0", "1"
"""


# -- workspace format ---------------------------------------------------------------------

def test_all_fixtures_load():
    names = fixture_names()
    for expected in ["ab2", "weyl2", "heis3", "sl2", "torus2", "ab4poly", "sphere"]:
        assert expected in names
    for n in names:
        load_fixture(n)


def test_weyl2_fixture_contents():
    ws = load_fixture("weyl2")
    assert ws.algebra.rank == 2
    assert "one" in ws.cocycles


def test_diagonal_bracket_is_syntax_error():
    text = BASE + 'bracket.e1.e1 = "1", "0", "0"\n'
    with pytest.raises(LiraSyntaxError) as exc:
        parse_workspace(text)
    assert exc.value.line == text.count("\n")


def test_non_cocycle_rejected_with_triple():
    text = BASE + '\n[cocycle.bad]\nf.e1.e2 = "z"\n'
    with pytest.raises(ValidationError) as exc:
        parse_workspace(text)
    assert "(1, 2, 3)" in str(exc.value)


def test_same_text_as_cochain_is_accepted():
    ws = parse_workspace(BASE + '\n[cochain.bad]\nf.e1.e2 = "z"\n')
    assert ws.cochain("bad").degree == 2


def test_expression_errors_are_line_anchored():
    text = BASE + '\n[cocycle.c]\nf.e1.e2 = "x +* y"\n'
    with pytest.raises(LiraSyntaxError) as exc:
        parse_workspace(text)
    assert exc.value.line == text.count("\n")


def test_duplicate_names():
    with pytest.raises(ValidationError):
        parse_workspace(BASE + "\n[cocycle.a]\n\n[cochain.a]\n")


# -- commands ---------------------------------------------------------------------------

def test_vmodule_command():
    status, out, _ = run(["vmodule", "weyl2.lira", "--f", "zero", "--k", "1", "--i", "1", "--audit"])
    assert status == 0
    assert "rank 2" in out and "audit: PASS" in out


def test_vmodule_defect_command():
    status, out, _ = run(["vmodule", "ab2", "--f", "one", "--k", "1", "--i", "1", "--audit"])
    assert status == 1
    assert "pair (2, 1)" in out and "audit: FAIL" in out


def test_cobound_commands():
    status, out, _ = run(["cobound", "torus2.lira", "--cocycle", "one", "--degree", "6"])
    assert status == 1 and "NoSolutionInWindow" in out
    status, out, _ = run(["cobound", "weyl2", "--cocycle", "one", "--degree", "1"])
    assert status == 0 and "rho(e2) = x" in out


def test_validate_command():
    status, out, _ = run(["validate", "weyl2.lira"])
    assert status == 0 and out.rstrip().endswith("PASS")
    status, out, _ = run(["validate", "sphere"])
    assert status == 0 and "idempotent tangent" in out


def test_cohomology_and_homology_commands():
    assert run(["cohomology", "heis3"])[1].startswith("dim H^p: 1, 2, 2, 1")
    assert run(["homology", "sl2"])[1].startswith("dim H_p: 1, 0, 0, 1")
    status, _, err = run(["cohomology", "weyl2"])
    assert status == 2 and "NotFieldCase" in err


def test_env_commands():
    assert run(["env", "ab2", "mul", "e2", "e1", "--f", "one"])[1].strip() == "e1*e2 - 1"
    assert run(["env", "weyl2", "nf", "e1*x*e2", "--f", "one", "--strategy", "leftmost"])[1].strip() == "x*e1*e2 + e2"
    assert run(["env", "weyl2", "symbol", "x*e1*e2 + e2"])[1].strip() == "x*s1*s2"


def test_pbw_command():
    status, out, _ = run(["pbw-check", "ab3z", "--f", "z", "--N", "5"])
    assert status == 1 and "(3, 2, 1)" in out
    status, out, _ = run(["pbw-check", "ab2", "--f", "one", "--N", "6"])
    assert status == 0 and "total dim U_6 = 28" in out


def test_theta_and_adef_commands():
    status, out, _ = run(["theta", "weyl2", "e2", "--f", "one", "--g", "zero", "--h", "h"])
    assert status == 0 and out.strip().endswith("e2 + x")
    status, out, _ = run(["adef-hom", "weyl2", "--f", "one", "--g", "zero", "--degree", "1"])
    assert status == 0 and "witness" in out
    status, out, _ = run(["adef-hom", "torus2", "--f", "one", "--g", "zero", "--degree", "2"])
    assert status == 1


def test_theta_sign_mismatch_exit():
    status, out, _ = run(["theta", "weyl2", "e2", "--f", "zero", "--g", "one", "--h", "h"])
    assert status == 1 and "SignMismatch" in out


def test_chern_and_jet_commands():
    status, out, _ = run(["chern", "ab4poly", "--conn", "g", "--kmax", "2"])
    assert status == 0 and "degree 4: (e1,e2,e3,e4): 1" in out
    status, out, _ = run(["jet", "weyl2", "--conn", "typeone", "--check"])
    assert status == 0 and out.rstrip().endswith("PASS")


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["frobnicate", "weyl2"])[0] == 2
    assert run(["cobound", "weyl2", "--cocycle", "nope", "--degree", "1"])[0] == 2
    assert run(["validate", "/nonexistent/file.lira"])[0] == 2
    assert run(["--help"])[0] == 0


def test_syntax_error_file(tmp_path):
    p = tmp_path / "bad.lira"
    p.write_text(BASE + 'bracket.e2.e1 = "0", "0", "0"\n', encoding="utf-8")
    status, _, err = run(["validate", str(p)])
    assert status == 2 and "syntax error" in err


def test_validation_error_file(tmp_path):
    p = tmp_path / "bad.lira"
    p.write_text(BASE + '\n[cocycle.bad]\nf.e1.e2 = "z"\n', encoding="utf-8")
    status, out, _ = run(["validate", str(p)])
    assert status == 1 and "ValidationError" in out


COMMANDS = [
    ["validate", "sphere"],
    ["cohomology", "heis3"],
    ["env", "weyl2", "mul", "x*e1 + e2", "y*e2^2", "--f", "one"],
    ["pbw-check", "heis3", "--N", "3"],
    ["vmodule", "heis3", "--k", "2", "--i", "2", "--audit"],
    ["chern", "weyl2", "--conn", "diag"],
    ["jet", "weyl2", "--conn", "diag", "--check"],
    ["cobound", "torus2", "--cocycle", "x", "--degree", "2"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=[c[0] for c in COMMANDS])
def test_determinism(argv):
    assert run(argv) == run(argv)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lira.cli", "validate", "weyl2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == run(["validate", "weyl2"])[1]


@given(st.lists(st.sampled_from(["e1", "e2", "x", "y", "2", "1/3"]), min_size=1, max_size=5))
def test_env_round_trip(letters):
    status, out, _ = run(["env", "weyl2", "nf", "*".join(letters), "--f", "one"])
    assert status == 0
    again = run(["env", "weyl2", "nf", out.strip(), "--f", "one"])
    assert again == (0, out, "")
