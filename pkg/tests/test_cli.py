import configparser
import math
import subprocess
import sys

import pytest

from gadgetc.cli import main
from gadgetc.pauli import ZZXX, canonicalize, parse_hamiltonian, read_hamiltonian, validate_interaction_set


@pytest.fixture
def files(tmp_path):
    (tmp_path / "target.ham").write_text("# qubits 2\n1.0 ZX\n0.5 XI\n")
    (tmp_path / "native.ham").write_text("# qubits 2\n1.0 ZZ\n0.5 XI\n")
    (tmp_path / "yy.ham").write_text("# qubits 2\n0.3 YY\n")
    (tmp_path / "hi.ham").write_text("# qubits 1\n-1 X\n")
    (tmp_path / "hf.ham").write_text("# qubits 1\n-1 Z\n")
    (tmp_path / "two.ham").write_text("# qubits 2\n-1 ZZ\n")
    (tmp_path / "x.circ").write_text("qubits 1\nX 1\n")
    (tmp_path / "xx.circ").write_text("qubits 1\nX 1\nX 1\n")
    (tmp_path / "bad.circ").write_text("qubits 1\nX 1\nFOO 2\n")
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def csv_rows(text):
    return [line.split(",") for line in text.splitlines() if line and not line.startswith("#")]


# -- compile / validate ---------------------------------------------------------------

def test_compile_output_validates(files):
    out = files / "out.ham"
    assert run("compile", "--model", "zzxx", "--eps", "0.1", files / "target.ham", "--out", out) == 0
    assert validate_interaction_set(read_hamiltonian(out), ZZXX)
    assert run("validate", "--model", "zzxx", out) == 0
    report = configparser.ConfigParser()
    report.read(str(out) + ".report")
    assert report["compile"]["ancillas"] == "1"
    assert report["gadget 1"]["kind"] == "ZX_FROM_ZZXX"


def test_compile_refuses_yy(files, capsys):
    assert run("compile", files / "yy.ham") == 3
    assert "YY" in capsys.readouterr().err


def test_compile_native_unchanged(files):
    out = files / "out.ham"
    assert run("compile", files / "native.ham", "--out", out) == 0
    assert canonicalize(read_hamiltonian(out)) == canonicalize(read_hamiltonian(files / "native.ham"))
    report = configparser.ConfigParser()
    report.read(str(out) + ".report")
    assert report["compile"]["ancillas"] == "0"


def test_compile_circuit_input(files, capsys):
    assert run("compile", files / "x.circ", "--model", "zx", "--eps", "0.1", "--report", files / "r.ini") == 0
    text = capsys.readouterr().out
    assert "history Hamiltonian n=1 T=1" in text
    op = parse_hamiltonian(text)
    assert op.n >= 2


def test_validate_reports_violation(files, capsys):
    assert run("validate", "--model", "zzxx", files / "target.ham") == 3
    assert "ZX" in capsys.readouterr().out


def test_parse_error_exit(files):
    (files / "broken.ham").write_text("1.0 ZQ\n")
    assert run("validate", files / "broken.ham") == 2
    assert run("validate", files / "missing.ham") == 2


def test_compile_deterministic(files):
    a, b = files / "a.ham", files / "b.ham"
    run("compile", files / "target.ham", "--out", a, "--seed", "3")
    run("compile", files / "target.ham", "--out", b, "--seed", "3")
    assert a.read_bytes() == b.read_bytes()
    assert "seed=3" in a.read_text().splitlines()[0]


# -- history ---------------------------------------------------------------------------

def test_verify_history_passes(files, capsys):
    assert run("verify-history", files / "x.circ", "--x", "0") == 0
    out = capsys.readouterr().out
    fields = dict(line.split(" = ") for line in out.splitlines() if " = " in line)
    assert float(fields["residual"]) <= 1e-12
    assert fields["verdict"] == "pass"


def test_verify_history_clockinit_fails(files, capsys):
    assert run("verify-history", files / "x.circ", "--x", "0", "--include-clockinit") == 1
    out = capsys.readouterr().out
    fields = dict(line.split(" = ") for line in out.splitlines() if " = " in line)
    assert float(fields["residual"]) > 0.1


def test_verify_history_malformed(files):
    assert run("verify-history", files / "bad.circ") == 2


def test_verify_history_oversize(files, monkeypatch):
    monkeypatch.setenv("GADGETC_DENSE_LIMIT", "2")
    assert run("verify-history", files / "xx.circ") == 4


def test_verify_history_random_reproducible(files):
    a, b = files / "a.csv", files / "b.csv"
    assert run("verify-history", "--random", 5, "--seed", 4, "--out", a) == 0
    run("verify-history", "--random", 5, "--seed", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    rows = csv_rows(a.read_text())
    assert rows[0] == ["index", "n", "T", "residual", "overlap", "gap"]
    assert len(rows) == 6


def test_negative_tolerance_rejected(files):
    assert run("verify-history", files / "x.circ", "--tol-residual", "-1") == 2


def test_build_history(files, capsys):
    assert run("build-history", files / "xx.circ", "--x", "1") == 0
    text = capsys.readouterr().out
    assert "n=1 T=2 x=1" in text
    assert parse_hamiltonian(text).n == 3


def test_bad_input_bits(files):
    assert run("build-history", files / "x.circ", "--x", "01") == 2


# -- sweeps ---------------------------------------------------------------------------------

def test_sweep_zzxx_monotone(capsys):
    assert run("sweep-epsilon", "--kind", "zx_from_zzxx", "--eps", "0.2,0.1,0.05") == 0
    out = capsys.readouterr().out
    rows = csv_rows(out)
    assert rows[0] == ["epsilon", "delta", "lambda_target", "lambda_gadget", "abs_error", "overlap"]
    assert len(rows) == 4
    assert "# monotone_error=true" in out


def test_sweep_zz_within_bound(capsys):
    assert run("sweep-epsilon", "--kind", "zz_from_zx", "--eps", "0.1,0.05,0.025") == 0
    for row in csv_rows(capsys.readouterr().out)[1:]:
        assert float(row[4]) <= 10 * float(row[0])


@pytest.mark.parametrize("eps", ["", "0.05,0.1", "0.2,1.5", "a,b"])
def test_sweep_bad_eps(eps):
    assert run("sweep-epsilon", "--kind", "zz_from_zx", "--eps", eps) == 2


def test_sweep_unknown_kind():
    assert run("sweep-epsilon", "--kind", "yy", "--eps", "0.1") == 2


def test_gap_sweep_two_level(files, capsys):
    assert run("gap-sweep", files / "hi.ham", files / "hf.ham") == 0
    rows = csv_rows(capsys.readouterr().out)
    assert rows[0] == ["s", "gap"] and len(rows) == 102
    best = min(rows[1:], key=lambda r: float(r[1]))
    assert float(best[0]) == pytest.approx(0.5)
    assert float(best[1]) == pytest.approx(math.sqrt(2), abs=1e-6)


def test_gap_sweep_constant(files, capsys):
    assert run("gap-sweep", files / "hi.ham", files / "hi.ham", "--grid", 11) == 0
    gaps = {r[1] for r in csv_rows(capsys.readouterr().out)[1:]}
    assert len(gaps) == 1


def test_gap_sweep_mismatch(files):
    assert run("gap-sweep", files / "hi.ham", files / "two.ham") == 3


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "gadgetc", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "gadgetc" in out.stdout
