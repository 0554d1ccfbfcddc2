import io
import subprocess
import sys

import pytest

from twistperm.cli import main

R3 = "sperm n=1 pi=[1] tails=[P(3:120)] M=[0] corr=fperm n=1 cycles=()"
H2 = "sperm n=2 pi=[1,2] tails=[T(+1),T(-1)] M=[0,1] corr=fperm n=2 cycles=()"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_analyze_block_rotation():
    code, text = run("analyze", R3)
    assert code == 0
    assert text.splitlines()[0] == "eta(3)=inf, eta_inf=0, order=3"


def test_analyze_reads_at_file(tmp_path):
    f = tmp_path / "h2.txt"
    f.write_text(H2 + "\n")
    code, text = run("analyze", f"@{f}")
    assert code == 0 and text.startswith("eta_inf=1, order=inf")


def test_compose_prints_normal_form():
    code, text = run("compose", H2, H2)
    assert code == 0
    assert text == (
        "sperm n=2 pi=[1,2] tails=[T(+2),T(-2)] M=[0,2] corr=fperm n=2 cycles=((2,1) (2,2))\n")


def test_witness_then_verify(tmp_path):
    cert = tmp_path / "c.txt"
    assert run("witness", H2, "--count", "5", "-o", str(cert))[0] == 0
    text = cert.read_text()
    assert "strategy: case_a" in text
    values = [int(line.split("value=")[1].split()[0])
              for line in text.splitlines() if line.startswith("witness")]
    assert values == sorted(set(values)) and len(values) == 5
    code, out = run("verify", str(cert))
    assert code == 0 and out.startswith("verified")


def test_verify_rejects_duplicate_witness(tmp_path):
    cert = tmp_path / "c.txt"
    run("witness", R3, "--count", "3", "-o", str(cert))
    lines = cert.read_text().splitlines()
    lines[-1] = "witness 3: " + lines[-2].split(": ", 1)[1]
    cert.write_text("\n".join(lines) + "\n")
    code, out = run("verify", str(cert))
    assert code == 1 and "refuted" in out


def test_output_is_byte_deterministic():
    assert run("witness", R3, "--count", "4") == run("witness", R3, "--count", "4")
    assert run("oracle", "--m", "4") == run("oracle", "--m", "4")


def test_oracle_table():
    code, text = run("oracle", "--m", "4")
    assert code == 0
    assert text.splitlines()[1].split("|")[2].strip() == "5"
    code, text = run("oracle", "--m", "3", "--rho", "2,1,3", "--alt", "--format", "tsv")
    assert code == 0 and "A_3" in text and "\t" in text


def test_parse_error_exit_code(capsys):
    code, _ = run("analyze", "sperm n=1 pi=[1] tails=[P(3:12x)] M=[0] corr=fperm n=1 cycles=()")
    assert code == 2
    assert "column 25" in capsys.readouterr().err


def test_hypothesis_violation_exit_code(capsys):
    code, _ = run("witness", R3, "--strategy", "case_a")
    assert code == 3
    assert "eta_inf" in capsys.readouterr().err


def test_unsupported_composition_exit_code():
    bad = "sperm n=2 pi=[1,2] tails=[P(2:10),T(0)] M=[0,0] corr=fperm n=2 cycles=()"
    assert run("compose", bad, H2)[0] == 3


def test_oracle_cap_and_bad_rho():
    assert run("oracle", "--m", "9")[0] == 3
    assert run("oracle", "--m", "3", "--rho", "1,1,2")[0] == 2


def test_rfbuild(tmp_path):
    fam = tmp_path / "q.txt"
    fam.write_text("q=2 gen1=2,1\nq=4 gen1=2,3,4,1\n")
    code, text = run("rfbuild", str(fam))
    assert code == 0
    assert "gen1: 2,1,4,5,6,3" in text and text.endswith("all orbits finite: yes\n")
    fam.write_text("q=2 gen1=2,1,3\n")
    assert run("rfbuild", str(fam))[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "twistperm.cli", "analyze", R3],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eta(3)=inf, eta_inf=0, order=3")
