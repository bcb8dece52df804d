import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mbqclab import fileio
from mbqclab.cli import main
from mbqclab.iqp import parse_iqp_instance, simulate_iqp

DATA = Path(__file__).resolve().parent.parent / "data"
INSTANCE = {"n": 1, "nu": 1, "gates": [{"z": "1", "theta": "pi/3"}]}


@pytest.fixture
def inst(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(INSTANCE))
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_iqp_dist_writes_tsv(inst, tmp_path, capsys):
    out = tmp_path / "dist.tsv"
    code, _, _ = run(["iqp-dist", "--in", inst, "--x", "0", "--out", out], capsys)
    assert code == 0
    assert np.allclose(fileio.dist_from_tsv(out.read_text()).probabilities, [0.25, 0.75])


def test_iqp_dist_json(inst, capsys):
    code, out, _ = run(["iqp-dist", "--in", inst, "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["probabilities"]["1"] == pytest.approx(0.75)


def test_compile_run_compare(inst, tmp_path, capsys):
    prog = tmp_path / "prog.json"
    assert run(["mbqc-compile", "--in", inst, "--out", prog], capsys)[0] == 0
    assert run(["mbqc-run", "--in", prog, "--out", tmp_path / "b.tsv"], capsys)[0] == 0
    assert run(["iqp-dist", "--in", inst, "--out", tmp_path / "a.tsv"], capsys)[0] == 0
    code, out, _ = run(["compare", tmp_path / "a.tsv", tmp_path / "b.tsv"], capsys)
    assert code == 0 and float(out) < 1e-9
    (tmp_path / "c.tsv").write_text("0\t1\n")
    code, out, _ = run(["compare", tmp_path / "a.tsv", tmp_path / "c.tsv"], capsys)
    assert code == 1 and float(out) == pytest.approx(0.75)


def test_mbqc_run_samples(inst, tmp_path, capsys):
    prog = tmp_path / "prog.json"
    run(["mbqc-compile", "--in", inst, "--out", prog], capsys)
    code, out, _ = run(["mbqc-run", "--in", prog, "--samples", "4", "--seed", "3"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 4
    assert all(len(line.split("\t")[0]) == 2 and len(line.split("\t")[1]) == 1 for line in lines)
    code, out, _ = run(["mbqc-run", "--in", prog, "--transcripts"], capsys)
    assert code == 0 and all(len(line.split("\t")[0]) == 2 for line in out.splitlines())


def test_iqp_sample(inst, capsys):
    code, out, _ = run(["iqp-sample", "--in", inst, "--samples", "5", "--seed", "1"], capsys)
    assert code == 0 and len(out.split()) == 5 and set(out.split()) <= {"0", "1"}


def test_dephase_and_discord_check(inst, tmp_path, capsys):
    zd = tmp_path / "zd.json"
    assert run(["dephase", "--in", inst, "--x", "0", "--out", zd], capsys)[0] == 0
    doc = json.loads(zd.read_text())
    assert doc["table"] == pytest.approx({"0": 0.25, "1": 0.75})
    code, out, _ = run(["discord-check", "--in", zd], capsys)
    assert code == 0 and json.loads(out)["status"] == "ZERO_DISCORD"
    prog = tmp_path / "prog.json"
    run(["mbqc-compile", "--in", inst, "--out", prog], capsys)
    code, out, _ = run(["discord-check", "--in", prog], capsys)
    assert json.loads(out)["status"] == "DISCORDANT"
    code, out, _ = run(["dephase", "--in", prog], capsys)
    assert code == 0 and len(json.loads(out)["basis"]) == 2


@pytest.mark.parametrize(
    "name, status",
    [
        ("set_dephased", "SUPERFICIAL_BY_C2"),
        ("set_graph", "NOT_SHOWN_SUPERFICIAL"),
        ("set_point_mass", "SUPERFICIAL_BY_C1"),
        ("set_flexible", "SUPERFICIAL_BY_C3"),
    ],
)
def test_criteria_check(name, status, capsys):
    code, out, _ = run(["criteria-check", "--set", DATA / f"{name}.json"], capsys)
    assert code == 0 and json.loads(out)["status"] == status


def test_criteria_check_report(capsys):
    code, out, _ = run(["criteria-check", "--set", DATA / "set_dephased.json", "--format", "table"], capsys)
    assert code == 0 and out.startswith("status: SUPERFICIAL_BY_C2")


def test_shor_demo(capsys):
    code, out, _ = run(["shor-demo", "--seed", "2", "--format", "json", "--classify"], capsys)
    doc = json.loads(out)
    assert code == 0 and sorted(doc["factors"]) == [3, 5] and doc["criteria"] == "SUPERFICIAL_BY_C2"
    code, out, _ = run(["shor-demo", "--modulus", "21", "--base", "5"], capsys)
    assert code == 0 and "factors: None" in out


def test_exit_codes(inst, tmp_path, capsys):
    code, _, err = run(["transmogrify"], capsys)
    assert code == 64 and "usage" in err
    assert run([], capsys)[0] == 64
    code, _, err = run(["iqp-dist", "--in", inst, "--x", "11"], capsys)
    assert code == 2 and "x" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "nu": 2, "gates": [{"z": "1", "theta": 1}]}')
    code, _, err = run(["iqp-dist", "--in", bad], capsys)
    assert code == 2 and "z length mismatch" in err
    bad.write_text("{not json")
    assert run(["mbqc-run", "--in", bad], capsys)[0] == 2
    assert run(["iqp-dist", "--in", tmp_path / "missing.json"], capsys)[0] == 2
    assert run(["shor-demo", "--modulus", "14"], capsys)[0] == 2
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"n": 1, "nu": 25, "gates": []}))
    code, _, err = run(["iqp-dist", "--in", big], capsys)
    assert code == 3 and "cap" in err
    assert run(["shor-demo", "--modulus", "513", "--base", "2"], capsys)[0] == 3


def test_distribution_output_round_trips(inst, tmp_path, capsys):
    out = tmp_path / "d.tsv"
    run(["iqp-dist", "--in", DATA / "instance.json", "--x", "10", "--out", out], capsys)
    circuit = parse_iqp_instance((DATA / "instance.json").read_text())
    ref = simulate_iqp(circuit, "10").probabilities
    assert np.abs(fileio.read_distribution(out).probabilities - ref).max() < 1e-12


def test_module_entry_point(inst):
    res = subprocess.run(
        [sys.executable, "-m", "mbqclab", "iqp-dist", "--in", str(inst)], capture_output=True, text=True, check=True
    )
    assert np.allclose(fileio.dist_from_tsv(res.stdout).probabilities, [0.25, 0.75])
