"""Write the small instance, program and set files under data/."""

import argparse
import json
from pathlib import Path

from mbqclab import fileio
from mbqclab.iqp import IqpCircuit, parse_iqp_instance, simulate_iqp
from mbqclab.mbqc import (
    compile_iqp_to_mbqc,
    compiled_schedule,
    correction_post,
    run_mbqc_exact,
)

INSTANCE = {
    "n": 2,
    "nu": 3,
    "gates": [
        {"z": "001", "theta": "pi/3"},
        {"z": "011", "theta": "pi/8"},
        {"z": "110", "theta": "pi/4"},
    ],
}


def _write(path: Path, obj):
    path.write_text(fileio.dumps(obj))
    print(f"wrote {path}")


def _members(circuit, plane="zx", offsets=("000",)):
    sched = fileio.schedule_to_json(compiled_schedule(circuit, plane))
    post = fileio.post_to_json(correction_post(circuit))
    return [{"schedule": sched, "post": {**post, "offset": off}} for off in offsets]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    _write(out / "instance.json", INSTANCE)
    circuit = parse_iqp_instance(json.dumps(INSTANCE))
    _write(out / "program.json", fileio.compiled_program_json(circuit))
    (out / "dist_a.tsv").write_text(fileio.dist_to_tsv(simulate_iqp(circuit, 0)))
    (out / "dist_b.tsv").write_text(fileio.dist_to_tsv(run_mbqc_exact(compile_iqp_to_mbqc(circuit))[1]))
    print(f"wrote {out / 'dist_a.tsv'} and {out / 'dist_b.tsv'}")

    zset = [g["z"] for g in INSTANCE["gates"]]
    graph = {"nu": circuit.nu, "zset": zset}
    other = IqpCircuit(circuit.n, circuit.nu, tuple(zip(circuit.zset, (0.3, 1.1, 0.7))))
    _write(
        out / "set_graph.json",
        {"pre_state": {"graph": graph}, "members": _members(circuit) + _members(other)},
    )
    thetas = [g["theta"] for g in INSTANCE["gates"]]
    _write(
        out / "set_dephased.json",
        {
            "pre_state": {"dephased": {**graph, "thetas": thetas}},
            "members": _members(circuit, offsets=("000", "001", "010", "011")),
        },
    )
    computational = [{"qubit": q, "basis": "computational"} for q in range(3)]
    plus = [{"qubit": q, "basis": "x"} for q in range(3)]
    identity = {"affine": ["001", "010", "100"]}
    _write(
        out / "set_point_mass.json",
        {"pre_state": {"product": "101"}, "members": [{"schedule": computational, "post": identity}]},
    )
    _write(
        out / "set_flexible.json",
        {
            "pre_state": {"product": "101"},
            "members": [{"schedule": computational, "post": identity}, {"schedule": plus, "post": identity}],
        },
    )


if __name__ == "__main__":
    main()
