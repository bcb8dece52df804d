"""Text formats: distribution TSV, and JSON for states, programs, sets and verdicts.

Bit strings are most-significant-bit first everywhere. A per-qubit basis matrix
is written row by row as ``[re, im]`` pairs; its columns are the basis vectors
labelled 0 and 1.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .criteria import CriterionVerdict, MbqcSet
from .discord import DiscordVerdict, ZeroDiscordState, dephase
from .errors import ValidationError
from .iqp import IqpCircuit
from .mbqc import (
    MbqcProgram,
    build_graph_state,
    compiled_bases,
    compiled_schedule,
    correction_post,
)
from .schedule import AdaptiveTable, AffinePost, MeasurementStep, Schedule, TablePost
from .statekit import (
    ClassicalDistribution,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    from_bitstring,
    to_bitstring,
)

_ANGLE = re.compile(r"^\s*(-)?\s*(?:(\d+(?:\.\d+)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def angle_value(value, field: str = "angle") -> float:
    """Any real angle: a number, or ``"[-][a*]pi[/b]"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if m:
            sign = -1.0 if m.group(1) else 1.0
            return sign * float(m.group(2) or 1) * math.pi / float(m.group(3) or 1)
        try:
            return float(value)
        except ValueError:
            pass
    raise ValidationError(f"{field}: cannot parse angle {value!r}", field)


# ---------------------------------------------------------------------------
# distributions


def dist_to_tsv(dist: ClassicalDistribution) -> str:
    return "".join(f"{bits}\t{p:.17g}\n" for bits, p in dist.items())


def dist_from_tsv(text: str) -> ClassicalDistribution:
    entries = {}
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected '<bitstring>\\t<probability>'", "distribution")
        bits, value = parts[0].strip(), parts[1].strip()
        width = len(bits) if width is None else width
        if len(bits) != width:
            raise ValidationError(f"line {lineno}: bit string width changes", "distribution")
        try:
            entries[from_bitstring(bits, width, "distribution")] = float(value)
        except ValueError:
            raise ValidationError(f"line {lineno}: bad probability {value!r}", "distribution") from None
    if width is None:
        raise ValidationError("empty distribution file", "distribution")
    return ClassicalDistribution.from_mapping(entries, width)


def dist_to_json(dist: ClassicalDistribution) -> dict:
    return {"num_bits": dist.num_bits, "probabilities": dist.to_mapping()}


def dist_from_json(obj: dict) -> ClassicalDistribution:
    try:
        return ClassicalDistribution.from_mapping(obj["probabilities"], int(obj["num_bits"]))
    except (KeyError, TypeError):
        raise ValidationError("distribution needs num_bits and probabilities", "distribution") from None


def read_distribution(path) -> ClassicalDistribution:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            return dist_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})", "distribution") from None
    return dist_from_tsv(text)


# ---------------------------------------------------------------------------
# bases and states


def _complex_pairs(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def _from_pairs(values, field: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError(f"{field}: expected [re, im] pairs", field) from None
    if arr.shape[-1:] != (2,):
        raise ValidationError(f"{field}: expected [re, im] pairs", field)
    return arr[..., 0] + 1j * arr[..., 1]


def basis_to_json(b: QubitBasis):
    if b.label is not None:
        kind, angle = b.label
        return kind if angle is None else {kind: angle}
    return {"matrix": [_complex_pairs(row) for row in b.matrix]}


def basis_from_json(obj, field: str = "basis") -> QubitBasis:
    if obj == "x":
        return QubitBasis.x()
    if obj in ("computational", "z"):
        return QubitBasis.computational()
    if isinstance(obj, dict) and len(obj) == 1:
        (kind, value), = obj.items()
        makers = {"zx_angle": QubitBasis.zx, "xy_angle": QubitBasis.xy, "yz_angle": QubitBasis.yz}
        if kind in makers:
            return makers[kind](angle_value(value, f"{field}.{kind}"))
        if kind == "matrix":
            return QubitBasis(_from_pairs(value, f"{field}.matrix"))
    raise ValidationError(f"{field}: unknown basis {obj!r}", field)


def product_basis_to_json(basis: LocalProductBasis) -> list:
    return [basis_to_json(b) for b in basis]


def zds_to_json(zd: ZeroDiscordState) -> dict:
    return {
        "basis": [[_complex_pairs(row) for row in b.matrix] for b in zd.basis],
        "table": zd.table.to_mapping(),
    }


def zds_from_json(obj: dict) -> ZeroDiscordState:
    try:
        raw_basis, table = obj["basis"], obj["table"]
    except KeyError as exc:
        raise ValidationError(f"zero-discord state needs field {exc.args[0]!r}", exc.args[0]) from None
    bases = []
    for j, b in enumerate(raw_basis):
        if isinstance(b, list):
            bases.append(QubitBasis(_from_pairs(b, f"basis[{j}]")))
        else:
            bases.append(basis_from_json(b, f"basis[{j}]"))
    return ZeroDiscordState(LocalProductBasis(tuple(bases)), ClassicalDistribution.from_mapping(table, len(bases)))


def state_from_json(obj: dict):
    """PureState, DensityMatrix or ZeroDiscordState from a state document."""
    if "amplitudes" in obj:
        return PureState.from_amplitudes(_from_pairs(obj["amplitudes"], "amplitudes"))
    if "density" in obj:
        rho = _from_pairs(obj["density"], "density")
        return DensityMatrix(int(round(math.log2(rho.shape[0]))), rho)
    if "table" in obj:
        return zds_from_json(obj)
    raise ValidationError("state document needs amplitudes, density, or basis+table", "state")


def state_to_json(state) -> dict:
    if isinstance(state, PureState):
        return {"amplitudes": _complex_pairs(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"density": [_complex_pairs(row) for row in state.entries]}
    return zds_to_json(state)


def pre_state_from_json(obj, base_dir: Path = Path(".")):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValidationError("pre_state must have exactly one of graph, dephased, product, file", "pre_state")
    (kind, body), = obj.items()
    try:
        return _pre_state(kind, body, base_dir)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"pre_state.{kind}: missing or malformed field {exc}", "pre_state") from None


def _pre_state(kind, body, base_dir: Path):
    if kind == "graph":
        return build_graph_state(body["zset"], int(body["nu"])).state
    if kind == "dephased":
        nu, zset, thetas = int(body["nu"]), body["zset"], body["thetas"]
        if len(thetas) != len(zset):
            raise ValidationError("dephased: one theta per z required", "thetas")
        gs = build_graph_state(zset, nu)
        angles = [angle_value(t, "thetas") for t in thetas]
        circuit = IqpCircuit(1, nu, tuple(zip(gs.zset, angles)))
        return dephase(gs.state, compiled_bases(circuit, body.get("plane", "zx")))
    if kind == "product":
        bits = str(body)
        return PureState.basis_state(from_bitstring(bits, field="product"), len(bits))
    if kind == "file":
        path = Path(body)
        path = path if path.is_absolute() else base_dir / path
        return state_from_json(json.loads(path.read_text()))
    raise ValidationError(f"unknown pre_state kind {kind!r}", "pre_state")


# ---------------------------------------------------------------------------
# schedules, post-processing, programs, sets


def schedule_to_json(schedule: Schedule) -> list:
    out = []
    for step in schedule.steps:
        if step.rule is None:
            out.append({"qubit": step.qubit, "basis": basis_to_json(step.basis)})
        elif isinstance(step.rule, AdaptiveTable):
            table = {k: basis_to_json(b) for k, b in step.rule.table.items()}
            out.append({"qubit": step.qubit, "adaptive": table})
        else:
            raise ValidationError("only table-driven adaptive rules can be written to a file", "schedule")
    return out


def schedule_from_json(steps) -> Schedule:
    if not isinstance(steps, list):
        raise ValidationError("schedule must be an array", "schedule")
    parsed = []
    for k, s in enumerate(steps):
        if not isinstance(s, dict) or "qubit" not in s:
            raise ValidationError(f"schedule[{k}] needs a qubit", "schedule")
        if "adaptive" in s:
            table = {key: basis_from_json(b, f"schedule[{k}].adaptive") for key, b in s["adaptive"].items()}
            parsed.append(MeasurementStep(int(s["qubit"]), rule=AdaptiveTable(table)))
        elif "basis" in s:
            parsed.append(MeasurementStep(int(s["qubit"]), basis_from_json(s["basis"], f"schedule[{k}].basis")))
        else:
            raise ValidationError(f"schedule[{k}] needs basis or adaptive", "schedule")
    return Schedule(tuple(parsed))


def post_to_json(post) -> dict:
    if isinstance(post, AffinePost):
        return {
            "affine": [to_bitstring(m, post.num_inputs) for m in post.masks],
            "offset": to_bitstring(post.offset, post.num_outputs),
        }
    return {
        "table": {to_bitstring(y, post.num_inputs): to_bitstring(int(m), post.num_outputs) for y, m in enumerate(post.table)}
    }


def post_from_json(obj, num_inputs: int):
    if isinstance(obj, dict) and "affine" in obj:
        masks = [from_bitstring(m, num_inputs, "post.affine") for m in obj["affine"]]
        offset = obj.get("offset", "")
        offset = from_bitstring(offset, len(masks), "post.offset") if offset else 0
        return AffinePost(num_inputs, tuple(masks), offset)
    if isinstance(obj, dict) and "table" in obj:
        entries = obj["table"]
        widths = {len(v) for v in entries.values()}
        if len(widths) != 1:
            raise ValidationError("lookup table outputs must share one width", "post.table")
        k = widths.pop()
        table = np.full(2**num_inputs, -1, dtype=np.int64)
        for y, m in entries.items():
            table[from_bitstring(y, num_inputs, "post.table")] = from_bitstring(m, k, "post.table")
        if (table < 0).any():
            raise ValidationError("lookup table must cover every transcript", "post.table")
        return TablePost(num_inputs, k, table)
    raise ValidationError("post must be {affine: masks} or {table: entries}", "post")


def program_from_json(obj: dict, base_dir: Path = Path(".")) -> MbqcProgram:
    for key in ("pre_state", "schedule", "post"):
        if key not in obj:
            raise ValidationError(f"program needs field {key!r}", key)
    pre = pre_state_from_json(obj["pre_state"], base_dir)
    schedule = schedule_from_json(obj["schedule"])
    post = post_from_json(obj["post"], pre.num_qubits)
    return MbqcProgram(pre, schedule, post, int(obj.get("num_outputs", post.num_outputs)))


def compiled_program_json(circuit: IqpCircuit, plane: str = "zx") -> dict:
    return {
        "pre_state": {"graph": {"nu": circuit.nu, "zset": [to_bitstring(z, circuit.nu) for z in circuit.zset]}},
        "schedule": schedule_to_json(compiled_schedule(circuit, plane)),
        "post": post_to_json(correction_post(circuit)),
        "num_outputs": circuit.nu,
    }


def set_from_json(obj: dict, base_dir: Path = Path(".")) -> MbqcSet:
    if "pre_state" not in obj or "members" not in obj:
        raise ValidationError("set needs pre_state and members", "members")
    pre = pre_state_from_json(obj["pre_state"], base_dir)
    members = []
    for i, m in enumerate(obj["members"]):
        if "schedule" not in m or "post" not in m:
            raise ValidationError(f"members[{i}] needs schedule and post", "members")
        members.append((schedule_from_json(m["schedule"]), post_from_json(m["post"], pre.num_qubits)))
    return MbqcSet(pre, tuple(members))


def _jsonable(value):
    if isinstance(value, LocalProductBasis):
        return product_basis_to_json(value)
    if isinstance(value, QubitBasis):
        return basis_to_json(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def verdict_to_json(verdict) -> dict:
    if isinstance(verdict, CriterionVerdict):
        return {"status": verdict.status, "evidence": _jsonable(verdict.evidence)}
    if isinstance(verdict, DiscordVerdict):
        out = {"status": verdict.status, "reason": verdict.reason, "witness": _jsonable(verdict.witness)}
        if verdict.basis is not None:
            out["basis"] = product_basis_to_json(verdict.basis)
        return out
    raise TypeError(f"not a verdict: {verdict!r}")


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"
