"""Deciding when a set of MBQCs is only superficially measurement-based.

Each checker is a sufficient test. A firing verdict carries evidence that
:func:`reverify` can check independently. ``NOT_SHOWN_SUPERFICIAL`` means no
checker fired; it does not assert that the set is inherently measurement-based.

Readings used here:

* Criterion 1 fires when every member's transcript is the same deterministic
  string across the whole set.
* Criterion 2 fires when no member is adaptive and all members measure each
  qubit in the same basis (no flexible measurements); replay of the stored
  string is then checked against quantum execution.
* Criterion 3 fires when the pre-measurement state has zero discord and the
  per-bit classical replacement reproduces every member's output distribution.
  Basis choices that depend on earlier outcomes are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .discord import (
    INCONCLUSIVE as DISCORD_INCONCLUSIVE,
)
from .discord import (
    ZeroDiscordState,
    classical_replacement_exact,
    dephase,
    is_zero_discord,
    pure_state_zero_discord,
)
from .errors import CapError, ValidationError
from .iqp import IqpCircuit
from .mbqc import (
    MbqcProgram,
    build_graph_state,
    compile_iqp_to_mbqc,
    dephased_program,
    run_mbqc_exact,
    transcript_distribution,
)
from .schedule import PostProcess, Schedule, identity_post, pushforward
from .statekit import (
    TOL,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    to_bitstring,
    tvd,
)

SUPERFICIAL_BY_C1 = "SUPERFICIAL_BY_C1"
SUPERFICIAL_BY_C2 = "SUPERFICIAL_BY_C2"
SUPERFICIAL_BY_C3 = "SUPERFICIAL_BY_C3"
NOT_SHOWN_SUPERFICIAL = "NOT_SHOWN_SUPERFICIAL"
INCONCLUSIVE = "INCONCLUSIVE"

FIRING = (SUPERFICIAL_BY_C1, SUPERFICIAL_BY_C2, SUPERFICIAL_BY_C3)


@dataclass(frozen=True, eq=False)
class MbqcSet:
    pre_state: PureState | DensityMatrix | ZeroDiscordState
    members: tuple[tuple[Schedule, PostProcess], ...]

    def __post_init__(self):
        members = tuple((s, p) for s, p in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValidationError("a set of MBQCs needs at least one member", "members")
        r = self.pre_state.num_qubits
        for i, (sched, post) in enumerate(members):
            if sched.num_qubits != r or post.num_inputs != r:
                raise ValidationError(f"members[{i}] does not address {r} qubits", "members")

    @property
    def num_qubits(self) -> int:
        return self.pre_state.num_qubits

    def program(self, i: int) -> MbqcProgram:
        sched, post = self.members[i]
        return MbqcProgram(self.pre_state, sched, post, post.num_outputs)


@dataclass(frozen=True)
class CriterionVerdict:
    status: str
    evidence: dict = field(default_factory=dict)

    @property
    def fired(self) -> bool:
        return self.status in FIRING


def _outputs(s: MbqcSet):
    return [run_mbqc_exact(s.program(i)) for i in range(len(s.members))]


def check_criterion1(s: MbqcSet) -> CriterionVerdict:
    try:
        runs = _outputs(s)
    except CapError as exc:
        return CriterionVerdict(INCONCLUSIVE, {"criterion": 1, "reason": str(exc)})
    points = []
    for i, (transcripts, _) in enumerate(runs):
        y = transcripts.point()
        if y is None:
            return CriterionVerdict(
                NOT_SHOWN_SUPERFICIAL,
                {"criterion": 1, "reason": f"member {i} has a non-deterministic transcript"},
            )
        points.append(y)
    if len(set(points)) > 1:
        return CriterionVerdict(
            NOT_SHOWN_SUPERFICIAL,
            {
                "criterion": 1,
                "reason": "members yield different deterministic strings",
                "strings": [to_bitstring(y, s.num_qubits) for y in points],
            },
        )
    return CriterionVerdict(
        SUPERFICIAL_BY_C1,
        {
            "criterion": 1,
            "m": to_bitstring(points[0], s.num_qubits),
            "reading": "one deterministic string across the whole set",
        },
    )


def _first_basis_difference(a: LocalProductBasis, b: LocalProductBasis) -> int | None:
    for q, (x, y) in enumerate(zip(a, b)):
        if not x.equivalent(y, TOL):
            return q
    return None


def check_criterion2(s: MbqcSet) -> CriterionVerdict:
    for i, (sched, _) in enumerate(s.members):
        if sched.adaptive:
            return CriterionVerdict(
                NOT_SHOWN_SUPERFICIAL, {"criterion": 2, "reason": f"member {i} is adaptive"}
            )
    common = s.members[0][0].fixed_basis()
    for i, (sched, _) in enumerate(s.members[1:], start=1):
        q = _first_basis_difference(common, sched.fixed_basis())
        if q is not None:
            return CriterionVerdict(
                NOT_SHOWN_SUPERFICIAL,
                {
                    "criterion": 2,
                    "reason": "flexible measurements: bases differ between members",
                    "members": [0, i],
                    "qubit": q,
                },
            )
    try:
        distances = _replay_distances(s, common)
    except CapError as exc:
        return CriterionVerdict(INCONCLUSIVE, {"criterion": 2, "reason": str(exc)})
    if max(distances) >= 1e-9:
        return CriterionVerdict(
            NOT_SHOWN_SUPERFICIAL,
            {"criterion": 2, "reason": "replay validation failed", "member_tvd": distances},
        )
    return CriterionVerdict(
        SUPERFICIAL_BY_C2, {"criterion": 2, "basis": common, "member_tvd": distances}
    )


def _replay_distances(s: MbqcSet, basis: LocalProductBasis) -> list[float]:
    """Measure once in ``basis``, replay each member's post-processing on the stored string."""
    stored = transcript_distribution(s.pre_state, Schedule.fixed(basis))
    return [
        tvd(pushforward(stored, post), out)
        for (_, post), (_, out) in zip(s.members, _outputs(s))
    ]


def _zero_discord_form(pre_state):
    """(ZeroDiscordState or None, detector verdict or None)."""
    if isinstance(pre_state, ZeroDiscordState):
        return pre_state, None
    if isinstance(pre_state, PureState):
        verdict = pure_state_zero_discord(pre_state)
    else:
        verdict = is_zero_discord(pre_state)
    if verdict.basis is None:
        return None, verdict
    return dephase(pre_state, verdict.basis), verdict


def _replacement_distances(s: MbqcSet, zd: ZeroDiscordState) -> list[float]:
    return [
        tvd(classical_replacement_exact(zd, sched, post)[1], out)
        for (sched, post), (_, out) in zip(s.members, _outputs(s))
    ]


def check_criterion3(s: MbqcSet) -> CriterionVerdict:
    try:
        zd, verdict = _zero_discord_form(s.pre_state)
        if zd is None:
            status = INCONCLUSIVE if verdict.status == DISCORD_INCONCLUSIVE else NOT_SHOWN_SUPERFICIAL
            return CriterionVerdict(
                status,
                {"criterion": 3, "discord": verdict.status, "reason": verdict.reason, "witness": verdict.witness},
            )
        distances = _replacement_distances(s, zd)
    except CapError as exc:
        return CriterionVerdict(INCONCLUSIVE, {"criterion": 3, "reason": str(exc)})
    if max(distances) >= 1e-9:
        return CriterionVerdict(
            NOT_SHOWN_SUPERFICIAL,
            {"criterion": 3, "reason": "classical replacement does not reproduce a member", "member_tvd": distances},
        )
    return CriterionVerdict(
        SUPERFICIAL_BY_C3, {"criterion": 3, "basis": zd.basis, "member_tvd": distances}
    )


def classify_set(s: MbqcSet) -> CriterionVerdict:
    """Run criteria 1, 2, 3 in order; the first firing verdict wins."""
    checks = [check_criterion1(s), check_criterion2(s), check_criterion3(s)]
    summary = {f"C{i + 1}": v.status for i, v in enumerate(checks)}
    for v in checks:
        if v.fired:
            return CriterionVerdict(v.status, {**v.evidence, "checks": summary})
    if any(v.status == INCONCLUSIVE for v in checks):
        return CriterionVerdict(INCONCLUSIVE, {"checks": summary, "details": [v.evidence for v in checks]})
    return CriterionVerdict(NOT_SHOWN_SUPERFICIAL, {"checks": summary, "details": [v.evidence for v in checks]})


def reverify(s: MbqcSet, verdict: CriterionVerdict) -> bool:
    """Check a firing verdict's evidence from scratch."""
    ev = verdict.evidence
    if verdict.status == SUPERFICIAL_BY_C1:
        target = ev["m"]
        return all(t[target] >= 1 - TOL for t, _ in _outputs(s))
    if verdict.status == SUPERFICIAL_BY_C2:
        basis = ev["basis"]
        if any(_first_basis_difference(basis, sched.fixed_basis()) is not None for sched, _ in s.members):
            return False
        return max(_replay_distances(s, basis)) < 1e-9
    if verdict.status == SUPERFICIAL_BY_C3:
        zd = dephase(s.pre_state, ev["basis"]) if not isinstance(s.pre_state, ZeroDiscordState) else s.pre_state
        if not isinstance(s.pre_state, ZeroDiscordState) and s.num_qubits <= 11:
            rho = s.pre_state.density_matrix() if isinstance(s.pre_state, PureState) else s.pre_state
            if not _close_dm(rho, zd.densify()):
                return False
        return max(_replacement_distances(s, zd)) < 1e-9
    return False


def _close_dm(a: DensityMatrix, b: DensityMatrix) -> bool:
    return float(abs(a.entries - b.entries).max()) < 1e-9


# ---------------------------------------------------------------------------
# reference sets


def graph_state_set(zset: Sequence, nu: int, theta_sets: Sequence[Sequence[float]], plane: str = "zx") -> MbqcSet:
    """One graph state supporting f_Theta for several angle choices Theta."""
    gs = build_graph_state(zset, nu)
    members = []
    for thetas in theta_sets:
        prog = compile_iqp_to_mbqc(IqpCircuit(1, nu, tuple(zip(gs.zset, thetas))), plane)
        members.append((prog.schedule, prog.post))
    return MbqcSet(gs.state, tuple(members))


def dephased_iqp_set(circuit: IqpCircuit, inputs: Sequence = (0,), plane: str = "zx") -> MbqcSet:
    """The dephased state rho_{Z,Theta} with the compiled schedule; one member per input x."""
    prog = dephased_program(circuit, plane)
    members = [(prog.schedule, prog.post.with_offset(circuit.input(x).padded)) for x in inputs]
    return MbqcSet(prog.pre_state, tuple(members))


def point_mass_set(bits: str, bases: Sequence[QubitBasis] | None = None) -> MbqcSet:
    """|m><m| measured by members that each use a single basis on every qubit."""
    r = len(bits)
    state = PureState.basis_state(int(bits, 2), r)
    bases = [QubitBasis.computational()] if bases is None else list(bases)
    members = [(Schedule.fixed(LocalProductBasis(tuple(b for _ in range(r)))), identity_post(r)) for b in bases]
    return MbqcSet(state, tuple(members))
