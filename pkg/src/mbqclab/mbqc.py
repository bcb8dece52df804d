"""Graph states, IQP*-to-MBQC compilation and MBQC execution.

Qubit layout of a graph state for (nu, Z): computational qubits c_j at indices
0..nu-1, ancilla q_z for the k-th entry of Z at index nu + k. The ancilla q_z is
joined by a CZ edge to each c_j with z_j = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .discord import ZeroDiscordState, dephase
from .errors import CapError, ValidationError
from .iqp import IqpCircuit, simulate_iqp
from .schedule import (
    AffinePost,
    MbqcOutcome,
    PostProcess,
    Schedule,
    pushforward,
)
from .statekit import (
    MAX_DENSE_QUBITS,
    MAX_PURE_QUBITS,
    ClassicalDistribution,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    apply_cz,
    density_distribution,
    exact_distribution,
    from_bitstring,
    init_plus_state,
    make_rng,
    measure_qubit,
    product_state,
    tvd,
)

ANCILLA_PLANES = {"zx": QubitBasis.zx, "yz": QubitBasis.yz}
PRUNE = 1e-30


@dataclass(frozen=True, eq=False)
class GraphState:
    nu: int
    zset: tuple[int, ...]
    state: PureState

    @property
    def num_qubits(self) -> int:
        return self.nu + len(self.zset)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(self.nu + k, j) for k, z in enumerate(self.zset) for j in range(self.nu) if (z >> j) & 1]


def _coerce_zset(zset, nu: int) -> tuple[int, ...]:
    out = []
    for k, z in enumerate(zset):
        if isinstance(z, str):
            z = from_bitstring(z, nu, f"zset[{k}]")
        if not 0 <= int(z) < 2**nu:
            raise ValidationError(f"zset[{k}]: z length mismatch for nu={nu}", "zset")
        if int(z) in out:
            raise ValidationError(f"zset[{k}]: Z must be a set", "zset")
        out.append(int(z))
    return tuple(out)


def build_graph_state(zset: Sequence, nu: int) -> GraphState:
    zset = _coerce_zset(zset, nu)
    r = nu + len(zset)
    if r > MAX_PURE_QUBITS:
        raise CapError(f"qubit cap exceeded: r = nu + |Z| = {r} > {MAX_PURE_QUBITS}")
    idx = np.arange(2**r)
    c = idx & (2**nu - 1)
    flips = np.zeros(2**r, dtype=np.int64)
    for k, z in enumerate(zset):
        flips += ((idx >> (nu + k)) & 1) * np.bitwise_count(c & z)
    amps = np.where(flips & 1, -1.0, 1.0) * 2 ** (-r / 2)
    return GraphState(nu, zset, PureState(r, amps.astype(np.complex128)))


def build_graph_state_by_gates(zset: Sequence, nu: int) -> PureState:
    """Same state as :func:`build_graph_state`, built edge by edge with CZ gates."""
    zset = _coerce_zset(zset, nu)
    state = init_plus_state(nu + len(zset))
    for k, z in enumerate(zset):
        for j in range(nu):
            if (z >> j) & 1:
                state = apply_cz(state, nu + k, j)
    return state


@dataclass(frozen=True, eq=False)
class MbqcProgram:
    pre_state: PureState | DensityMatrix | ZeroDiscordState
    schedule: Schedule
    post: PostProcess
    num_outputs: int

    def __post_init__(self):
        r = self.pre_state.num_qubits
        if self.schedule.num_qubits != r:
            raise ValidationError(
                f"schedule covers {self.schedule.num_qubits} qubits, state has {r}", "schedule"
            )
        if self.post.num_inputs != r:
            raise ValidationError(f"post-processing reads {self.post.num_inputs} bits, transcript has {r}", "post")
        if self.post.num_outputs != self.num_outputs:
            raise ValidationError("post-processing output width differs from the declared one", "post")

    @property
    def num_qubits(self) -> int:
        return self.pre_state.num_qubits

    @property
    def adaptive(self) -> bool:
        return self.schedule.adaptive


def compiled_bases(circuit: IqpCircuit, plane: str = "zx") -> LocalProductBasis:
    """Per-qubit measurement bases of the compiled program (X on c_j, angle basis on q_z)."""
    try:
        ancilla = ANCILLA_PLANES[plane]
    except KeyError:
        raise ValidationError(f"unknown ancilla plane {plane!r}", "plane") from None
    return LocalProductBasis(
        tuple(QubitBasis.x() for _ in range(circuit.nu)) + tuple(ancilla(t) for t in circuit.thetas)
    )


def correction_post(circuit: IqpCircuit) -> AffinePost:
    """m_j = s_j XOR (XOR of b_z over z with z_j = 1)."""
    nu = circuit.nu
    masks = []
    for j in range(nu):
        mask = 1 << j
        for k, z in enumerate(circuit.zset):
            if (z >> j) & 1:
                mask |= 1 << (nu + k)
        masks.append(mask)
    return AffinePost(nu + len(circuit.gates), tuple(masks))


def compiled_schedule(circuit: IqpCircuit, plane: str = "zx") -> Schedule:
    # ancillas first, in Z order, then c_1..c_nu
    basis = compiled_bases(circuit, plane)
    nu = circuit.nu
    order = list(range(nu, nu + len(circuit.gates))) + list(range(nu))
    return Schedule.fixed(basis, order)


def compile_iqp_to_mbqc(circuit: IqpCircuit, plane: str = "zx") -> MbqcProgram:
    """Non-adaptive graph-state program for the circuit on input 0.

    ``plane="zx"`` is the default ancilla basis; it reproduces the circuit when Z
    is linearly independent over GF(2). ``plane="yz"`` measures each ancilla in
    {cos t|0> - i sin t|1>, sin t|0> + i cos t|1>}, which reproduces the circuit
    for every Z. Use :func:`validate_compilation` to check an instance.
    """
    gs = build_graph_state(circuit.zset, circuit.nu)
    return MbqcProgram(gs.state, compiled_schedule(circuit, plane), correction_post(circuit), circuit.nu)


def for_input(program: MbqcProgram, xbar: int) -> MbqcProgram:
    """Same program with x-bar XORed onto the output (the input-x member)."""
    if not isinstance(program.post, AffinePost):
        raise ValidationError("input shift needs an affine post-processing map", "post")
    return MbqcProgram(program.pre_state, program.schedule, program.post.with_offset(xbar), program.num_outputs)


def dephased_program(circuit: IqpCircuit, plane: str = "zx") -> MbqcProgram:
    """Compiled program with the graph state dephased in the compiled bases."""
    compiled = compile_iqp_to_mbqc(circuit, plane)
    zd = dephase(compiled.pre_state, compiled_bases(circuit, plane))
    return MbqcProgram(zd, compiled.schedule, compiled.post, compiled.num_outputs)


# ---------------------------------------------------------------------------
# exact execution


def _project_vec(v: np.ndarray, k: int, j: int, bra: np.ndarray) -> np.ndarray:
    return np.einsum("a,iak->ik", bra, v.reshape(2 ** (k - 1 - j), 2, 2**j)).reshape(-1)


def _project_mat(m: np.ndarray, k: int, j: int, bra: np.ndarray) -> np.ndarray:
    hi, lo = 2 ** (k - 1 - j), 2**j
    t = m.reshape(hi, 2, lo, hi, 2, lo)
    out = np.einsum("a,iakjbl,b->ikjl", bra, t, bra.conj())
    return out.reshape(hi * lo, hi * lo)


def _enumerate(initial, r: int, schedule: Schedule, project, weight) -> np.ndarray:
    """Depth-first walk of the transcript tree, carrying unnormalized states."""
    probs = np.zeros(2**r)

    def walk(pos, state, remaining, history, y):
        if pos == r:
            probs[y] += weight(state)
            return
        step = schedule.steps[pos]
        q = step.qubit
        j = remaining.index(q)
        rest = remaining[:j] + remaining[j + 1 :]
        basis = step.basis_for(tuple(history))
        for b in (0, 1):
            sub = project(state, len(remaining), j, basis.vector(b).conj())
            if weight(sub) > PRUNE:
                walk(pos + 1, sub, rest, history + [b], y | (b << q))

    walk(0, initial, list(range(r)), [], 0)
    return probs


def _vec_weight(v):
    return float(np.vdot(v, v).real)


def _mat_weight(m):
    return float(np.trace(m).real)


def _pure_transcripts(state: PureState, schedule: Schedule) -> np.ndarray:
    if not schedule.adaptive:
        return exact_distribution(state, schedule.fixed_basis()).probabilities
    return _enumerate(state.amplitudes, state.num_qubits, schedule, _project_vec, _vec_weight)


def _dm_transcripts(dm: DensityMatrix, schedule: Schedule) -> np.ndarray:
    if not schedule.adaptive:
        return density_distribution(dm, schedule.fixed_basis()).probabilities
    return _enumerate(dm.entries, dm.num_qubits, schedule, _project_mat, _mat_weight)


def _zd_component(zd: ZeroDiscordState, m: int) -> PureState:
    return product_state([zd.basis[j].vector((m >> j) & 1) for j in range(zd.num_qubits)])


def _zd_fixed_transcripts(zd: ZeroDiscordState, basis: LocalProductBasis) -> np.ndarray:
    # each component is a product state, so a fixed-basis readout factorises per qubit
    r = zd.num_qubits
    t = zd.table.probabilities.reshape((2,) * r)
    for q in range(r):
        born = np.abs(zd.basis[q].matrix.conj().T @ basis[q].matrix) ** 2
        t = np.moveaxis(np.tensordot(t, born, axes=([r - 1 - q], [0])), -1, r - 1 - q)
    return t.reshape(-1)


def transcript_distribution(pre_state, schedule: Schedule) -> ClassicalDistribution:
    """Exact distribution of full transcripts from quantum measurement of ``pre_state``."""
    r = pre_state.num_qubits
    if isinstance(pre_state, PureState):
        probs = _pure_transcripts(pre_state, schedule)
    elif isinstance(pre_state, DensityMatrix):
        probs = _dm_transcripts(pre_state, schedule)
    elif isinstance(pre_state, ZeroDiscordState):
        if r <= MAX_DENSE_QUBITS:
            probs = _dm_transcripts(pre_state.densify(), schedule)
        elif not schedule.adaptive:
            probs = _zd_fixed_transcripts(pre_state, schedule.fixed_basis())
        else:
            # mixture of locally orthogonal product states, one component at a time
            probs = np.zeros(2**r)
            for m in pre_state.table.support():
                probs += pre_state.table.probabilities[m] * _pure_transcripts(_zd_component(pre_state, m), schedule)
    else:
        raise ValidationError(f"unsupported pre-measurement state {type(pre_state).__name__}", "pre_state")
    return ClassicalDistribution(r, probs / probs.sum())


def run_mbqc_exact(program: MbqcProgram):
    """Returns ``(transcript_dist, output_dist)``."""
    transcripts = transcript_distribution(program.pre_state, program.schedule)
    return transcripts, pushforward(transcripts, program.post)


# ---------------------------------------------------------------------------
# sampling


def _sample_pure(state: PureState, schedule: Schedule, draws) -> int:
    history: list[int] = []
    y = 0
    for step, u in zip(schedule.steps, draws):
        bit, state, _ = measure_qubit(state, step.qubit, step.basis_for(tuple(history)), u)
        history.append(bit)
        y |= bit << step.qubit
    return y


def _sample_dm(dm: DensityMatrix, schedule: Schedule, draws) -> int:
    m = dm.entries
    remaining = list(range(dm.num_qubits))
    history: list[int] = []
    y = 0
    for step, u in zip(schedule.steps, draws):
        j = remaining.index(step.qubit)
        basis = step.basis_for(tuple(history))
        sub0 = _project_mat(m, len(remaining), j, basis.vector(0).conj())
        p0 = _mat_weight(sub0) / _mat_weight(m)
        if u < p0:
            bit, m = 0, sub0 / p0
        else:
            bit = 1
            m = _project_mat(m, len(remaining), j, basis.vector(1).conj())
            m = m / _mat_weight(m)
        remaining.pop(j)
        history.append(bit)
        y |= bit << step.qubit
    return y


def _sample_from_draws(program: MbqcProgram, draws) -> MbqcOutcome:
    pre = program.pre_state
    if isinstance(pre, PureState):
        y = _sample_pure(pre, program.schedule, draws)
    elif isinstance(pre, DensityMatrix):
        y = _sample_dm(pre, program.schedule, draws)
    else:
        m = int(pre.table.sample(draws[:1])[0])
        y = _sample_pure(_zd_component(pre, m), program.schedule, draws[1:])
    return MbqcOutcome(program.num_qubits, program.num_outputs, y, program.post.apply(y))


def draws_per_run(program: MbqcProgram) -> int:
    return program.num_qubits + (1 if isinstance(program.pre_state, ZeroDiscordState) else 0)


def run_mbqc_sample(program: MbqcProgram, seed: int, index: int = 0) -> MbqcOutcome:
    """Sequential seeded execution; run ``index`` reads its own block of the stream."""
    k = draws_per_run(program)
    u = make_rng(seed).random((index + 1) * k)[index * k :]
    return _sample_from_draws(program, u)


def run_mbqc_batch(program: MbqcProgram, seed: int, count: int) -> list[MbqcOutcome]:
    k = draws_per_run(program)
    u = make_rng(seed).random(count * k).reshape(count, k)
    return [_sample_from_draws(program, row) for row in u]


def validate_compilation(circuit: IqpCircuit, plane: str = "zx") -> dict:
    """Compare the compiled program against the circuit oracle for input 0."""
    _, out = run_mbqc_exact(compile_iqp_to_mbqc(circuit, plane))
    distance = tvd(out, simulate_iqp(circuit, 0))
    return {
        "plane": plane,
        "z_independent": circuit.z_independent(),
        "tvd": distance,
        "equivalent": distance < 1e-9,
    }
