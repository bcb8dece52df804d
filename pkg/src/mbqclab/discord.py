"""Zero-discord states, dephasing, zero-discord detection and classical replacement.

A zero-discord state is kept as a local product basis plus a classical table
over r-bit strings; it is densified only for small-r verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .iqp import IqpCircuit, simulate_iqp
from .schedule import MbqcOutcome, PostProcess, Schedule, pushforward
from .statekit import (
    TOL,
    ClassicalDistribution,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    conjugate_local,
    density_distribution,
    exact_distribution,
    make_rng,
    partial_trace,
    single_qubit_marginal,
)

ZERO_DISCORD = "ZERO_DISCORD"
DISCORDANT = "DISCORDANT"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class ZeroDiscordState:
    basis: LocalProductBasis
    table: ClassicalDistribution

    def __post_init__(self):
        if len(self.basis) != self.table.num_bits:
            raise ValidationError(
                f"basis covers {len(self.basis)} qubits, table has {self.table.num_bits} bits", "basis"
            )

    @property
    def num_qubits(self) -> int:
        return self.table.num_bits

    def densify(self) -> DensityMatrix:
        diag = DensityMatrix(self.num_qubits, np.diag(self.table.probabilities).astype(np.complex128))
        entries = conjugate_local(diag, [b.matrix for b in self.basis])
        return DensityMatrix(self.num_qubits, (entries + entries.conj().T) / 2)


@dataclass(frozen=True, eq=False)
class PerBitMap:
    """Row-stochastic p(out | stored bit) for one qubit."""

    qubit: int
    stored: QubitBasis
    target: QubitBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (2, 2) or m.min() < 0 or m.max() > 1 or np.abs(m.sum(axis=1) - 1).max() > 1e-12:
            raise ValidationError("per-bit map must be a 2x2 row-stochastic matrix", "matrix")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class DiscordVerdict:
    status: str
    basis: LocalProductBasis | None = None
    reason: str = ""
    witness: dict = field(default_factory=dict)


def perbit_map(stored: QubitBasis, stored_bit: int, target: QubitBasis) -> np.ndarray:
    """Born probabilities (p0, p1) of measuring stored vector ``stored_bit`` in ``target``."""
    amps = target.matrix.conj().T @ stored.vector(stored_bit)
    p = np.abs(amps) ** 2
    return p / p.sum()


def perbit_matrix(qubit: int, stored: QubitBasis, target: QubitBasis) -> PerBitMap:
    rows = np.vstack([perbit_map(stored, 0, target), perbit_map(stored, 1, target)])
    return PerBitMap(qubit, stored, target, rows)


def dephase(state: PureState | DensityMatrix, basis: LocalProductBasis) -> ZeroDiscordState:
    if isinstance(state, PureState):
        table = exact_distribution(state, basis)
    else:
        table = density_distribution(state, basis)
    return ZeroDiscordState(basis, table)


def dephase_circuit_final(circuit: IqpCircuit, x=0) -> ZeroDiscordState:
    """Computational-basis dephasing of the circuit's final state: sum_m P(m|x) |m><m|."""
    return ZeroDiscordState(LocalProductBasis.computational(circuit.nu), simulate_iqp(circuit, x))


# ---------------------------------------------------------------------------
# detection


def _basis_from_axis(n: np.ndarray) -> QubitBasis:
    sx, sy, sz = n
    h = np.array([[sz, sx - 1j * sy], [sx + 1j * sy, -sz]])
    _, v = np.linalg.eigh(h)
    return QubitBasis(v)


def _slice_axis(rho: np.ndarray, r: int, j: int):
    """Bloch axis shared by every qubit-j slice Tr_rest[rho (I_j x E)].

    Returns ``(axis, strength, spread)``. ``strength`` is the size of the traceless
    part along the axis; ``spread`` is the part no single axis can explain, which
    must vanish for a state diagonal in some product basis.
    """
    t = rho.reshape((2,) * (2 * r))
    t = np.moveaxis(t, (r - 1 - j, 2 * r - 1 - j), (0, 1)).reshape(2, 2, -1)
    coeffs = np.vstack([t[0, 1] + t[1, 0], 1j * (t[0, 1] - t[1, 0]), t[0, 0] - t[1, 1]])
    _, v = np.linalg.eigh((coeffs @ coeffs.conj().T).real)
    axis = v[:, 2]
    along = axis @ coeffs
    # residual measured entrywise; a Gram eigenvalue would square the rounding error
    residual = coeffs - np.outer(axis, along)
    return axis, float(np.abs(along).max()), float(np.abs(residual).max())


def is_zero_discord(dm: DensityMatrix, tolerance: float = TOL) -> DiscordVerdict:
    """Decide whether ``dm`` is diagonal in some local product basis.

    Non-degenerate single-qubit marginals fix that qubit's basis. For a degenerate
    marginal the basis is read off the common Bloch axis of all of the qubit's
    slices; if no slice has a traceless part the qubit is unconstrained.
    """
    r = dm.num_qubits
    bases: list[QubitBasis] = []
    weak: list[int] = []
    free: list[int] = []
    for j in range(r):
        w, v = np.linalg.eigh(partial_trace(dm, [j]).entries)
        if w[1] - w[0] > tolerance:
            bases.append(QubitBasis(v).canonical())
            continue
        axis, strength, spread = _slice_axis(dm.entries, r, j)
        if strength <= tolerance:
            bases.append(QubitBasis.computational())
            free.append(j)
            continue
        if spread > tolerance:
            return DiscordVerdict(
                DISCORDANT,
                reason=f"qubit {j}: correlations point along more than one Bloch axis",
                witness={"qubit": j, "axis_spread": spread},
            )
        if strength < 1e3 * tolerance:
            weak.append(j)
        bases.append(_basis_from_axis(axis).canonical())
    basis = LocalProductBasis(tuple(bases))
    rotated = conjugate_local(dm, [b.matrix.conj().T for b in basis])
    off = np.abs(rotated - np.diag(np.diagonal(rotated)))
    worst = float(off.max())
    if worst <= tolerance:
        return DiscordVerdict(ZERO_DISCORD, basis, witness={"free_qubits": free})
    if weak:
        return DiscordVerdict(
            INCONCLUSIVE,
            reason=f"basis of qubits {weak} is only weakly determined",
            witness={"max_offdiagonal": worst},
        )
    row, col = np.unravel_index(int(np.argmax(off)), off.shape)
    return DiscordVerdict(
        DISCORDANT,
        reason="not diagonal in the only candidate product basis",
        witness={"max_offdiagonal": worst, "entry": [int(row), int(col)]},
    )


def pure_state_zero_discord(state: PureState, tolerance: float = TOL) -> DiscordVerdict:
    """A pure state has zero discord iff it is a product state; works up to the pure-state cap."""
    r = state.num_qubits
    bases = []
    for j in range(r):
        marg = single_qubit_marginal(state.amplitudes, r, j)
        purity = float(np.trace(marg @ marg).real)
        if purity < 1.0 - tolerance:
            return DiscordVerdict(
                DISCORDANT, reason=f"qubit {j} is entangled with the rest", witness={"qubit": j, "purity": purity}
            )
        _, v = np.linalg.eigh(marg)
        bases.append(QubitBasis(v).canonical())
    return DiscordVerdict(ZERO_DISCORD, LocalProductBasis(tuple(bases)))


# ---------------------------------------------------------------------------
# classical replacement


def classical_replacement_run(
    zd: ZeroDiscordState, schedule: Schedule, post: PostProcess, seed: int, index: int = 0
) -> MbqcOutcome:
    """One run with the state replaced by a stored string.

    Draws m from the table, then produces each scheduled qubit's outcome from m's
    bit alone through its per-bit map. Run ``index`` uses its own block of the
    seeded stream, so batches never reuse a draw.
    """
    r = zd.num_qubits
    u = make_rng(seed).random((index + 1) * (r + 1))[index * (r + 1) :]
    return _replacement_from_draws(zd, schedule, post, u)


def classical_replacement_batch(
    zd: ZeroDiscordState, schedule: Schedule, post: PostProcess, seed: int, count: int
) -> list[MbqcOutcome]:
    r = zd.num_qubits
    u = make_rng(seed).random(count * (r + 1)).reshape(count, r + 1)
    return [_replacement_from_draws(zd, schedule, post, row) for row in u]


def _check_match(zd: ZeroDiscordState, schedule: Schedule, post: PostProcess):
    if schedule.num_qubits != zd.num_qubits:
        raise ValidationError(
            f"schedule covers {schedule.num_qubits} qubits, state has {zd.num_qubits}", "schedule"
        )
    if post.num_inputs != zd.num_qubits:
        raise ValidationError("post-processing width does not match the transcript", "post")


def _replacement_from_draws(zd, schedule, post, u) -> MbqcOutcome:
    _check_match(zd, schedule, post)
    m = int(zd.table.sample(u[:1])[0])
    history: list[int] = []
    y = 0
    for step, draw in zip(schedule.steps, u[1:]):
        q = step.qubit
        p0, _ = perbit_map(zd.basis[q], (m >> q) & 1, step.basis_for(tuple(history)))
        bit = 0 if draw < p0 else 1
        history.append(bit)
        y |= bit << q
    return MbqcOutcome(zd.num_qubits, post.num_outputs, y, post.apply(y))


def classical_replacement_exact(zd: ZeroDiscordState, schedule: Schedule, post: PostProcess):
    """Exact (transcript, output) distributions of the classical replacement."""
    _check_match(zd, schedule, post)
    r = zd.num_qubits
    if not schedule.adaptive:
        t = zd.table.probabilities.reshape((2,) * r)
        for step in schedule.steps:
            q = step.qubit
            k = perbit_matrix(q, zd.basis[q], step.basis).matrix
            t = np.moveaxis(np.tensordot(t, k, axes=([r - 1 - q], [0])), -1, r - 1 - q)
        transcript = ClassicalDistribution(r, t.reshape(-1))
        return transcript, pushforward(transcript, post)
    probs = np.zeros(2**r)
    ms = np.arange(2**r)

    def walk(pos, weights, history, y):
        if pos == r:
            probs[y] += weights.sum()
            return
        step = schedule.steps[pos]
        q = step.qubit
        k = perbit_matrix(q, zd.basis[q], step.basis_for(tuple(history))).matrix
        bits = (ms >> q) & 1
        for b in (0, 1):
            w = weights * k[bits, b]
            if w.sum() > 0:
                walk(pos + 1, w, history + [b], y | (b << q))

    walk(0, zd.table.probabilities.copy(), [], 0)
    transcript = ClassicalDistribution(r, probs)
    return transcript, pushforward(transcript, post)
