"""Measurement schedules, classical post-processing and run outcomes.

A transcript ``y`` is an r-bit integer whose bit ``q`` is the outcome of the
measurement on qubit ``q`` (indexed by qubit, not by time). Adaptive basis rules
see the outcomes of earlier steps in schedule order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CapError, ValidationError
from .statekit import ClassicalDistribution, LocalProductBasis, QubitBasis, to_bitstring

MAX_TABLE_BITS = 16

BasisRule = Callable[[tuple], QubitBasis]


@dataclass(frozen=True)
class AdaptiveTable:
    """Basis keyed by a prefix of earlier outcomes, e.g. ``{"": b0, "1": b1, "10": b2}``.

    Keys are outcome strings in schedule order (first step first). The longest key
    matching the start of the history wins; ``""`` acts as the default.
    """

    table: Mapping[str, QubitBasis]

    def __post_init__(self):
        if not self.table:
            raise ValidationError("adaptive table is empty", "table")
        for key in self.table:
            if any(ch not in "01" for ch in key):
                raise ValidationError(f"adaptive table key {key!r} is not a bit string", "table")

    @property
    def depth(self) -> int:
        return max(len(k) for k in self.table)

    def __call__(self, history: tuple) -> QubitBasis:
        seen = "".join(str(b) for b in history)
        best = None
        for key in self.table:
            if seen.startswith(key) and (best is None or len(key) > len(best)):
                best = key
        if best is None:
            raise ValidationError(f"adaptive table has no entry for history {seen!r}", "table")
        return self.table[best]


@dataclass(frozen=True)
class MeasurementStep:
    qubit: int
    basis: QubitBasis | None = None
    rule: BasisRule | None = None

    def __post_init__(self):
        if (self.basis is None) == (self.rule is None):
            raise ValidationError("a step needs exactly one of a fixed basis or a rule", "basis")

    @property
    def adaptive(self) -> bool:
        return self.rule is not None

    def basis_for(self, history: tuple) -> QubitBasis:
        return self.basis if self.rule is None else self.rule(tuple(history))


@dataclass(frozen=True)
class Schedule:
    steps: tuple[MeasurementStep, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        qubits = [s.qubit for s in steps]
        if sorted(qubits) != list(range(len(steps))):
            raise ValidationError("schedule must measure each qubit exactly once", "schedule")
        for pos, s in enumerate(steps):
            if isinstance(s.rule, AdaptiveTable) and s.rule.depth > pos:
                raise ValidationError(
                    f"step {pos} (qubit {s.qubit}) depends on a later step", "schedule"
                )

    @classmethod
    def fixed(cls, basis: LocalProductBasis, order: Sequence[int] | None = None) -> "Schedule":
        order = range(len(basis)) if order is None else order
        return cls(tuple(MeasurementStep(q, basis[q]) for q in order))

    @property
    def num_qubits(self) -> int:
        return len(self.steps)

    @property
    def adaptive(self) -> bool:
        return any(s.adaptive for s in self.steps)

    def fixed_basis(self) -> LocalProductBasis:
        if self.adaptive:
            raise ValidationError("an adaptive schedule has no fixed basis", "schedule")
        by_qubit = {s.qubit: s.basis for s in self.steps}
        return LocalProductBasis(tuple(by_qubit[q] for q in range(self.num_qubits)))


def _parity(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values) & 1


@dataclass(frozen=True)
class AffinePost:
    """m_j = parity(y & masks[j]) XOR bit j of ``offset``."""

    num_inputs: int
    masks: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "masks", tuple(int(m) for m in self.masks))
        if any(not 0 <= m < 2**self.num_inputs for m in self.masks):
            raise ValidationError("affine mask wider than the transcript", "masks")
        if not 0 <= self.offset < 2 ** len(self.masks):
            raise ValidationError("affine offset wider than the output", "offset")

    @property
    def num_outputs(self) -> int:
        return len(self.masks)

    def apply_array(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.int64)
        out = np.full(ys.shape, self.offset, dtype=np.int64)
        for j, mask in enumerate(self.masks):
            out ^= _parity(ys & mask) << j
        return out

    def apply(self, y: int) -> int:
        return int(self.apply_array(np.array([y]))[0])

    def with_offset(self, offset: int) -> "AffinePost":
        return AffinePost(self.num_inputs, self.masks, self.offset ^ offset)


@dataclass(frozen=True, eq=False)
class TablePost:
    """Arbitrary total map from transcripts to outputs (small transcripts only)."""

    num_inputs: int
    num_outputs: int
    table: np.ndarray

    def __post_init__(self):
        if self.num_inputs > MAX_TABLE_BITS:
            raise CapError(f"lookup table cap exceeded: {self.num_inputs} > {MAX_TABLE_BITS} bits")
        t = np.array(self.table, dtype=np.int64).reshape(-1)
        if t.size != 2**self.num_inputs:
            raise ValidationError("lookup table must cover every transcript", "table")
        if t.min() < 0 or t.max() >= 2**self.num_outputs:
            raise ValidationError("lookup table output out of range", "table")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def apply_array(self, ys: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(ys, dtype=np.int64)]

    def apply(self, y: int) -> int:
        return int(self.table[y])


PostProcess = AffinePost | TablePost


def identity_post(r: int) -> AffinePost:
    return AffinePost(r, tuple(1 << j for j in range(r)))


def pushforward(dist: ClassicalDistribution, post: PostProcess) -> ClassicalDistribution:
    if dist.num_bits != post.num_inputs:
        raise ValidationError(
            f"post-processing reads {post.num_inputs} bits, transcript has {dist.num_bits}", "post"
        )
    outs = post.apply_array(np.arange(2**dist.num_bits))
    p = np.bincount(outs, weights=dist.probabilities, minlength=2**post.num_outputs)
    return ClassicalDistribution(post.num_outputs, p)


@dataclass(frozen=True)
class MbqcOutcome:
    num_qubits: int
    num_outputs: int
    transcript: int
    output: int

    @property
    def transcript_bits(self) -> str:
        return to_bitstring(self.transcript, self.num_qubits)

    @property
    def output_bits(self) -> str:
        return to_bitstring(self.output, self.num_outputs)
