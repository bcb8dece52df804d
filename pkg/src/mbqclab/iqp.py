"""IQP* circuits: gates exp(i theta X[z]) on a nu-qubit register.

The register starts in |x> on qubits 0..n-1 and |0> on qubits n..nu-1, so the
padded input x-bar has the same integer value as x. Output is the
computational-basis measurement of all nu qubits.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapError, ValidationError
from .statekit import (
    MAX_PURE_QUBITS,
    TOL,
    ClassicalDistribution,
    from_bitstring,
    make_rng,
    to_bitstring,
)

TWO_PI = 2 * math.pi
DEFAULT_ANGLES = (math.pi / 8, math.pi / 4, math.pi / 3, math.pi / 2, 3 * math.pi / 5)

_PI_ANGLE = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(value, field: str = "theta") -> float:
    """Angle in radians from a number or a string like ``"pi/4"``, ``"3*pi/5"``, ``"0.5"``.

    Rational multiples of pi are range-checked exactly against (0, 2pi].
    """
    if isinstance(value, bool):
        raise ValidationError(f"{field}: not an angle: {value!r}", field)
    if isinstance(value, (int, float)):
        theta = float(value)
        if not 0.0 < theta <= TWO_PI + TOL:
            raise ValidationError(f"{field}: {theta} outside (0, 2pi]", field)
        return min(theta, TWO_PI)
    if not isinstance(value, str):
        raise ValidationError(f"{field}: not an angle: {value!r}", field)
    m = _PI_ANGLE.match(value)
    if m:
        frac = Fraction(int(m.group(1) or 1), int(m.group(2) or 1))
        if not 0 < frac <= 2:
            raise ValidationError(f"{field}: {value} outside (0, 2pi]", field)
        return float(frac) * math.pi if frac != 2 else TWO_PI
    try:
        return parse_angle(float(value), field)
    except ValueError:
        raise ValidationError(f"{field}: cannot parse angle {value!r}", field) from None


def gf2_rank(vectors: Sequence[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


@dataclass(frozen=True)
class InputString:
    n: int
    nu: int
    x: int

    def __post_init__(self):
        if not 0 <= self.x < 2**self.n:
            raise ValidationError(f"input {self.x} does not fit in {self.n} bits", "x")

    @property
    def padded(self) -> int:
        return self.x

    @property
    def bits(self) -> str:
        return to_bitstring(self.x, self.n)


@dataclass(frozen=True)
class IqpCircuit:
    n: int
    nu: int
    gates: tuple[tuple[int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple((int(z), float(t)) for z, t in self.gates))
        if not 1 <= self.n <= self.nu:
            raise ValidationError(f"need 1 <= n <= nu, got n={self.n}, nu={self.nu}", "n")
        seen = set()
        for k, (z, theta) in enumerate(self.gates):
            if not 0 <= z < 2**self.nu:
                raise ValidationError(f"gates[{k}].z: z length mismatch for nu={self.nu}", "z")
            if z in seen:
                raise ValidationError("Z must be a set: duplicate z " + to_bitstring(z, self.nu), "z")
            seen.add(z)
            if not 0.0 < theta <= TWO_PI + TOL:
                raise ValidationError(f"gates[{k}].theta: {theta} outside (0, 2pi]", "theta")

    @property
    def zset(self) -> tuple[int, ...]:
        return tuple(z for z, _ in self.gates)

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(t for _, t in self.gates)

    def z_independent(self) -> bool:
        return gf2_rank(self.zset) == len(self.gates)

    def input(self, x) -> InputString:
        """Coerce ``x`` (InputString, n-bit string or int) to an InputString."""
        if isinstance(x, InputString):
            if (x.n, x.nu) != (self.n, self.nu):
                raise ValidationError("input string was built for another circuit", "x")
            return x
        if isinstance(x, str):
            return InputString(self.n, self.nu, from_bitstring(x, self.n, "x"))
        return InputString(self.n, self.nu, int(x))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "nu": self.nu,
            "gates": [{"z": to_bitstring(z, self.nu), "theta": t} for z, t in self.gates],
        }


def parse_iqp_instance(text: str) -> IqpCircuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed instance document: {exc}", "document") from None
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object", "document")
    for key in ("n", "nu", "gates"):
        if key not in doc:
            raise ValidationError(f"missing field {key!r}", key)
    n, nu, gates = doc["n"], doc["nu"], doc["gates"]
    if not isinstance(n, int) or not isinstance(nu, int) or isinstance(n, bool):
        raise ValidationError("n and nu must be integers", "n")
    if nu > MAX_PURE_QUBITS:
        raise CapError(f"qubit cap exceeded: nu={nu} > {MAX_PURE_QUBITS}")
    if not isinstance(gates, list):
        raise ValidationError("gates must be an array", "gates")
    parsed = []
    for k, g in enumerate(gates):
        if not isinstance(g, dict) or "z" not in g or "theta" not in g:
            raise ValidationError(f"gates[{k}] needs fields z and theta", "gates")
        z = g["z"]
        if not isinstance(z, str) or any(ch not in "01" for ch in z):
            raise ValidationError(f"gates[{k}].z must be a string of '0'/'1'", "z")
        if len(z) != nu:
            raise ValidationError(f"gates[{k}].z: z length mismatch ({len(z)} != {nu})", "z")
        parsed.append((int(z, 2), parse_angle(g["theta"], f"gates[{k}].theta")))
    return IqpCircuit(n, nu, tuple(parsed))


def final_amplitudes(circuit: IqpCircuit, x=0) -> np.ndarray:
    """Statevector just before the final measurement."""
    nu = circuit.nu
    if nu > MAX_PURE_QUBITS:
        raise CapError(f"qubit cap exceeded: nu={nu} > {MAX_PURE_QUBITS}")
    inp = circuit.input(x)
    psi = np.zeros(2**nu, dtype=np.complex128)
    psi[inp.padded] = 1.0
    idx = np.arange(2**nu)
    for z, theta in circuit.gates:
        # exp(i t X[z]) mixes each index y with y ^ z
        psi = np.cos(theta) * psi + 1j * np.sin(theta) * psi[idx ^ z]
    return psi


def simulate_iqp(circuit: IqpCircuit, x=0) -> ClassicalDistribution:
    p = np.abs(final_amplitudes(circuit, x)) ** 2
    return ClassicalDistribution(circuit.nu, p / p.sum())


def sample_iqp_batch(circuit: IqpCircuit, x, seed: int, count: int) -> np.ndarray:
    """``count`` exact samples (integer indices); sample ``i`` uses draw ``i`` of the seeded stream."""
    dist = simulate_iqp(circuit, x)
    return dist.sample(make_rng(seed).random(count))


def sample_iqp(circuit: IqpCircuit, x, seed: int) -> str:
    return to_bitstring(int(sample_iqp_batch(circuit, x, seed, 1)[0]), circuit.nu)


def shift_by_input(dist0: ClassicalDistribution, x) -> ClassicalDistribution:
    """m -> dist0(m XOR x-bar): the input-x distribution from the input-0 one."""
    if isinstance(x, InputString):
        if x.nu != dist0.num_bits:
            raise ValidationError(f"input padded to {x.nu} bits, distribution has {dist0.num_bits}", "x")
        xbar = x.padded
    elif isinstance(x, str):
        if len(x) > dist0.num_bits:
            raise ValidationError(f"input has {len(x)} bits, distribution has {dist0.num_bits}", "x")
        xbar = from_bitstring(x, field="x")
    else:
        xbar = int(x)
        if not 0 <= xbar < 2**dist0.num_bits:
            raise ValidationError("input does not fit the distribution width", "x")
    idx = np.arange(2**dist0.num_bits)
    return ClassicalDistribution(dist0.num_bits, dist0.probabilities[idx ^ xbar])


def random_iqp_instance(
    seed: int,
    n: int,
    nu: int,
    num_gates: int,
    angles: Sequence[float] = DEFAULT_ANGLES,
    independent: bool = True,
) -> IqpCircuit:
    """Seeded random IQP* instance with distinct nonzero z strings.

    With ``independent=True`` the z strings are linearly independent over GF(2).
    """
    if independent and num_gates > nu:
        raise ValidationError(f"{num_gates} strings cannot be independent in {nu} bits", "num_gates")
    if num_gates > 2**nu - 1:
        raise ValidationError("more gates than distinct nonzero z strings", "num_gates")
    rng = make_rng(seed)
    zs: list[int] = []
    while len(zs) < num_gates:
        z = int(rng.integers(1, 2**nu))
        if z in zs or (independent and gf2_rank(zs + [z]) < len(zs) + 1):
            continue
        zs.append(z)
    thetas = [float(angles[int(rng.integers(len(angles)))]) for _ in zs]
    return IqpCircuit(n, nu, tuple(zip(zs, thetas)))
