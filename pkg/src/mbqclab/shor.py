"""Desk-scale period finding: the final state of Shor's circuit, dephased.

Register layout: phase register x on qubits 0..nu-1, function register
f(x) = a^x mod M on qubits nu..nu+n-1, so the basis index is x + (f << nu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .criteria import MbqcSet
from .discord import ZeroDiscordState
from .errors import CapError, ValidationError
from .schedule import AffinePost, Schedule
from .statekit import (
    MAX_PURE_QUBITS,
    ClassicalDistribution,
    LocalProductBasis,
    PureState,
    make_rng,
    to_bitstring,
)


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    return all(k % d for d in range(2, math.isqrt(k) + 1))


def _is_prime_power(k: int) -> bool:
    for p in range(2, math.isqrt(k) + 1):
        if k % p == 0:
            while k % p == 0:
                k //= p
            return k == 1
    return False


def multiplicative_order(a: int, M: int) -> int:
    r, v = 1, a % M
    while v != 1:
        v = v * a % M
        r += 1
    return r


@dataclass(frozen=True)
class ShorInstance:
    M: int
    a: int
    nu: int = field(init=False)
    n: int = field(init=False)

    def __post_init__(self):
        M, a = self.M, self.a
        if M < 15 or M % 2 == 0 or _is_prime(M) or _is_prime_power(M):
            raise ValidationError(f"M={M} must be odd, composite, not a prime power and >= 15", "M")
        if not 1 < a < M:
            raise ValidationError(f"need 1 < a < M, got a={a}", "a")
        if math.gcd(a, M) != 1:
            raise ValidationError(f"gcd(a, M) = {math.gcd(a, M)} != 1", "a")
        nu = (M * M - 1).bit_length()  # smallest nu with M^2 <= 2^nu
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "n", (M - 1).bit_length())

    @property
    def num_qubits(self) -> int:
        return self.nu + self.n


def _modexp_table(inst: ShorInstance) -> np.ndarray:
    f = np.empty(2**inst.nu, dtype=np.int64)
    v = 1
    for x in range(2**inst.nu):
        f[x] = v
        v = v * inst.a % inst.M
    return f


def _check_cap(inst: ShorInstance):
    if inst.num_qubits > MAX_PURE_QUBITS:
        raise CapError(f"qubit cap exceeded: nu + n = {inst.num_qubits} > {MAX_PURE_QUBITS}")


def build_shor_state(inst: ShorInstance) -> PureState:
    """Uniform superposition, modular exponentiation, then an exact QFT on the phase register."""
    _check_cap(inst)
    N = 2**inst.nu
    amps = np.zeros((2**inst.n, N), dtype=np.complex128)
    amps[_modexp_table(inst), np.arange(N)] = N**-0.5
    # QFT|x> = N^{-1/2} sum_c e^{2 pi i x c / N} |c>, applied per function value
    amps = np.fft.ifft(amps, axis=1, norm="ortho")
    return PureState(inst.num_qubits, amps.reshape(-1))


def build_shor_state_structured(inst: ShorInstance) -> PureState:
    """Same state from the period structure: one geometric sum per residue class."""
    _check_cap(inst)
    N = 2**inst.nu
    order = multiplicative_order(inst.a, inst.M)
    c = np.arange(N)
    amps = np.zeros((2**inst.n, N), dtype=np.complex128)
    omega = np.exp(2j * np.pi * order * c / N)
    for x0 in range(order):
        count = (N - x0 + order - 1) // order
        with np.errstate(invalid="ignore", divide="ignore"):
            geo = np.where(np.isclose(omega, 1.0, rtol=0, atol=1e-14), count, (1 - omega**count) / (1 - omega))
        amps[pow(inst.a, x0, inst.M)] = np.exp(2j * np.pi * x0 * c / N) * geo / N
    return PureState(inst.num_qubits, amps.reshape(-1))


def dephase_final(state: PureState, inst: ShorInstance) -> ZeroDiscordState:
    """Computational-basis dephasing of the whole register."""
    if state.num_qubits != inst.num_qubits:
        raise ValidationError("state does not match the instance register", "state")
    p = np.abs(state.amplitudes) ** 2
    return ZeroDiscordState(LocalProductBasis.computational(inst.num_qubits), ClassicalDistribution(inst.num_qubits, p / p.sum()))


def phase_marginal(dist: ClassicalDistribution, inst: ShorInstance) -> ClassicalDistribution:
    p = dist.probabilities.reshape(2**inst.n, 2**inst.nu).sum(axis=0)
    return ClassicalDistribution(inst.nu, p)


@dataclass(frozen=True)
class PeriodCandidate:
    sample: int
    period: int
    verified: bool


def convergent_denominators(c: int, nu: int) -> list[int]:
    """Denominators of the continued-fraction convergents of c / 2^nu, in order."""
    x = Fraction(c, 2**nu)
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    while True:
        a = math.floor(x)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(q1)
        frac = x - a
        if frac == 0:
            return out
        x = 1 / frac


def extract_period(c: int, nu: int, M: int, a: int) -> PeriodCandidate:
    """Smallest convergent denominator d <= M, or multiple up to 4d, with a^r = 1 mod M."""
    if c == 0:
        return PeriodCandidate(c, 0, False)
    denominators = [d for d in convergent_denominators(c, nu) if 1 < d <= M]
    for d in denominators:
        for r in range(d, 4 * d + 1, d):
            if pow(a, r, M) == 1:
                return PeriodCandidate(c, r, True)
    return PeriodCandidate(c, denominators[-1] if denominators else 0, False)


def factor_from_period(M: int, a: int, r: int) -> tuple[int, int] | None:
    """Nontrivial factor pair from a verified period, or None when this period gives none."""
    if r <= 0 or pow(a, r, M) != 1:
        raise ValidationError(f"r={r} is not a verified period of {a} mod {M}", "r")
    if r % 2:
        return None
    h = pow(a, r // 2, M)
    if h == M - 1:
        return None
    f1, f2 = math.gcd(h - 1, M), math.gcd(h + 1, M)
    if f1 in (1, M) or f2 in (1, M):
        return None
    return f1, f2


@dataclass
class ShorReport:
    M: int
    a: int
    seed: int
    samples: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    period: int | None = None
    factors: tuple | None = None

    @property
    def success(self) -> bool:
        return self.factors is not None

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "a": self.a,
            "seed": self.seed,
            "samples_drawn": len(self.samples),
            "samples": self.samples,
            "candidates": [{"c": c.sample, "r": c.period, "verified": c.verified} for c in self.candidates],
            "period": self.period,
            "factors": list(self.factors) if self.factors else None,
        }


def shor_zero_discord(inst: ShorInstance) -> ZeroDiscordState:
    return dephase_final(build_shor_state(inst), inst)


def run_shor_pipeline(inst: ShorInstance, seed: int, max_samples: int = 20, zd: ZeroDiscordState | None = None) -> ShorReport:
    """Sample the dephased state until a factor appears or ``max_samples`` are used."""
    zd = shor_zero_discord(inst) if zd is None else zd
    report = ShorReport(inst.M, inst.a, seed)
    draws = zd.table.sample(make_rng(seed).random(max_samples))
    for y in draws:
        c = int(y) & (2**inst.nu - 1)
        report.samples.append(to_bitstring(c, inst.nu))
        cand = extract_period(c, inst.nu, inst.M, inst.a)
        report.candidates.append(cand)
        if not cand.verified:
            continue
        factors = factor_from_period(inst.M, inst.a, cand.period)
        if factors is not None:
            report.period, report.factors = cand.period, factors
            break
    return report


def shor_set(inst: ShorInstance, zd: ZeroDiscordState | None = None) -> MbqcSet:
    """Dephased final state read out in the computational basis: phase register, then function register."""
    zd = shor_zero_discord(inst) if zd is None else zd
    r = inst.num_qubits
    schedule = Schedule.fixed(LocalProductBasis.computational(r))
    phase = AffinePost(r, tuple(1 << j for j in range(inst.nu)))
    func = AffinePost(r, tuple(1 << (inst.nu + j) for j in range(inst.n)))
    return MbqcSet(zd, ((schedule, phase), (schedule, func)))
