"""Dense pure states, density matrices, local bases and classical distributions.

Bit convention used throughout the package: qubit ``j`` (0-based) is bit ``j``
of the integer index, so an outcome string m has index ``sum(m_j << j)``.
Bit strings are written most significant bit first, ``m_{r-1} ... m_1 m_0``.

Every value here is immutable after construction; operations return new values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapError, ValidationError

TOL = 1e-9
MAX_PURE_QUBITS = 24
MAX_DENSE_QUBITS = 11
MAX_SEED = 2**64


def close(a, b, tol: float = TOL) -> bool:
    """Absolute comparison used by every module (scalars or arrays)."""
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= tol))


def to_bitstring(index: int, num_bits: int) -> str:
    return format(int(index), f"0{num_bits}b") if num_bits else ""


def from_bitstring(bits: str, num_bits: int | None = None, field: str = "bits") -> int:
    if not isinstance(bits, str) or any(ch not in "01" for ch in bits):
        raise ValidationError(f"{field}: expected a string of '0'/'1', got {bits!r}", field)
    if num_bits is not None and len(bits) != num_bits:
        raise ValidationError(
            f"{field}: length mismatch, expected {num_bits} bits, got {len(bits)}", field
        )
    return int(bits, 2) if bits else 0


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based stream for one run; draw ``i`` of the stream belongs to sample ``i``."""
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}", "seed")
    return np.random.Generator(np.random.Philox(seed))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_qubit(j: int, r: int, name: str = "qubit") -> int:
    if not isinstance(j, (int, np.integer)) or not 0 <= j < r:
        raise ValidationError(f"{name} index {j} out of range for {r} qubits", name)
    return int(j)


@dataclass(frozen=True, eq=False)
class PureState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        r = self.num_qubits
        if r < 1:
            raise ValidationError("a state needs at least one qubit", "num_qubits")
        if r > MAX_PURE_QUBITS:
            raise CapError(f"qubit cap exceeded: {r} > {MAX_PURE_QUBITS}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**r:
            raise ValidationError(f"expected {2**r} amplitudes, got {amps.size}", "amplitudes")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > TOL:
            raise ValidationError(f"state is not normalized (norm^2 = {norm})", "amplitudes")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        r = int(round(np.log2(max(amps.size, 1))))
        if 2**r != amps.size:
            raise ValidationError("amplitude count is not a power of two", "amplitudes")
        return cls(r, amps)

    @classmethod
    def basis_state(cls, index: int, num_qubits: int) -> "PureState":
        if num_qubits > MAX_PURE_QUBITS:
            raise CapError(f"qubit cap exceeded: {num_qubits} > {MAX_PURE_QUBITS}")
        amps = np.zeros(2**num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def density_matrix(self) -> "DensityMatrix":
        if self.num_qubits > MAX_DENSE_QUBITS:
            raise CapError(f"dense cap exceeded: {self.num_qubits} > {MAX_DENSE_QUBITS}")
        v = self.amplitudes
        return DensityMatrix(self.num_qubits, np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        r = self.num_qubits
        if r < 1:
            raise ValidationError("a state needs at least one qubit", "num_qubits")
        if r > MAX_DENSE_QUBITS:
            raise CapError(f"dense cap exceeded: {r} > {MAX_DENSE_QUBITS}")
        rho = np.array(self.entries, dtype=np.complex128)
        if rho.shape != (2**r, 2**r):
            raise ValidationError(f"expected a {2**r}x{2**r} matrix, got {rho.shape}", "entries")
        if not close(rho, rho.conj().T):
            raise ValidationError("density matrix is not Hermitian", "entries")
        if abs(np.trace(rho) - 1.0) > TOL:
            raise ValidationError(f"trace is {np.trace(rho).real}, expected 1", "entries")
        if np.linalg.eigvalsh(rho).min() < -TOL:
            raise ValidationError("density matrix has a negative eigenvalue", "entries")
        object.__setattr__(self, "entries", _freeze(rho))


@dataclass(frozen=True, eq=False)
class QubitBasis:
    """Two orthonormal vectors, stored as the columns of ``matrix``.

    ``label`` is an optional ``(kind, angle)`` pair kept only so that bases built
    from named families serialize back to the same short form.
    """

    matrix: np.ndarray
    label: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValidationError("a qubit basis is a 2x2 matrix", "basis")
        if not close(m.conj().T @ m, np.eye(2)):
            raise ValidationError("basis matrix is not unitary", "basis")
        object.__setattr__(self, "matrix", _freeze(m))

    def vector(self, k: int) -> np.ndarray:
        return self.matrix[:, k]

    def equivalent(self, other: "QubitBasis", tol: float = TOL) -> bool:
        """Same vectors in the same order, each up to a global phase."""
        overlaps = np.abs(np.sum(self.matrix.conj() * other.matrix, axis=0))
        return close(overlaps, 1.0, tol)

    def canonical(self) -> "QubitBasis":
        """Same basis with vector 0 the one leaning towards |0>, each vector's leading entry real and positive."""
        m = self.matrix
        if abs(m[0, 1]) > abs(m[0, 0]) + TOL:
            m = m[:, ::-1]
        cols = []
        for v in m.T:
            lead = v[0] if abs(v[0]) > TOL else v[1]
            cols.append(v * (abs(lead) / lead))
        return QubitBasis(np.column_stack(cols))

    def equivalent_up_to_relabel(self, other: "QubitBasis", tol: float = TOL) -> bool:
        swapped = QubitBasis(other.matrix[:, ::-1])
        return self.equivalent(other, tol) or self.equivalent(swapped, tol)

    @classmethod
    def computational(cls) -> "QubitBasis":
        return cls(np.eye(2), ("computational", None))

    @classmethod
    def x(cls) -> "QubitBasis":
        return cls(np.array([[1, 1], [1, -1]]) / np.sqrt(2), ("x", None))

    @classmethod
    def zx(cls, theta: float) -> "QubitBasis":
        """{cos t|0> + sin t|1>, sin t|0> - cos t|1>}: the ancilla basis of compiled programs."""
        c, s = np.cos(theta), np.sin(theta)
        return cls(np.array([[c, s], [s, -c]]), ("zx_angle", float(theta)))

    @classmethod
    def yz(cls, theta: float) -> "QubitBasis":
        """{cos t|0> - i sin t|1>, sin t|0> + i cos t|1>}."""
        c, s = np.cos(theta), np.sin(theta)
        return cls(np.array([[c, s], [-1j * s, 1j * c]]), ("yz_angle", float(theta)))

    @classmethod
    def xy(cls, alpha: float) -> "QubitBasis":
        """{(|0> + e^{ia}|1>)/sqrt2, (|0> - e^{ia}|1>)/sqrt2}."""
        p = np.exp(1j * alpha)
        return cls(np.array([[1, 1], [p, -p]]) / np.sqrt(2), ("xy_angle", float(alpha)))


@dataclass(frozen=True)
class LocalProductBasis:
    qubits: tuple[QubitBasis, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.qubits:
            raise ValidationError("a product basis needs at least one qubit", "basis")

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, j: int) -> QubitBasis:
        return self.qubits[j]

    def __iter__(self):
        return iter(self.qubits)

    @classmethod
    def computational(cls, r: int) -> "LocalProductBasis":
        return cls(tuple(QubitBasis.computational() for _ in range(r)))

    def equivalent(self, other: "LocalProductBasis", tol: float = TOL) -> bool:
        return len(self) == len(other) and all(
            a.equivalent(b, tol) for a, b in zip(self.qubits, other.qubits)
        )

    def matrix(self) -> np.ndarray:
        """Full 2^r x 2^r unitary; column y is the product vector for outcome y."""
        if len(self) > MAX_DENSE_QUBITS:
            raise CapError(f"dense cap exceeded: {len(self)} > {MAX_DENSE_QUBITS}")
        out = np.ones((1, 1), dtype=np.complex128)
        for b in self.qubits:
            out = np.kron(b.matrix, out)
        return out


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    """Distribution over ``num_bits``-bit strings, stored densely by integer index."""

    num_bits: int
    probabilities: np.ndarray

    def __post_init__(self):
        k = self.num_bits
        if k < 0 or k > MAX_PURE_QUBITS:
            raise CapError(f"bit cap exceeded: {k} > {MAX_PURE_QUBITS}")
        p = np.array(self.probabilities, dtype=np.float64).reshape(-1)
        if p.size != 2**k:
            raise ValidationError(f"expected {2**k} probabilities, got {p.size}", "probabilities")
        if p.size and p.min() < -TOL:
            raise ValidationError("negative probability", "probabilities")
        if abs(p.sum() - 1.0) > TOL:
            raise ValidationError(f"probabilities sum to {p.sum()}, expected 1", "probabilities")
        object.__setattr__(self, "probabilities", _freeze(np.clip(p, 0.0, None)))

    @classmethod
    def from_mapping(cls, mapping: Mapping, num_bits: int) -> "ClassicalDistribution":
        p = np.zeros(2**num_bits)
        for key, value in mapping.items():
            idx = from_bitstring(key, num_bits) if isinstance(key, str) else int(key)
            p[idx] += float(value)
        return cls(num_bits, p)

    @classmethod
    def point_mass(cls, index: int, num_bits: int) -> "ClassicalDistribution":
        p = np.zeros(2**num_bits)
        p[index] = 1.0
        return cls(num_bits, p)

    def __getitem__(self, key) -> float:
        idx = from_bitstring(key, self.num_bits) if isinstance(key, str) else int(key)
        return float(self.probabilities[idx])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probabilities > 0)

    def items(self) -> list[tuple[str, float]]:
        return [(to_bitstring(i, self.num_bits), float(self.probabilities[i])) for i in self.support()]

    def to_mapping(self) -> dict[str, float]:
        return dict(self.items())

    def point(self, tol: float = TOL) -> int | None:
        """Index of the single string carrying all the mass, if there is one."""
        i = int(np.argmax(self.probabilities))
        return i if abs(self.probabilities[i] - 1.0) <= tol else None

    def sample(self, uniforms) -> np.ndarray:
        """Inverse-CDF draw: one index per uniform in [0, 1)."""
        cdf = np.cumsum(self.probabilities)
        idx = np.searchsorted(cdf, np.asarray(uniforms), side="right")
        last = int(self.support()[-1])
        return np.minimum(idx, last)


# ---------------------------------------------------------------------------
# operations


def init_plus_state(r: int) -> PureState:
    if r > MAX_PURE_QUBITS:
        raise CapError(f"qubit cap exceeded: {r} > {MAX_PURE_QUBITS}")
    if r < 1:
        raise ValidationError("a state needs at least one qubit", "num_qubits")
    return PureState(r, np.full(2**r, 2 ** (-r / 2), dtype=np.complex128))


def tensor(*states: PureState) -> PureState:
    """Product state; the first argument occupies the lowest qubit indices."""
    amps = np.ones(1, dtype=np.complex128)
    for s in states:
        amps = np.kron(s.amplitudes, amps)
    return PureState(sum(s.num_qubits for s in states), amps)


def product_state(vectors: Sequence) -> PureState:
    """Product of single-qubit 2-vectors, ``vectors[j]`` on qubit ``j``."""
    amps = np.ones(1, dtype=np.complex128)
    for v in vectors:
        amps = np.kron(np.asarray(v, dtype=np.complex128), amps)
    return PureState(len(vectors), amps)


def apply_cz(state: PureState, i: int, j: int) -> PureState:
    r = state.num_qubits
    i, j = _check_qubit(i, r, "i"), _check_qubit(j, r, "j")
    if i == j:
        raise ValidationError("CZ needs two distinct qubits", "j")
    idx = np.arange(2**r)
    amps = state.amplitudes.copy()
    amps[((idx >> i) & (idx >> j) & 1).astype(bool)] *= -1
    return PureState(r, amps)


def _apply_1q(amps: np.ndarray, r: int, j: int, u: np.ndarray) -> np.ndarray:
    v = amps.reshape(2 ** (r - 1 - j), 2, 2**j)
    return np.einsum("ab,ibk->iak", u, v).reshape(-1)


def apply_single_qubit(state: PureState, j: int, u) -> PureState:
    j = _check_qubit(j, state.num_qubits)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not close(u.conj().T @ u, np.eye(2)):
        raise ValidationError("gate is not unitary", "u")
    return PureState(state.num_qubits, _apply_1q(state.amplitudes, state.num_qubits, j, u))


def _rotate_into(amps: np.ndarray, r: int, basis: LocalProductBasis) -> np.ndarray:
    """Amplitudes <y|psi> in the product basis."""
    out = amps
    for j, b in enumerate(basis):
        out = _apply_1q(out, r, j, b.matrix.conj().T)
    return out


def measure_qubit(state: PureState, j: int, basis: QubitBasis, random_draw: float):
    """Projective measurement of one qubit.

    Returns ``(bit, collapsed_state, probability)``; bit 0 is chosen iff
    ``random_draw < P(0)``. The collapsed state keeps all qubits, with qubit
    ``j`` left in the observed basis vector.
    """
    r = state.num_qubits
    j = _check_qubit(j, r)
    coeffs = _apply_1q(state.amplitudes, r, j, basis.matrix.conj().T).reshape(2 ** (r - 1 - j), 2, 2**j)
    p0 = float(np.sum(np.abs(coeffs[:, 0, :]) ** 2))
    bit = 0 if random_draw < p0 else 1
    prob = p0 if bit == 0 else max(0.0, 1.0 - p0)
    kept = np.zeros_like(coeffs)
    kept[:, bit, :] = coeffs[:, bit, :] / np.sqrt(prob)
    collapsed = _apply_1q(kept.reshape(-1), r, j, basis.matrix)
    return bit, PureState(r, collapsed), prob


def exact_distribution(state: PureState, basis: LocalProductBasis) -> ClassicalDistribution:
    if len(basis) != state.num_qubits:
        raise ValidationError(
            f"basis covers {len(basis)} qubits, state has {state.num_qubits}", "basis"
        )
    amps = _rotate_into(state.amplitudes, state.num_qubits, basis)
    p = np.abs(amps) ** 2
    return ClassicalDistribution(state.num_qubits, p / p.sum())


def _local_on_rows(mat: np.ndarray, r: int, ops: Sequence[np.ndarray]) -> np.ndarray:
    dim = mat.shape[1]
    out = mat
    for j, op in enumerate(ops):
        v = out.reshape(2 ** (r - 1 - j), 2, 2**j * dim)
        out = np.einsum("ab,ibk->iak", op, v).reshape(2**r, dim)
    return out


def conjugate_local(dm: DensityMatrix, ops: Sequence[np.ndarray]) -> np.ndarray:
    """L rho L^dagger for L = kron of the per-qubit ``ops`` (qubit 0 first)."""
    r = dm.num_qubits
    left = _local_on_rows(dm.entries, r, ops)
    return _local_on_rows(left.conj().T, r, ops).conj().T


def density_distribution(dm: DensityMatrix, basis: LocalProductBasis) -> ClassicalDistribution:
    """Born distribution of measuring every qubit of ``dm`` in ``basis``."""
    if len(basis) != dm.num_qubits:
        raise ValidationError(f"basis covers {len(basis)} qubits, state has {dm.num_qubits}", "basis")
    rotated = conjugate_local(dm, [b.matrix.conj().T for b in basis])
    p = np.clip(np.diagonal(rotated).real, 0.0, None)
    return ClassicalDistribution(dm.num_qubits, p / p.sum())


def partial_trace(dm: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    r = dm.num_qubits
    keep = sorted({_check_qubit(j, r, "keep") for j in keep})
    if not keep:
        raise ValidationError("keep set must be nonempty", "keep")
    if len(keep) == r:
        return dm
    t = dm.entries.reshape((2,) * (2 * r))
    # axis a of the reshaped index is qubit r-1-a
    drop = [j for j in range(r) if j not in keep]
    row_axes = [r - 1 - j for j in drop]
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:r])
    cols = list(letters[r : 2 * r])
    for a in row_axes:
        cols[a] = rows[a]
    kept_axes = [r - 1 - j for j in reversed(keep)]
    out_idx = "".join(rows[a] for a in kept_axes) + "".join(cols[a] for a in kept_axes)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out_idx, t)
    k = len(keep)
    return DensityMatrix(k, reduced.reshape(2**k, 2**k))


def single_qubit_marginal(amps: np.ndarray, r: int, j: int) -> np.ndarray:
    """2x2 reduced density matrix of qubit ``j`` of a pure state vector."""
    v = amps.reshape(2 ** (r - 1 - j), 2, 2**j)
    return np.einsum("iak,ibk->ab", v, v.conj())


def tvd(p: ClassicalDistribution, q: ClassicalDistribution) -> float:
    if p.num_bits != q.num_bits:
        raise ValidationError(f"bit-count mismatch: {p.num_bits} vs {q.num_bits}", "num_bits")
    return 0.5 * float(np.abs(p.probabilities - q.probabilities).sum())
