import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import (
    adaptive_distribution,
    product_distribution,
    random_state,
    random_unitary,
)

from mbqclab.discord import (
    DISCORDANT,
    INCONCLUSIVE,
    ZERO_DISCORD,
    ZeroDiscordState,
    classical_replacement_batch,
    classical_replacement_exact,
    classical_replacement_run,
    dephase,
    dephase_circuit_final,
    is_zero_discord,
    perbit_map,
    perbit_matrix,
    pure_state_zero_discord,
)
from mbqclab.errors import ValidationError
from mbqclab.iqp import IqpCircuit, random_iqp_instance, simulate_iqp
from mbqclab.mbqc import (
    build_graph_state,
    compile_iqp_to_mbqc,
    compiled_bases,
    dephased_program,
    run_mbqc_exact,
    transcript_distribution,
)
from mbqclab.schedule import (
    AdaptiveTable,
    AffinePost,
    MeasurementStep,
    Schedule,
    identity_post,
)
from mbqclab.statekit import (
    ClassicalDistribution,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    init_plus_state,
    make_rng,
    product_state,
    single_qubit_marginal,
    tvd,
)


def random_basis(rng, r):
    return LocalProductBasis(tuple(QubitBasis(random_unitary(rng)) for _ in range(r)))


def random_zd(rng, r, sparse=False):
    p = rng.dirichlet(np.ones(2**r))
    if sparse:
        p[rng.random(2**r) < 0.5] = 0
        p[0] += 1e-3
        p /= p.sum()
    return ZeroDiscordState(random_basis(rng, r), ClassicalDistribution(r, p))


def random_schedule(rng, r, adaptive):
    order = [int(q) for q in rng.permutation(r)]
    steps, oracle = [], []
    for pos, q in enumerate(order):
        if adaptive and pos:
            depth = min(pos, 2)
            keys = [""] + ["".join(map(str, k)) for d in range(1, depth + 1) for k in np.ndindex(*(2,) * d)]
            table = {k: QubitBasis(random_unitary(rng)) for k in keys}
            steps.append(MeasurementStep(q, rule=AdaptiveTable(table)))
            oracle.append((q, (lambda t: lambda h: t(h).matrix)(AdaptiveTable(table))))
        else:
            b = QubitBasis(random_unitary(rng))
            steps.append(MeasurementStep(q, b))
            oracle.append((q, (lambda m: lambda h: m)(b.matrix)))
    return Schedule(tuple(steps)), oracle


def test_dephase_examples():
    zd = dephase(init_plus_state(1), LocalProductBasis.computational(1))
    assert zd.table.to_mapping() == pytest.approx({"0": 0.5, "1": 0.5})
    rng = np.random.default_rng(1)
    psi = PureState(3, random_state(rng, 3))
    basis = random_basis(rng, 3)
    once = dephase(psi, basis)
    twice = dephase(once.densify(), basis)
    assert np.abs(once.table.probabilities - twice.table.probabilities).max() < 1e-12


def test_dephase_matches_kron_oracle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        r = int(rng.integers(1, 7))
        psi = random_state(rng, r)
        basis = random_basis(rng, r)
        ref = product_distribution(psi, [(b.vector(0), b.vector(1)) for b in basis])
        assert np.abs(dephase(PureState(r, psi), basis).table.probabilities - ref).max() < 1e-12


def test_dephased_graph_state_matches_transcripts():
    for seed in range(10):
        c = random_iqp_instance(seed, 1, 3, 3)
        zd = dephase(build_graph_state(c.zset, c.nu).state, compiled_bases(c))
        transcripts, _ = run_mbqc_exact(compile_iqp_to_mbqc(c))
        assert tvd(zd.table, transcripts) < 1e-12


def test_dephase_circuit_final_examples():
    assert dephase_circuit_final(IqpCircuit(1, 2, ()), 0).table.point() == 0
    zd = dephase_circuit_final(IqpCircuit(1, 1, ((1, math.pi / 3),)), 0)
    assert np.allclose(zd.table.probabilities, [0.25, 0.75])


def test_zero_discord_state_validation():
    with pytest.raises(ValidationError):
        ZeroDiscordState(LocalProductBasis.computational(2), ClassicalDistribution.point_mass(0, 3))


def test_densify_is_diagonal_in_its_basis():
    rng = np.random.default_rng(3)
    zd = random_zd(rng, 3)
    rho = zd.densify().entries
    b = zd.basis.matrix()
    rotated = b.conj().T @ rho @ b
    assert np.abs(rotated - np.diag(zd.table.probabilities)).max() < 1e-12


def test_detector_examples():
    v = PureState.basis_state(0b01, 2).density_matrix()
    verdict = is_zero_discord(v)
    assert verdict.status == ZERO_DISCORD
    assert verdict.basis.equivalent(LocalProductBasis.computational(2))
    bell = PureState.from_amplitudes(np.array([1, 0, 0, 1]) / math.sqrt(2)).density_matrix()
    assert is_zero_discord(bell).status == DISCORDANT


def _recovers(verdict, basis):
    free = set(verdict.witness.get("free_qubits", []))
    return all(j in free or a.equivalent_up_to_relabel(b, 1e-6) for j, (a, b) in enumerate(zip(verdict.basis, basis)))


def test_detector_on_dephase_outputs():
    rng = np.random.default_rng(4)
    for _ in range(100):
        r = int(rng.integers(1, 5))
        zd = random_zd(rng, r, sparse=bool(rng.integers(2)))
        verdict = is_zero_discord(zd.densify())
        assert verdict.status == ZERO_DISCORD
        assert _recovers(verdict, zd.basis)
        rotated = verdict.basis.matrix().conj().T @ zd.densify().entries @ verdict.basis.matrix()
        assert np.abs(rotated - np.diag(np.diag(rotated))).max() < 1e-9


def test_detector_on_dephased_graph_states():
    for seed in range(20):
        c = random_iqp_instance(seed, 1, 3, int(seed % 3) + 1)
        zd = dephased_program(c).pre_state
        verdict = is_zero_discord(zd.densify())
        assert verdict.status == ZERO_DISCORD
        assert _recovers(verdict, zd.basis)


def test_detector_on_entangled_pure_states():
    rng = np.random.default_rng(5)
    count = 0
    while count < 100:
        r = int(rng.integers(2, 5))
        psi = PureState(r, random_state(rng, r))
        purities = [np.trace(np.linalg.matrix_power(_marg(psi, j), 2)).real for j in range(r)]
        if max(purities) > 1 - 1e-6:
            continue
        count += 1
        assert is_zero_discord(psi.density_matrix()).status == DISCORDANT
        assert pure_state_zero_discord(psi).status == DISCORDANT


def _marg(psi, j):
    return single_qubit_marginal(psi.amplitudes, psi.num_qubits, j)


def test_detector_degenerate_marginals():
    # classically correlated, maximally mixed marginals
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    v = is_zero_discord(DensityMatrix(2, rho))
    assert v.status == ZERO_DISCORD and v.basis.equivalent(LocalProductBasis.computational(2))
    # the same correlations in the X basis
    xx = LocalProductBasis((QubitBasis.x(), QubitBasis.x()))
    zd = ZeroDiscordState(xx, ClassicalDistribution.from_mapping({"00": 0.5, "11": 0.5}, 2))
    v = is_zero_discord(zd.densify())
    assert v.status == ZERO_DISCORD and _recovers(v, xx)
    # maximally mixed: every qubit is free
    v = is_zero_discord(DensityMatrix(2, np.eye(4) / 4))
    assert v.status == ZERO_DISCORD and v.witness["free_qubits"] == [0, 1]


def test_detector_mixed_discordant_states():
    # Werner state with degenerate marginals
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    werner = 0.5 * np.outer(bell, bell) + 0.5 * np.eye(4) / 4
    assert is_zero_discord(DensityMatrix(2, werner)).status == DISCORDANT
    # classical on one side only: |0><0| x |0><0| and |1><1| x |+><+|
    plus = np.array([1, 1]) / math.sqrt(2)
    a = np.kron(np.diag([1, 0]), np.diag([1, 0]))
    b = np.kron(np.outer(plus, plus), np.diag([0, 1]))
    assert is_zero_discord(DensityMatrix(2, 0.5 * a + 0.5 * b)).status == DISCORDANT


def test_detector_never_inconclusive_on_generic_states():
    rng = np.random.default_rng(6)
    for _ in range(50):
        r = int(rng.integers(1, 5))
        w = rng.dirichlet(np.ones(3))
        rho = sum(wk * np.outer(v, v.conj()) for wk, v in zip(w, (random_state(rng, r) for _ in range(3))))
        assert is_zero_discord(DensityMatrix(r, rho)).status != INCONCLUSIVE


def test_pure_state_detector_scales():
    rng = np.random.default_rng(7)
    vectors = [random_unitary(rng)[:, 0] for _ in range(18)]
    verdict = pure_state_zero_discord(product_state(vectors))
    assert verdict.status == ZERO_DISCORD
    assert all(max(abs(np.vdot(b.vector(k), v)) for k in (0, 1)) > 1 - 1e-9 for b, v in zip(verdict.basis, vectors))


def test_perbit_examples():
    z, x = QubitBasis.computational(), QubitBasis.x()
    assert np.allclose(perbit_map(z, 0, x), [0.5, 0.5])
    assert np.allclose(perbit_map(x, 1, x), [0, 1])
    assert np.allclose(perbit_map(z, 0, z), [1, 0])
    for theta in (0.1, 0.7, 2.0):
        assert np.allclose(perbit_map(z, 0, QubitBasis.zx(theta)), [math.cos(theta) ** 2, math.sin(theta) ** 2])


def test_perbit_rows_sum_to_one():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        m = perbit_matrix(0, QubitBasis(random_unitary(rng)), QubitBasis(random_unitary(rng))).matrix
        assert np.abs(m.sum(axis=1) - 1).max() < 1e-12


def test_replacement_in_stored_basis_returns_m():
    rng = np.random.default_rng(9)
    zd = random_zd(rng, 3)
    sched = Schedule.fixed(zd.basis, [1, 2, 0])
    for index in range(20):
        out = classical_replacement_run(zd, sched, identity_post(3), 42, index)
        u = make_rng(42).random((index + 1) * 4)[index * 4]
        assert out.transcript == int(zd.table.sample([u])[0])


@given(st.integers(1, 6), st.booleans(), st.integers(0, 2**32 - 1))
def test_replacement_matches_quantum_measurement(r, adaptive, seed):
    rng = np.random.default_rng(seed)
    zd = random_zd(rng, r, sparse=True)
    sched, oracle = random_schedule(rng, r, adaptive)
    post = AffinePost(r, tuple(int(m) for m in rng.integers(0, 2**r, size=2)), int(rng.integers(4)))
    classical_t, classical_out = classical_replacement_exact(zd, sched, post)
    quantum_t = transcript_distribution(zd.densify(), sched)
    assert tvd(classical_t, quantum_t) < 1e-9
    if r <= 3:
        ref = adaptive_distribution(zd.densify().entries, oracle)
        assert np.abs(classical_t.probabilities - ref).max() < 1e-9


def test_replacement_pipeline_on_dephased_graph_state():
    for seed in range(10):
        c = random_iqp_instance(seed, 1, 3, 3)
        prog = dephased_program(c)
        _, exact = classical_replacement_exact(prog.pre_state, prog.schedule, prog.post)
        _, quantum = run_mbqc_exact(compile_iqp_to_mbqc(c))
        assert tvd(exact, quantum) < 1e-9
        assert tvd(exact, simulate_iqp(c)) < 1e-9


def test_replacement_sampling_three_sigma():
    c = IqpCircuit(1, 2, ((0b01, math.pi / 3), (0b11, math.pi / 8)))
    prog = dephased_program(c)
    target = simulate_iqp(c).probabilities
    runs = classical_replacement_batch(prog.pre_state, prog.schedule, prog.post, 31, 50_000)
    freq = np.bincount([o.output for o in runs], minlength=4) / len(runs)
    sigma = np.sqrt(target * (1 - target) / len(runs))
    assert np.all(np.abs(freq - target) <= 3 * sigma + 1e-12)


def test_replacement_width_checks():
    zd = random_zd(np.random.default_rng(1), 2)
    with pytest.raises(ValidationError):
        classical_replacement_exact(zd, Schedule.fixed(LocalProductBasis.computational(3)), identity_post(3))
