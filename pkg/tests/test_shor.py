import numpy as np
import pytest
from oracles import qft_by_gates

from mbqclab.criteria import SUPERFICIAL_BY_C2, classify_set, reverify
from mbqclab.errors import CapError, ValidationError
from mbqclab.mbqc import run_mbqc_exact
from mbqclab.shor import (
    ShorInstance,
    build_shor_state,
    build_shor_state_structured,
    convergent_denominators,
    dephase_final,
    extract_period,
    factor_from_period,
    multiplicative_order,
    phase_marginal,
    run_shor_pipeline,
    shor_set,
    shor_zero_discord,
)
from mbqclab.statekit import LocalProductBasis, exact_distribution, tvd


def pre_qft_vector(inst):
    N = 2**inst.nu
    psi = np.zeros(2**inst.num_qubits, dtype=complex)
    for x in range(N):
        psi[x + (pow(inst.a, x, inst.M) << inst.nu)] = N**-0.5
    return psi


def test_register_sizes():
    inst = ShorInstance(15, 7)
    assert (inst.nu, inst.n, inst.num_qubits) == (8, 4, 12)
    assert (ShorInstance(21, 5).nu, ShorInstance(21, 5).n) == (9, 5)


@pytest.mark.parametrize("M, a", [(15, 7), (15, 2), (21, 5), (21, 2)])
def test_state_matches_gate_level_qft(M, a):
    inst = ShorInstance(M, a)
    ref = qft_by_gates(pre_qft_vector(inst), inst.nu)
    assert np.abs(build_shor_state(inst).amplitudes - ref).max() < 1e-12


@pytest.mark.parametrize("M, a", [(15, 7), (15, 4), (21, 5), (33, 2), (35, 3)])
def test_structured_route_agrees(M, a):
    inst = ShorInstance(M, a)
    dense = build_shor_state(inst).amplitudes
    assert np.abs(build_shor_state_structured(inst).amplitudes - dense).max() < 1e-12


def test_phase_marginal_period_four():
    inst = ShorInstance(15, 7)
    marginal = phase_marginal(shor_zero_discord(inst).table, inst)
    assert set(marginal.support()) == {0, 64, 128, 192}
    assert np.allclose(marginal.probabilities[[0, 64, 128, 192]], 0.25)


def test_phase_marginal_period_two():
    inst = ShorInstance(15, 4)
    marginal = phase_marginal(shor_zero_discord(inst).table, inst)
    assert set(marginal.support()) == {0, 128}


@pytest.mark.parametrize("M, a", [(14, 3), (13, 2), (25, 2), (15, 5), (15, 1), (15, 15)])
def test_instance_validation(M, a):
    with pytest.raises(ValidationError):
        ShorInstance(M, a)


def test_cap():
    with pytest.raises(CapError):
        build_shor_state(ShorInstance(513, 2))


def test_extract_period_examples():
    c = extract_period(64, 8, 15, 7)
    assert (c.period, c.verified) == (4, True)
    assert not extract_period(0, 8, 15, 7).verified
    assert pow(7, 2, 15) != 1
    c = extract_period(128, 8, 15, 7)
    assert (c.period, c.verified) == (4, True)
    assert convergent_denominators(128, 8) == [1, 2]


def test_extract_period_off_peak():
    inst = ShorInstance(21, 2)
    r = multiplicative_order(2, 21)
    # nearest integer to k * 2^nu / r still yields r through the convergents
    for k in range(1, r):
        c = round(k * 2**inst.nu / r)
        cand = extract_period(c, inst.nu, 21, 2)
        assert cand.verified and cand.period % r == 0


def test_factor_examples():
    assert factor_from_period(15, 7, 4) == (3, 5)
    assert factor_from_period(15, 4, 2) == (3, 5)
    assert pow(5, 3, 21) == 20
    assert factor_from_period(21, 5, 6) is None
    assert factor_from_period(21, 2, 6) == (7, 3)
    with pytest.raises(ValidationError):
        factor_from_period(15, 7, 3)


def test_odd_period_fails():
    ShorInstance(21, 4)
    assert multiplicative_order(4, 21) == 3
    assert factor_from_period(21, 4, 3) is None


def test_pipeline_factors_fifteen():
    for a in (2, 4, 7, 8, 11, 13):
        inst = ShorInstance(15, a)
        zd = shor_zero_discord(inst)
        wins = sum(run_shor_pipeline(inst, seed, 20, zd).success for seed in range(20))
        assert wins == 20


def test_pipeline_failure_path():
    inst = ShorInstance(21, 5)
    report = run_shor_pipeline(inst, 0, 20)
    assert not report.success
    assert len(report.samples) == 20
    assert any(c.verified and c.period == 6 for c in report.candidates)


def test_pipeline_is_deterministic():
    inst = ShorInstance(15, 7)
    assert run_shor_pipeline(inst, 11).to_dict() == run_shor_pipeline(inst, 11).to_dict()


def test_dephasing_is_idle_for_computational_readout():
    inst = ShorInstance(15, 7)
    state = build_shor_state(inst)
    direct = exact_distribution(state, LocalProductBasis.computational(inst.num_qubits))
    assert tvd(dephase_final(state, inst).table, direct) < 1e-9
    prog = shor_set(inst).program(0)
    _, out = run_mbqc_exact(prog)
    assert tvd(out, phase_marginal(direct, inst)) < 1e-9


def test_shor_set_superficial_by_c2():
    inst = ShorInstance(15, 7)
    s = shor_set(inst)
    v = classify_set(s)
    assert v.status == SUPERFICIAL_BY_C2
    assert reverify(s, v)
