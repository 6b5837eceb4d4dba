import math

import numpy as np
import pytest

from wteleport.bench import state_fidelity, trial_rng
from wteleport.protocols import (
    GHZ_BM_CORRECTIONS,
    GHZ_TWO_QUBIT_CORRECTIONS,
    W_BM_CORRECTIONS,
    W_POVM_CORRECTIONS,
    CorrectionTable,
    ghz_bm_distribution,
    ghz_two_qubit_distribution,
    teleport_ghz_bm,
    teleport_ghz_two_qubit,
    teleport_w_bm,
    teleport_w_general_bm,
    teleport_w_povm,
    w_bm_distribution,
    w_general_bm_distribution,
    w_povm_distribution,
)
from wteleport.qmath import DensityMatrix, Operator, StateVector
from wteleport.states import BlochAngles, GeneralWAmplitudes, haar_random_qubit, unknown_qubit
from wteleport.wpovm import DEFAULT_PARAMS, WPovmParams

EVEN = 1.0 / math.sqrt(3.0)


def random_inputs(count, seed):
    rng = np.random.default_rng(seed)
    return [haar_random_qubit(rng)[1] for _ in range(count)]


def test_correction_table_validation():
    with pytest.raises(ValueError, match="unitary"):
        CorrectionTable({("a", None): Operator(np.diag([1.0, 0.0]), hermitian=True)})
    with pytest.raises(ValueError, match="2x2"):
        CorrectionTable({("a", None): Operator(np.eye(4), unitary=True)})
    assert len(GHZ_BM_CORRECTIONS.entries) == 8
    assert len(W_BM_CORRECTIONS.entries) == 4
    assert len(GHZ_TWO_QUBIT_CORRECTIONS.entries) == 4
    assert len(W_POVM_CORRECTIONS.entries) == 4


def test_ghz_bm_distribution_is_uniform_and_perfect(backend):
    for phi in random_inputs(5, 40):
        dist = ghz_bm_distribution(phi)
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert dist.conclusive_probability == pytest.approx(1.0, abs=1e-12)
        for b in dist.branches:
            assert b.probability == pytest.approx(1.0 / 8.0, abs=1e-12)
            assert state_fidelity(phi, b.charlie_state) == pytest.approx(1.0, abs=1e-12)


def test_ghz_two_qubit_distribution(backend):
    for phi in random_inputs(5, 41):
        dist = ghz_two_qubit_distribution(phi)
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        named = [b for b in dist.branches if not b.label.startswith("unreachable")]
        spare = [b for b in dist.branches if b.label.startswith("unreachable")]
        assert len(named) == 4 and len(spare) == 4
        for b in named:
            assert b.probability == pytest.approx(0.25, abs=1e-12)
            assert state_fidelity(phi, b.charlie_state) == pytest.approx(1.0, abs=1e-12)
        for b in spare:
            assert b.probability == pytest.approx(0.0, abs=1e-12)
            assert b.charlie_state is None


def test_w_bm_distribution_closed_forms(backend):
    for phi in random_inputs(8, 42):
        alpha2 = abs(phi.amps[0]) ** 2
        beta2 = 1.0 - alpha2
        dist = w_bm_distribution(phi)
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert dist.conclusive_probability == pytest.approx(2.0 / 3.0, abs=1e-12)
        for label in ("psi+/z-", "psi-/z-", "phi+/z-", "phi-/z-"):
            b = dist.branch(label)
            assert b.conclusive
            assert b.probability == pytest.approx(1.0 / 6.0, abs=1e-12)
            assert state_fidelity(phi, b.charlie_state) == pytest.approx(1.0, abs=1e-12)
        assert dist.branch("psi+/z+").probability == pytest.approx(alpha2 / 6.0, abs=1e-12)
        assert dist.branch("psi-/z+").probability == pytest.approx(alpha2 / 6.0, abs=1e-12)
        assert dist.branch("phi+/z+").probability == pytest.approx(beta2 / 6.0, abs=1e-12)
        assert dist.branch("phi-/z+").probability == pytest.approx(beta2 / 6.0, abs=1e-12)


def test_w_bm_failure_branches_deliver_ground_state(backend):
    phi = unknown_qubit(BlochAngles(1.1, 0.4))
    alpha2 = abs(phi.amps[0]) ** 2
    dist = w_bm_distribution(phi)
    for label in ("psi+/z+", "psi-/z+", "phi+/z+", "phi-/z+"):
        b = dist.branch(label)
        assert not b.conclusive
        assert np.allclose(np.abs(b.charlie_state.amps), [1.0, 0.0], atol=1e-12)
        assert state_fidelity(phi, b.charlie_state) == pytest.approx(alpha2, abs=1e-12)


def test_w_bm_branch_order_lists_conclusive_first():
    phi = unknown_qubit(BlochAngles(0.8, 5.1))
    labels = [b.label for b in w_bm_distribution(phi).branches]
    assert labels[:4] == ["psi+/z-", "psi-/z-", "phi+/z-", "phi-/z-"]
    assert all(label.endswith("z+") for label in labels[4:])


def test_alice_marginals(backend):
    for phi in random_inputs(5, 43):
        alpha2 = abs(phi.amps[0]) ** 2
        beta2 = 1.0 - alpha2
        dist = w_bm_distribution(phi)
        for bell_label, want in (
            ("psi+", (1.0 + alpha2) / 6.0),
            ("psi-", (1.0 + alpha2) / 6.0),
            ("phi+", (1.0 + beta2) / 6.0),
            ("phi-", (1.0 + beta2) / 6.0),
        ):
            got = sum(b.probability for b in dist.branches if b.label.startswith(bell_label + "/"))
            assert got == pytest.approx(want, abs=1e-12)


def test_w_povm_distribution(backend):
    lam = DEFAULT_PARAMS.lambda_asym
    for phi in random_inputs(5, 44):
        dist = w_povm_distribution(phi, DEFAULT_PARAMS)
        assert [b.label for b in dist.branches] == ["M1", "M2", "M3", "M4", "M5"]
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert dist.conclusive_probability == pytest.approx(lam, abs=1e-12)
        for b in dist.branches[:4]:
            assert b.conclusive
            assert b.probability == pytest.approx(lam / 4.0, abs=1e-12)
            assert state_fidelity(phi, b.charlie_state) == pytest.approx(1.0, abs=1e-10)
        tail = dist.branches[4]
        assert not tail.conclusive
        assert isinstance(tail.charlie_state, DensityMatrix)


def test_w_povm_inconclusive_state_is_input_independent(backend):
    lam = 0.4
    half_sqrt3 = math.sqrt(3.0) / 2.0
    params = WPovmParams(a=half_sqrt3, a_prime=half_sqrt3, lambda_asym=lam)
    want = np.diag([2.0 - 1.5 * lam, 1.0 - 1.5 * lam]) / (3.0 * (1.0 - lam))
    for phi in random_inputs(4, 45):
        tail = w_povm_distribution(phi, params).branch("M5")
        assert tail.probability == pytest.approx(1.0 - lam, abs=1e-12)
        assert np.allclose(tail.charlie_state.entries, want, atol=1e-12)
        alpha2 = abs(phi.amps[0]) ** 2
        f5 = (1.0 - 1.5 * lam + alpha2) / (3.0 * (1.0 - lam))
        assert state_fidelity(phi, tail.charlie_state) == pytest.approx(f5, abs=1e-12)


def test_w_general_distribution_reduces_to_even_channel(backend):
    amps = GeneralWAmplitudes(EVEN, EVEN, EVEN)
    for phi in random_inputs(4, 46):
        got = w_general_bm_distribution(phi, amps)
        want = w_bm_distribution(phi)
        assert np.allclose(got.probabilities, want.probabilities, atol=1e-12)


def test_w_general_balanced_endpoints_are_perfect(backend):
    a = 0.6
    amps = GeneralWAmplitudes(a, math.sqrt(1.0 - 2.0 * a * a), a)
    for phi in random_inputs(4, 47):
        dist = w_general_bm_distribution(phi, amps)
        assert dist.conclusive_probability == pytest.approx(2.0 * a * a, abs=1e-12)
        for b in dist.branches[:4]:
            if b.probability > 0.0:
                assert state_fidelity(phi, b.charlie_state) == pytest.approx(1.0, abs=1e-10)


def test_w_general_unbalanced_fidelity_formula(backend):
    amps = GeneralWAmplitudes(0.8, math.sqrt(0.11), 0.5)
    phi = unknown_qubit(BlochAngles(math.pi / 2.0, 0.0))
    dist = w_general_bm_distribution(phi, amps)
    assert dist.conclusive_probability == pytest.approx(0.64 + 0.25, abs=1e-12)
    want = abs(amps.a + amps.c) ** 2 / (2.0 * (abs(amps.a) ** 2 + abs(amps.c) ** 2))
    got = state_fidelity(phi, dist.branch("psi+/z-").charlie_state)
    assert got == pytest.approx(want, abs=1e-10)


def test_runners_are_deterministic_and_consistent(backend):
    phi = unknown_qubit(BlochAngles(1.9, 2.6))
    cases = (
        ("ghz-bm", lambda rng: teleport_ghz_bm(phi, rng), 3),
        ("ghz-2q", lambda rng: teleport_ghz_two_qubit(phi, rng), 2),
        ("w-bm", lambda rng: teleport_w_bm(phi, rng), 3),
        ("w-povm", lambda rng: teleport_w_povm(phi, DEFAULT_PARAMS, rng), 3),
        ("w-general-bm", lambda rng: teleport_w_general_bm(phi, GeneralWAmplitudes(EVEN, EVEN, EVEN), rng), 3),
    )
    for name, run, bits in cases:
        first = run(trial_rng(5, 0))
        second = run(trial_rng(5, 0))
        assert first.protocol == name
        assert first.classical_bits == bits
        assert first.alice_outcome == second.alice_outcome
        assert first.bob_outcome == second.bob_outcome
        assert first.fidelity == second.fidelity
        assert 0.0 <= first.fidelity <= 1.0 + 1e-12


def test_runner_outcomes_agree_with_distribution(backend):
    phi = unknown_qubit(BlochAngles(2.2, 1.3))
    dist = w_bm_distribution(phi)
    for i in range(40):
        out = teleport_w_bm(phi, trial_rng(6, i))
        branch = dist.branch(f"{out.alice_outcome}/{out.bob_outcome}")
        assert branch.conclusive == out.conclusive
        if out.conclusive:
            assert state_fidelity(phi, out.charlie_state) == pytest.approx(1.0, abs=1e-10)
            assert out.fidelity == pytest.approx(1.0, abs=1e-10)


def test_ghz_runners_always_deliver_the_input(backend):
    for i, phi in enumerate(random_inputs(10, 48)):
        for runner in (teleport_ghz_bm, teleport_ghz_two_qubit):
            out = runner(phi, trial_rng(7, i))
            assert out.conclusive
            assert out.fidelity == pytest.approx(1.0, abs=1e-12)


def test_w_povm_runner_handles_inconclusive_branch(backend):
    phi = unknown_qubit(BlochAngles(0.9, 0.0))
    seen_tail = False
    for i in range(40):
        out = teleport_w_povm(phi, DEFAULT_PARAMS, trial_rng(8, i))
        if not out.conclusive:
            seen_tail = True
            assert out.alice_outcome == "M5"
            assert isinstance(out.charlie_state, DensityMatrix)
    assert seen_tail


def test_distribution_branch_lookup():
    phi = unknown_qubit(BlochAngles(1.0, 1.0))
    dist = w_bm_distribution(phi)
    assert dist.branch("psi+/z-").label == "psi+/z-"
    with pytest.raises(KeyError):
        dist.branch("nope")
