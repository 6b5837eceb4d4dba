import math

import numpy as np
import pytest

from wteleport.measurement import validate_povm
from wteleport.states import haar_random_qubit, w
from wteleport.wpovm import (
    DEFAULT_PARAMS,
    POVM_LABELS,
    SQRT3_2,
    WPovmParams,
    build_w_povm,
    conclusive_branch_states,
    lambda_max,
    measurement_family,
    w_dual_basis,
    w_primal_basis,
)

def test_primal_vectors_unit_norm_but_not_orthogonal():
    primal = w_primal_basis()
    assert len(primal) == 4
    for v in primal:
        assert np.vdot(v, v).real == pytest.approx(1.0, abs=1e-14)
    assert np.vdot(primal[0], primal[1]) == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert np.vdot(primal[0], primal[2]) == pytest.approx(0.0, abs=1e-14)


def test_first_primal_vector_is_the_channel_state():
    assert np.allclose(w_primal_basis()[0], w().amps, atol=1e-15)


def test_duality_holds_for_random_weights():
    rng = np.random.default_rng(30)
    for _ in range(25):
        a, a_prime = rng.uniform(0.3, 2.0, size=2)
        fam = measurement_family(a, a_prime)
        for i, d in enumerate(fam.dual):
            for j, p in enumerate(fam.primal):
                want = 1.0 if i == j else 0.0
                assert abs(np.vdot(d, p) - want) < 1e-10


def test_dual_basis_rejects_nonpositive_weights():
    with pytest.raises(ValueError, match="positive"):
        w_dual_basis(0.0, 1.0)
    with pytest.raises(ValueError, match="positive"):
        w_dual_basis(1.0, -0.5)


def test_total_state_expands_over_primal_branches():
    # phi (x) channel = (1/2) sum_i primal_i (x) branch_i even though the
    # primal vectors are not orthogonal.
    rng = np.random.default_rng(31)
    primal = w_primal_basis()
    for _ in range(10):
        _, phi = haar_random_qubit(rng)
        total = np.kron(phi.amps, w().amps)
        branches = conclusive_branch_states(phi)
        expansion = sum(np.kron(primal[i], branches[i]) for i in range(4)) / 2.0
        assert np.allclose(total, expansion, atol=1e-12)


def test_lambda_max_plateau_and_tail():
    assert lambda_max(0.2) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert lambda_max(SQRT3_2) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert lambda_max(1.0) == pytest.approx(1.0 / (4.0 - 2.0 * math.sqrt(3.0) + 1.5), abs=1e-15)
    assert lambda_max(2.0) == pytest.approx(1.0 / (16.0 - 4.0 * math.sqrt(3.0) + 1.5), abs=1e-15)
    # continuous at the junction, strictly decreasing past it
    eps = 1e-9
    assert lambda_max(SQRT3_2 + eps) == pytest.approx(2.0 / 3.0, abs=1e-7)
    assert lambda_max(1.2) < lambda_max(1.0) < lambda_max(SQRT3_2)
    with pytest.raises(ValueError, match="positive"):
        lambda_max(0.0)


def test_params_validation_and_feasibility():
    with pytest.raises(ValueError, match="positive"):
        WPovmParams(a=0.0, a_prime=1.0, lambda_asym=0.5)
    with pytest.raises(ValueError, match="lambda"):
        WPovmParams(a=1.0, a_prime=1.0, lambda_asym=0.0)
    with pytest.raises(ValueError, match="lambda"):
        WPovmParams(a=1.0, a_prime=1.0, lambda_asym=1.2)
    assert DEFAULT_PARAMS.feasible
    assert WPovmParams(a=1.0, a_prime=1.0, lambda_asym=0.49).feasible
    assert not WPovmParams(a=1.0, a_prime=1.0, lambda_asym=0.50).feasible
    # the weaker weight constrains the pair
    assert not WPovmParams(a=SQRT3_2, a_prime=2.0, lambda_asym=0.5).feasible


def test_build_w_povm_at_the_optimum():
    povm = build_w_povm(DEFAULT_PARAMS)
    assert povm.labels == POVM_LABELS
    report = validate_povm(povm)
    assert report.passed
    # the remainder element is exactly on the positivity boundary
    assert report.min_eigenvalues[4] == pytest.approx(0.0, abs=1e-12)


def test_build_w_povm_rejects_infeasible_scale():
    with pytest.raises(ValueError, match="infeasible"):
        build_w_povm(WPovmParams(a=1.0, a_prime=1.0, lambda_asym=0.6))


def test_conclusive_probabilities_are_input_independent(backend):
    from wteleport import _kernels

    rng = np.random.default_rng(32)
    for params in (DEFAULT_PARAMS, WPovmParams(a=1.0, a_prime=0.7, lambda_asym=0.45)):
        povm = build_w_povm(params)
        lam = params.lambda_asym
        for _ in range(5):
            _, phi = haar_random_qubit(rng)
            total = np.kron(phi.amps, w().amps)
            probs = _kernels.expectations(total, povm._stack, (0, 1, 2), 4)
            assert np.allclose(probs[:4], lam / 4.0, atol=1e-12)
            assert probs[4] == pytest.approx(1.0 - lam, abs=1e-12)


def test_conclusive_branch_states_match_kraus_collapse():
    from wteleport import _kernels
    from wteleport.qmath import StateVector

    povm = build_w_povm(DEFAULT_PARAMS)
    rng = np.random.default_rng(33)
    _, phi = haar_random_qubit(rng)
    total = np.kron(phi.amps, w().amps)
    expected = conclusive_branch_states(phi)
    for i in range(4):
        post = _kernels.apply_matrix(total, povm.kraus[i], (0, 1, 2), 4)
        post = post / np.sqrt(np.vdot(post, post).real)
        charlie = _kernels.reduced_density(post, (3,), 4)
        want = expected[i] / np.linalg.norm(expected[i])
        overlap = (want.conj() @ charlie @ want).real
        assert overlap == pytest.approx(1.0, abs=1e-10)


def test_scale_bound_is_tight():
    for a in (0.2, 0.5, SQRT3_2, 0.9, 1.3, 2.0, 2.8):
        duals = w_dual_basis(a, a)
        overlap = sum(np.outer(d, d.conj()) for d in duals)

        def min_eig(lam):
            return float(np.linalg.eigvalsh(np.eye(8) - lam * overlap)[0])

        bound = lambda_max(a)
        assert min_eig(bound) >= -1e-9
        assert min_eig(1.02 * bound) < -1e-6


def test_build_w_povm_on_the_tail_boundary():
    bound = lambda_max(2.0)
    povm = build_w_povm(WPovmParams(a=2.0, a_prime=2.0, lambda_asym=bound))
    report = validate_povm(povm)
    assert report.passed
    assert -1e-10 <= report.min_eigenvalues[4] <= 1e-3
