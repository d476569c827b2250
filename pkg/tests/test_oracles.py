import numpy as np
import pytest

from cohdist import (
    DimensionTooLargeError,
    IncompletePlanError,
    PureStateVector,
    branch_probabilities,
    brute_subspaces,
    full_plan,
    maximal_pure_subspaces,
    random_block_state,
    random_mixture_state,
    random_pure_state,
    simulate,
    validate_density,
)
from cohdist.distill import DistillationPlan, PlanBranch, StrictlyIncoherentKraus


def test_brute_subspaces_block_example(block_mixture):
    subs = brute_subspaces(block_mixture)
    assert [s.indices for s in subs] == [(0, 1), (2,)]
    assert subs[0].weight == pytest.approx(0.5, abs=1e-12)


def test_brute_subspaces_respects_dimension_cap():
    big = validate_density(np.eye(17) / 17)
    with pytest.raises(DimensionTooLargeError):
        brute_subspaces(big)


def test_brute_subspaces_pure_state_is_single_block():
    psi = PureStateVector.from_probabilities(np.array([0.5, 0.3, 0.2]))
    rho = validate_density(np.outer(psi.amplitudes, psi.amplitudes.conj()))
    subs = brute_subspaces(rho)
    assert [s.indices for s in subs] == [(0, 1, 2)]


def test_brute_matches_planted_blocks():
    rng = np.random.default_rng(13)
    for _ in range(20):
        rho, truth = random_block_state(rng, 6)
        assert [s.indices for s in brute_subspaces(rho)] == truth


def test_random_pure_state_support_is_exact():
    rng = np.random.default_rng(2)
    for _ in range(50):
        support = sorted(rng.choice(8, size=3, replace=False).tolist())
        psi = random_pure_state(rng, 8, support=support)
        assert list(psi.support()) == support


def test_random_mixture_state_is_valid():
    rng = np.random.default_rng(4)
    for dim in (2, 5, 8):
        rho = random_mixture_state(rng, dim)
        assert rho.dim == dim  # validation already ran in the constructor


# ------------------------------------------------------------- simulation

def test_branch_probabilities_sum_to_pmax(block_mixture, uniform_qubit_target):
    plan = full_plan(block_mixture, uniform_qubit_target)
    probs = branch_probabilities(plan, block_mixture)
    assert probs.sum() == pytest.approx(plan.p_max, abs=1e-9)


def test_simulate_is_reproducible(block_mixture, uniform_qubit_target):
    plan = full_plan(block_mixture, uniform_qubit_target)
    a = simulate(plan, block_mixture, shots=50000, seed=123)
    b = simulate(plan, block_mixture, shots=50000, seed=123)
    assert a == b
    c = simulate(plan, block_mixture, shots=50000, seed=124)
    assert c.successes != a.successes  # different stream actually used


def test_simulate_bookkeeping(block_mixture, uniform_qubit_target):
    plan = full_plan(block_mixture, uniform_qubit_target)
    res = simulate(plan, block_mixture, shots=10000, seed=9)
    assert res.successes + res.failure_count == res.shots
    assert sum(res.per_branch_counts.values()) == res.successes
    assert res.empirical_probability == pytest.approx(res.successes / res.shots)
    assert res.analytic_probability == pytest.approx(0.1, abs=1e-9)
    assert res.rng_algorithm == "Philox4x64"
    expected_se = np.sqrt(
        res.empirical_probability * (1 - res.empirical_probability) / res.shots
    )
    assert res.standard_error == pytest.approx(expected_se, abs=1e-15)


def test_simulate_agrees_with_analytic_at_four_sigma(witness_pair):
    psi, phi = witness_pair
    rho = validate_density(np.outer(psi.amplitudes, psi.amplitudes.conj()))
    plan = full_plan(rho, phi)
    for seed in range(5):
        res = simulate(plan, rho, shots=200000, seed=seed)
        sigma = max(res.standard_error, 1e-12)
        assert abs(res.empirical_probability - res.analytic_probability) < 4 * sigma


def test_simulate_requires_shots():
    psi = PureStateVector.from_probabilities(np.array([0.6, 0.4]))
    rho = validate_density(np.outer(psi.amplitudes, psi.amplitudes.conj()))
    phi = PureStateVector.from_probabilities(np.array([0.5, 0.5]))
    plan = full_plan(rho, phi)
    with pytest.raises(Exception):
        simulate(plan, rho, shots=0, seed=1)


def test_simulate_rejects_overcomplete_plan(block_mixture):
    # duplicate the lone branch: sum K'K exceeds the identity
    plan = full_plan(
        block_mixture,
        PureStateVector(np.array([1, 1, 0], dtype=complex) / np.sqrt(2)),
    )
    k = plan.branches[0].kraus
    dup = DistillationPlan(
        dim=plan.dim,
        p_max=plan.p_max,
        branches=(
            PlanBranch("a", k, plan.branches[0].probability),
            PlanBranch("b", StrictlyIncoherentKraus.from_matrix(np.eye(3)), 1.0),
        ),
        family_index_sets=plan.family_index_sets,
    )
    with pytest.raises(IncompletePlanError):
        simulate(dup, block_mixture, shots=10, seed=0)


# ------------------------------------------- cross-checking the two methods

def test_brute_and_clique_methods_agree_broadly():
    rng = np.random.default_rng(515)
    for dim in range(2, 8):
        for _ in range(25):
            rho = random_mixture_state(rng, dim)
            fast = maximal_pure_subspaces(rho)
            slow = brute_subspaces(rho)
            assert [s.indices for s in fast] == [s.indices for s in slow]
            for f, s in zip(fast, slow):
                assert f.weight == pytest.approx(s.weight, abs=1e-9)
                assert np.allclose(
                    np.abs(f.state.amplitudes), np.abs(s.state.amplitudes), atol=1e-8
                )
