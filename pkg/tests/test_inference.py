import numpy as np
import pytest
import scipy.sparse as sp
from scipy.special import logsumexp

from src.errors import InferenceCapError, UnsatisfiableError
from src.inference import (
    exact_marginals,
    exact_moments,
    log_partition,
    map_exact,
    map_localsearch,
    mcsat_marginals,
    mcsat_samples,
    walksat,
)
from src.network.network import GroundClause, GroundNetwork

from conftest import brute_force, holds, random_network


def _feasible_network(rng, n_atoms=8, n_clauses=14, hard_share=0.2):
    while True:
        network = random_network(rng, n_atoms, n_clauses, hard_share)
        states, _ = brute_force(network)
        if len(states):
            return network


def _brute_moments(network):
    states, scores = brute_force(network)
    probabilities = np.exp(scores - logsumexp(scores))
    counts = network.satisfied(states).astype(float) @ network.features.toarray()
    expected = probabilities @ counts
    variance = probabilities @ (counts - expected) ** 2
    return logsumexp(scores), probabilities @ states, expected, variance


def _chain_network(n_atoms, weight=1.0):
    """x1 clamped true, soft x_i => x_{i+1} and soft !x_i units."""
    atoms = tuple(holds("f", t, "a") for t in range(n_atoms))
    clauses = [GroundClause((1,), True, ("clamp",))]
    rows = []
    for i in range(1, n_atoms):
        rows.append(len(clauses))
        clauses.append(GroundClause((-i, i + 1), False, ("chain",)))
        rows.append(len(clauses))
        clauses.append(GroundClause((-(i + 1),), False, ("prior",)))
    cols = [k % 2 for k in range(len(rows))]
    features = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(clauses), 2))
    return GroundNetwork(atoms, tuple(clauses), ("chain", "prior"), features, np.asarray([weight, 0.4]))


@pytest.mark.parametrize("hard_share", [0.0, 0.25])
def test_exact_matches_brute_force(rng, hard_share):
    for _ in range(5):
        network = _feasible_network(rng, hard_share=hard_share)
        log_z, marginals, expected, variance = _brute_moments(network)
        moments = exact_moments(network)
        assert moments.log_partition == pytest.approx(log_z)
        assert np.allclose(moments.marginals, marginals)
        assert np.allclose(moments.expected_counts, expected)
        assert np.allclose(moments.count_variance, variance)


def test_elimination_matches_enumeration(rng):
    for _ in range(5):
        network = _feasible_network(rng, n_atoms=10, n_clauses=16)
        enumerated = exact_moments(network, method="enumerate")
        eliminated = exact_moments(network, method="eliminate")
        assert eliminated.log_partition == pytest.approx(enumerated.log_partition)
        assert np.allclose(eliminated.marginals, enumerated.marginals)
        assert np.allclose(eliminated.expected_counts, enumerated.expected_counts)


def test_auto_eliminates_components_beyond_cap():
    network = _chain_network(30)
    moments = exact_moments(network, cap=20)
    assert moments.marginals[0] == pytest.approx(1.0)
    assert np.all((moments.marginals > 0) & (moments.marginals <= 1))
    with pytest.raises(InferenceCapError):
        exact_moments(network, cap=20, method="enumerate")


@pytest.mark.slow
def test_auto_beyond_cap_matches_enumeration():
    network = _chain_network(21)
    eliminated = exact_moments(network, cap=20)
    enumerated = exact_moments(network, cap=21, method="enumerate")
    assert eliminated.log_partition == pytest.approx(enumerated.log_partition)
    assert np.allclose(eliminated.marginals, enumerated.marginals)


def test_isolated_atoms_are_even(rng):
    atoms = tuple(holds("f", t, "a") for t in range(3))
    network = GroundNetwork(atoms, (GroundClause((1,), True),))
    table = exact_marginals(network)
    assert table.probabilities == pytest.approx([1.0, 0.5, 0.5])
    assert log_partition(network) == pytest.approx(2 * np.log(2.0))
    assert table.probability(atoms[1]) == 0.5


def test_unit_clause_marginal():
    atoms = (holds("f", 0, "a"),)
    features = sp.csr_matrix(np.ones((1, 1)))
    network = GroundNetwork(atoms, (GroundClause((1,)),), ("w",), features, np.asarray([2.0]))
    assert exact_marginals(network).probabilities[0] == pytest.approx(np.exp(2.0) / (1 + np.exp(2.0)))


def test_contradictory_hard_clauses():
    atoms = (holds("f", 0, "a"), holds("f", 1, "a"))
    network = GroundNetwork(atoms, (GroundClause((1,), True), GroundClause((-1, 2), True), GroundClause((-2,), True)))
    with pytest.raises(UnsatisfiableError):
        exact_moments(network)
    with pytest.raises(UnsatisfiableError):
        map_exact(network)


def test_map_exact_matches_brute_force(rng):
    for _ in range(8):
        network = _feasible_network(rng, n_atoms=9, n_clauses=18)
        states, scores = brute_force(network)
        result = map_exact(network)
        assert result.hard_ok
        assert result.optimal
        assert result.score == pytest.approx(scores.max())


def test_map_exact_cap():
    with pytest.raises(InferenceCapError):
        map_exact(_chain_network(30), cap=24)


def test_map_isolated_atoms_are_false():
    atoms = tuple(holds("f", t, "a") for t in range(3))
    network = GroundNetwork(atoms, (GroundClause((2,), True),))
    assert list(map_exact(network).truth) == [False, True, False]


def test_localsearch_reaches_optimum(rng):
    for k in range(5):
        network = _feasible_network(rng, n_atoms=8, n_clauses=16)
        _, scores = brute_force(network)
        result = map_localsearch(network, flips=500, seed=k, restarts=10)
        assert result.hard_ok
        assert not result.best_effort
        assert result.score == pytest.approx(scores.max())


def test_localsearch_flags_best_effort():
    atoms = (holds("f", 0, "a"),)
    network = GroundNetwork(atoms, (GroundClause((1,), True), GroundClause((-1,), True)))
    result = map_localsearch(network, flips=50, restarts=2)
    assert result.best_effort
    assert not result.hard_ok


def test_walksat_satisfies_clauses(rng):
    clauses = [(1, 2), (-1, 3), (-2, -3), (2, 3)]
    state = walksat(clauses, 3, rng)
    assert state is not None
    for clause in clauses:
        assert any(state[abs(lit) - 1] == (lit > 0) for lit in clause)


def test_walksat_gives_up_on_unsatisfiable(rng):
    assert walksat([(1,), (-1,)], 1, rng, max_flips=100) is None


def test_mcsat_matches_exact_on_small_components(rng):
    network = _feasible_network(rng, n_atoms=7, n_clauses=12, hard_share=0.15)
    network = network.with_weights(rng.normal(0.0, 0.8, size=len(network.parameters)))
    exact = exact_marginals(network).probabilities
    sampled = mcsat_marginals(network, samples=4000, seed=3, burn_in=50)
    assert sampled.samples == 4000
    assert sampled.method == "mcsat"
    assert np.max(np.abs(sampled.probabilities - exact)) < 0.05


@pytest.mark.slow
def test_mcsat_samplesat_matches_exact():
    network = _chain_network(18)
    exact = exact_marginals(network).probabilities
    sampled = mcsat_marginals(network, samples=3000, seed=11, burn_in=100, uniform_cap=4)
    assert np.max(np.abs(sampled.probabilities - exact)) < 0.1


def test_mcsat_is_reproducible(rng):
    network = _feasible_network(rng, n_atoms=6, n_clauses=10)
    first = mcsat_samples(network, samples=200, seed=5, burn_in=10)
    again = mcsat_samples(network, samples=200, seed=5, burn_in=10)
    assert np.array_equal(first, again)


def test_mcsat_respects_hard_clauses(rng):
    network = _feasible_network(rng, n_atoms=8, n_clauses=14, hard_share=0.4)
    drawn = mcsat_samples(network, samples=300, seed=1, burn_in=20, uniform_cap=0)
    satisfied = network.satisfied(drawn)
    assert np.all(satisfied[:, network.hard_mask])


def test_mcsat_isolated_atoms_report_half():
    atoms = tuple(holds("f", t, "a") for t in range(2))
    features = sp.csr_matrix(np.ones((1, 1)))
    network = GroundNetwork(atoms, (GroundClause((1,)),), ("w",), features, np.asarray([1.0]))
    table = mcsat_marginals(network, samples=100, seed=0)
    assert table.probabilities[1] == 0.5


def test_mcsat_unsatisfiable_hard_clauses():
    atoms = (holds("f", 0, "a"),)
    network = GroundNetwork(atoms, (GroundClause((1,), True), GroundClause((-1,), True)))
    with pytest.raises(UnsatisfiableError):
        mcsat_samples(network, samples=10, uniform_cap=0)


def test_samplesat_unit_clause_marginal():
    atoms = (holds("f", 0, "a"),)
    features = sp.csr_matrix(np.ones((1, 1)))
    network = GroundNetwork(atoms, (GroundClause((1,)),), ("w",), features, np.asarray([3.0]))
    sampled = mcsat_marginals(network, samples=10000, seed=2, burn_in=50, uniform_cap=0)
    assert sampled.probabilities[0] == pytest.approx(1.0 / (1.0 + np.exp(-3.0)), abs=0.02)


def test_samplesat_free_atoms_are_fair():
    atoms = (holds("f", 0, "a"), holds("f", 1, "a"))
    features = sp.csr_matrix(([1.0], ([1], [0])), shape=(2, 1))
    clauses = (GroundClause((1,), True), GroundClause((1, 2)))
    network = GroundNetwork(atoms, clauses, ("w",), features, np.asarray([0.0]))
    drawn = mcsat_samples(network, samples=4000, seed=4, burn_in=20, uniform_cap=0)
    assert drawn.shape == (4000, 2)
    assert np.all(drawn[:, 0])
    assert drawn[:, 1].mean() == pytest.approx(0.5, abs=0.04)


@pytest.mark.slow
@pytest.mark.parametrize("uniform_cap", [16, 0])
def test_mcsat_matches_exact_on_random_networks(uniform_cap):
    rng = np.random.default_rng(97)
    for k in range(20):
        n_atoms = int(rng.integers(4, 13))
        network = _feasible_network(rng, n_atoms=n_atoms, n_clauses=int(1.5 * n_atoms), hard_share=0.1)
        exact = exact_marginals(network).probabilities
        sampled = mcsat_marginals(network, samples=10000, seed=k, burn_in=100, uniform_cap=uniform_cap)
        assert np.max(np.abs(sampled.probabilities - exact)) <= 0.05


@pytest.mark.slow
def test_map_solvers_on_random_networks():
    rng = np.random.default_rng(41)
    optimal = 0
    for k in range(100):
        n_atoms = int(rng.integers(4, 17))
        network = _feasible_network(rng, n_atoms=n_atoms, n_clauses=2 * n_atoms, hard_share=0.15)
        _, scores = brute_force(network)
        exact = map_exact(network)
        assert exact.hard_ok
        assert exact.score == pytest.approx(scores.max())
        found = map_localsearch(network, seed=k)
        optimal += found.hard_ok and found.score == pytest.approx(scores.max())
    assert optimal >= 95
