import numpy as np
import pytest

from src.compiler import InertiaPolicy, InertiaVariant, compile_kb
from src.errors import EvidenceContradictionError, KBSyntaxError
from src.importer import load_scenario
from src.kb.parser import parse_kb
from src.network.grounder import NARRATIVE_SOURCE, ground, network_stats, query_atoms
from src.network.network import GroundNetwork
from src.recognition.simulate import simulate

from conftest import INERTIA_KB, holds, random_network


@pytest.fixture(scope="module")
def fig1(meeting_kb):
    spec = load_scenario("fig1")
    return simulate(spec.model_copy(update={"annotation": "none"}), kb=meeting_kb)


def test_one_atom_per_fluent_and_time(meeting_kb, narrative_of):
    ckb = compile_kb(meeting_kb)
    for horizon in (0, 3, 7):
        network = ground(ckb, narrative_of(meeting_kb, f"@horizon {horizon}\n"))
        assert network.atom_count == 8 * (horizon + 1)
        assert network.atoms == query_atoms(ckb, horizon)


def test_query_atoms_sorted_by_fluent_then_time(inertia_kb):
    atoms = query_atoms(compile_kb(inertia_kb), 2)
    assert atoms == tuple(holds("tracked", t, "a") for t in range(3))


def test_clause_count_is_affine_in_horizon(meeting_kb, narrative_of):
    ckb = compile_kb(meeting_kb, InertiaPolicy(variant=InertiaVariant.SI))
    counts, raw = [], []
    for horizon in (2, 3, 4, 5):
        network = ground(ckb, narrative_of(meeting_kb, f"@horizon {horizon}\n"))
        counts.append(network.clause_count)
        raw.append(sum(network.raw_counts.values()))
    assert len(set(np.diff(counts))) == 1
    assert len(set(np.diff(raw))) == 1


def test_evidence_reduces_effect_rule_to_unit_clause(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    target = network.atom_index()[holds("meeting", 4, "id1", "id2")] + 1
    units = [k for k, c in enumerate(network.clauses) if c.literals == (target,)]
    assert len(units) == 1
    clause = network.clauses[units[0]]
    assert not clause.hard
    assert clause.source == "meeting:effect_holds:1"
    assert network.clause_weights[units[0]] == pytest.approx(1.0)


def test_only_holds_at_atoms_remain(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    for clause in network.clauses:
        assert clause.literals
        assert all(1 <= abs(lit) <= network.atom_count for lit in clause.literals)


def test_initial_state_becomes_hard_unit_clause(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    atom = network.atom_index()[holds("meeting", 0, "id1", "id2")] + 1
    clamps = [c for c in network.clauses if c.literals == (-atom,)]
    assert len(clamps) == 1
    assert clamps[0].hard
    assert NARRATIVE_SOURCE in clamps[0].sources


def test_split_formula_carries_fraction_of_weight(meeting_kb, narrative_of):
    ckb = compile_kb(meeting_kb, InertiaPolicy(variant=InertiaVariant.SI, initial_weight=2.0))
    network = ground(ckb, narrative_of(meeting_kb, "@horizon 2\n"))
    column = network.parameters.index("meeting:inertia_holds")
    rows = [k for k, c in enumerate(network.clauses) if "meeting:inertia_holds" in c.sources]
    assert rows
    for row in rows:
        assert network.features[row, column] == pytest.approx(0.5)
        assert network.clause_weights[row] == pytest.approx(1.0)


def test_hard_clauses_have_no_features(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    hard_rows = np.flatnonzero(network.hard_mask)
    assert len(hard_rows)
    assert network.features[hard_rows].nnz == 0


def test_counts_follow_features(rng):
    network = random_network(rng, 6, 10)
    state = rng.random(6) < 0.5
    satisfied = network.satisfied(state)
    assert np.allclose(network.counts(state), network.features.T @ satisfied.astype(float))
    assert network.score(state) == pytest.approx(float(network.clause_weights @ satisfied))


def test_evidence_falsifying_hard_constraint(narrative_of):
    kb = parse_kb(INERTIA_KB + "hard !happens(start(X), T) v !happens(stop(X), T).\n")
    narrative = narrative_of(kb, "happens(start(a),1)\nhappens(stop(a),1)\n")
    with pytest.raises(EvidenceContradictionError) as info:
        ground(compile_kb(kb), narrative)
    assert info.value.source == "constraint:1"


def test_network_stats(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    stats = network_stats(network)
    assert stats.atom_count == 8 * 31
    assert sum(stats.per_formula.values()) == stats.clause_count == network.clause_count
    assert stats.hard_count == int(network.hard_mask.sum())
    assert stats.raw_clause_count >= stats.clause_count - stats.per_formula.get(NARRATIVE_SOURCE, 0)
    frame = stats.to_frame()
    assert set(frame["FORMULA"]) >= set(stats.per_formula)


def test_components_partition_atoms(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb), fig1)
    components = network.components()
    covered = np.sort(np.concatenate([c.atoms for c in components]))
    assert np.array_equal(covered, np.arange(network.atom_count))
    assert sum(len(c.clauses) for c in components) == network.clause_count


def test_text_format_round_trip(meeting_kb, fig1):
    network = ground(compile_kb(meeting_kb, InertiaPolicy(variant=InertiaVariant.SI_EQ)), fig1)
    again = GroundNetwork.from_text(network.to_text())
    assert again.atoms == network.atoms
    assert again.clauses == network.clauses
    assert again.parameters == network.parameters
    assert np.allclose(again.weights, network.weights)
    assert np.allclose(again.features.toarray(), network.features.toarray())


def test_text_format_rejects_unknown_records():
    with pytest.raises(KBSyntaxError):
        GroundNetwork.from_text("p w 1.0\nx 1 2\n")
