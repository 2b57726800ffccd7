"""The enumeration oracles checked against literal nested loops."""

import itertools
import math
import random

import pytest

from bucketforge import CnfTheory, TooLargeError
from bucketforge.oracle import (joint_table, oracle_belief, oracle_map,
                                oracle_meu, oracle_mpe, score_assignment,
                                score_decisions, score_hypothesis,
                                truth_table_models)
from bucketforge.randgen import (random_cnf, random_evidence,
                                 random_influence_diagram, random_network,
                                 uniform_network)


def joint_by_loops(net):
    """Probability of every complete assignment via plain iteration."""
    table = {}
    for values in itertools.product(*(range(c) for c in net.cards)):
        at = dict(enumerate(values))
        p = 1.0
        for f in net.factor_list():
            p *= f.value_at(at)
        table[values] = p
    return table


def test_joint_table_matches_loops_and_sums_to_one():
    rng = random.Random(303)
    for _ in range(20):
        net = random_network(rng, max_vars=5)
        arr = joint_table(net)
        loops = joint_by_loops(net)
        assert math.isclose(float(arr.sum()), 1.0, rel_tol=1e-9)
        for values, p in loops.items():
            assert math.isclose(float(arr[values]), p, rel_tol=1e-12)


def test_oracle_mpe_matches_loops():
    rng = random.Random(17)
    for _ in range(25):
        net = random_network(rng, max_vars=5)
        ev = random_evidence(rng, net)
        loops = joint_by_loops(net)
        best = max(p for values, p in loops.items()
                   if all(values[v] == val for v, val in ev.items()))
        value, assignment = oracle_mpe(net, ev)
        assert math.isclose(value, best, rel_tol=1e-12)
        assert math.isclose(score_assignment(net, assignment), best, rel_tol=1e-12)
        for v, val in ev.items():
            assert assignment[v] == val


def test_oracle_map_matches_loops():
    rng = random.Random(19)
    for _ in range(25):
        net = random_network(rng, max_vars=5)
        ev = random_evidence(rng, net)
        hyp = sorted(rng.sample(range(net.n), rng.randint(1, net.n)))
        loops = joint_by_loops(net)
        totals = {}
        for values, p in loops.items():
            if all(values[v] == val for v, val in ev.items()):
                key = tuple(values[v] for v in hyp)
                totals[key] = totals.get(key, 0.0) + p
        best = max(totals.values())
        value, assignment = oracle_map(net, hyp, ev)
        assert math.isclose(value, best, rel_tol=1e-9)
        assert math.isclose(score_hypothesis(net, assignment, ev), best,
                            rel_tol=1e-9)


def test_oracle_belief_matches_loops():
    rng = random.Random(23)
    for _ in range(25):
        net = random_network(rng, max_vars=5)
        query = rng.randrange(net.n)
        ev = random_evidence(rng, net, exclude=[query])
        loops = joint_by_loops(net)
        masses = [0.0] * net.cards[query]
        for values, p in loops.items():
            if all(values[v] == val for v, val in ev.items()):
                masses[values[query]] += p
        total = sum(masses)
        belief, mass = oracle_belief(net, query, ev)
        assert math.isclose(mass, total, rel_tol=1e-9)
        for got, want in zip(belief, masses):
            assert math.isclose(got, want / total, rel_tol=1e-9)


def test_oracle_meu_matches_loops():
    rng = random.Random(29)
    for _ in range(25):
        diagram = random_influence_diagram(rng, max_vars=5)
        ev = random_evidence(rng, diagram.network, exclude=diagram.decisions)
        chance = [v for v in range(diagram.n) if v not in diagram.decisions]
        best = None
        for dec in itertools.product(*(range(diagram.cards[d])
                                       for d in diagram.decisions)):
            pinned = dict(zip(diagram.decisions, dec))
            mass = 0.0
            weighted = 0.0
            for values in itertools.product(*(range(diagram.cards[v])
                                              for v in chance)):
                at = {**pinned, **dict(zip(chance, values))}
                if any(at[v] != val for v, val in ev.items()):
                    continue
                p = 1.0
                for f in diagram.chance_factors():
                    p *= f.value_at(at)
                u = sum(f.value_at(at) for f in diagram.utilities)
                mass += p
                weighted += p * u
            if mass > 0 and (best is None or weighted / mass > best):
                best = weighted / mass
        value, assignment = oracle_meu(diagram, ev)
        assert math.isclose(value, best, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(score_decisions(diagram, assignment, ev), best,
                            rel_tol=1e-9, abs_tol=1e-9)


def test_dominance_chain_mpe_below_map_below_evidence_mass():
    rng = random.Random(31)
    for _ in range(30):
        net = random_network(rng, max_vars=6)
        ev = random_evidence(rng, net)
        hyp = sorted(rng.sample(range(net.n), rng.randint(1, net.n)))
        mpe_value, _ = oracle_mpe(net, ev)
        map_value, _ = oracle_map(net, hyp, ev)
        _, mass = oracle_belief(net, rng.randrange(net.n), ev)
        assert mpe_value <= map_value + 1e-12
        assert map_value <= mass + 1e-12
        assert mass <= 1.0 + 1e-12


def test_truth_table_matches_loops():
    rng = random.Random(37)
    for _ in range(30):
        theory = random_cnf(rng, max_props=6)
        models = truth_table_models(theory)
        for values in itertools.product((False, True), repeat=theory.num_props):
            ok = all(any((lit > 0) == values[abs(lit) - 1] for lit in clause)
                     for clause in theory.clauses)
            assert (values in models) == ok


def test_oracles_guard_against_oversized_models():
    net = uniform_network((2,) * 21)
    with pytest.raises(TooLargeError):
        joint_table(net)
    with pytest.raises(TooLargeError):
        truth_table_models(CnfTheory(21, ()))
