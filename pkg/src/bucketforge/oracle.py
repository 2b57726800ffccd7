"""Reference answers by exhaustive enumeration.

Everything here builds the full joint table, so instances are capped at
2**20 cells (2**20 rows for truth tables).  Tie-breaking mirrors the
engines exactly: argmax scans run in the engine's ordering coordinates and
numpy's first-occurrence rule picks the lexicographically smallest winner.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import TooLargeError, ZeroMassError
from .model import BeliefNetwork, CnfTheory, Evidence, InfluenceDiagram

CELL_LIMIT = 1 << 20


def _guard(cards: Sequence[int]) -> None:
    cells = 1
    for c in cards:
        cells *= c
    if cells > CELL_LIMIT:
        raise TooLargeError(f"joint table would hold {cells} cells (cap {CELL_LIMIT})")


def joint_table(net: BeliefNetwork) -> np.ndarray:
    """Product of all conditional tables, one axis per variable id."""
    _guard(net.cards)
    scope = list(range(net.n))
    acc = np.ones(net.cards)
    for f in net.factor_list():
        acc = acc * f.aligned_values(scope)
    return acc


def _collapse_evidence(arr: np.ndarray, remaining: list[int],
                       evidence: Evidence) -> np.ndarray:
    for var, val in evidence.items():
        if var in remaining:
            arr = arr.take(val, axis=remaining.index(var))
            remaining.remove(var)
    return arr


def _lex_argmax(arr: np.ndarray, remaining: list[int],
                coord_order: Sequence[int]) -> dict[int, int]:
    """First maximizing cell when axes are scanned in ``coord_order``."""
    axes_vars = [v for v in coord_order if v in remaining]
    assert sorted(axes_vars) == sorted(remaining)
    view = arr.transpose(tuple(remaining.index(v) for v in axes_vars))
    flat = int(np.argmax(view))
    values = np.unravel_index(flat, view.shape) if view.shape else ()
    return {v: int(x) for v, x in zip(axes_vars, values)}


def oracle_belief(net: BeliefNetwork, query: int,
                  evidence: Evidence | None = None) -> tuple[tuple[float, ...], float]:
    """Posterior over ``query`` and the evidence mass."""
    evidence = evidence if evidence is not None else Evidence.empty()
    arr = joint_table(net)
    remaining = list(range(net.n))
    arr = _collapse_evidence(arr, remaining, evidence)
    mass = float(arr.sum())
    if mass == 0.0:
        raise ZeroMassError("evidence has probability zero")
    if query in evidence:
        belief = tuple(1.0 if i == evidence.get(query) else 0.0
                       for i in range(net.cards[query]))
        return belief, mass
    others = tuple(i for i, v in enumerate(remaining) if v != query)
    marginal = arr.sum(axis=others)
    return tuple(float(x) for x in marginal / mass), mass


def oracle_mpe(net: BeliefNetwork, evidence: Evidence | None = None,
               tie_order: Sequence[int] | None = None) -> tuple[float, dict[int, int]]:
    """Maximal joint mass consistent with the evidence, plus its assignment."""
    evidence = evidence if evidence is not None else Evidence.empty()
    tie_order = tie_order if tie_order is not None else range(net.n)
    arr = joint_table(net)
    remaining = list(range(net.n))
    arr = _collapse_evidence(arr, remaining, evidence)
    assignment = dict(evidence.assignments)
    assignment.update(_lex_argmax(arr, remaining, tie_order))
    return float(arr.max()), assignment


def oracle_map(net: BeliefNetwork, hypothesis: Sequence[int],
               evidence: Evidence | None = None) -> tuple[float, dict[int, int]]:
    """Best hypothesis assignment after summing out everything else.

    ``hypothesis`` order doubles as the tie-break coordinate order.
    Observed hypothesis variables are pinned to their observed value.
    """
    evidence = evidence if evidence is not None else Evidence.empty()
    arr = joint_table(net)
    remaining = list(range(net.n))
    arr = _collapse_evidence(arr, remaining, evidence)
    hset = set(hypothesis)
    others = tuple(i for i, v in enumerate(remaining) if v not in hset)
    summed = arr.sum(axis=others) if others else arr
    rest = [v for v in remaining if v in hset]
    assignment = {v: evidence.get(v) for v in hypothesis if v in evidence}
    assignment.update(_lex_argmax(summed, rest, hypothesis))
    return float(summed.max()), assignment


def oracle_meu(diagram: InfluenceDiagram, evidence: Evidence | None = None,
               decision_order: Sequence[int] | None = None) -> tuple[float, dict[int, int]]:
    """Decisions maximizing conditional expected utility.

    For each decision tuple the score is the utility expectation given the
    evidence; tuples whose evidence probability is zero are excluded from
    the maximization, and if none remain the evidence is impossible.
    """
    evidence = evidence if evidence is not None else Evidence.empty()
    decision_order = (decision_order if decision_order is not None
                      else diagram.decisions)
    _guard(diagram.cards)
    scope = list(range(diagram.n))
    probs = np.ones(diagram.cards)
    for f in diagram.chance_factors():
        probs = probs * f.aligned_values(scope)
    utils = np.zeros(diagram.cards)
    for f in diagram.utilities:
        utils = utils + f.aligned_values(scope)

    remaining = list(range(diagram.n))
    probs = _collapse_evidence(probs, remaining, evidence)
    utils_remaining = list(range(diagram.n))
    utils = _collapse_evidence(utils, utils_remaining, evidence)

    dset = set(diagram.decisions)
    chance_axes = tuple(i for i, v in enumerate(remaining) if v not in dset)
    mass = probs.sum(axis=chance_axes) if chance_axes else probs
    weighted = (probs * utils).sum(axis=chance_axes) if chance_axes else probs * utils
    supported = mass > 0
    if not supported.any():
        raise ZeroMassError("the evidence has zero probability under every decision")
    scored = np.divide(weighted, mass, out=np.zeros_like(weighted), where=supported)
    scored = np.where(supported, scored, -np.inf)

    rest = [v for v in remaining if v in dset]
    assignment = {d: evidence.get(d) for d in diagram.decisions if d in evidence}
    assignment.update(_lex_argmax(scored, rest, decision_order))
    return float(scored.max()), assignment


def score_assignment(net: BeliefNetwork, assignment: dict[int, int]) -> float:
    """Joint probability of one complete assignment, factor by factor."""
    total = 1.0
    for f in net.factor_list():
        total *= f.value_at(assignment)
    return total


def score_hypothesis(net: BeliefNetwork, pinned: dict[int, int],
                     evidence: Evidence | None = None) -> float:
    """Mass of (pinned, evidence) with all other variables summed out."""
    evidence = evidence if evidence is not None else Evidence.empty()
    arr = joint_table(net)
    remaining = list(range(net.n))
    arr = _collapse_evidence(arr, remaining, evidence)
    for v, val in sorted(pinned.items()):
        if v in evidence:
            if evidence.get(v) != val:
                return 0.0
            continue
        arr = np.take(arr, val, axis=remaining.index(v))
        remaining.remove(v)
    return float(arr.sum())


def score_decisions(diagram: InfluenceDiagram, decisions: dict[int, int],
                    evidence: Evidence | None = None) -> float:
    """Conditional expected utility of one decision tuple."""
    evidence = evidence if evidence is not None else Evidence.empty()
    merged = dict(evidence.assignments)
    merged.update(decisions)
    pinned = Evidence(merged)
    _guard(diagram.cards)
    scope = list(range(diagram.n))
    probs = np.ones(diagram.cards)
    for f in diagram.chance_factors():
        probs = probs * f.aligned_values(scope)
    utils = np.zeros(diagram.cards)
    for f in diagram.utilities:
        utils = utils + f.aligned_values(scope)
    remaining = list(range(diagram.n))
    probs = _collapse_evidence(probs, remaining, pinned)
    utils_remaining = list(range(diagram.n))
    utils = _collapse_evidence(utils, utils_remaining, pinned)
    mass = probs.sum()
    if mass == 0.0:
        raise ZeroMassError("the decision tuple gives the evidence zero probability")
    return float((probs * utils).sum() / mass)


def truth_table_models(theory: CnfTheory) -> set[tuple[bool, ...]]:
    """All satisfying assignments as tuples ordered proposition 1..n."""
    n = theory.num_props
    if n > 20:
        raise TooLargeError(f"truth table over {n} propositions exceeds the cap")
    count = 1 << n
    idx = np.arange(count)
    cols = [(idx >> (n - 1 - j)) & 1 for j in range(n)]  # prop 1 most significant
    sat = np.ones(count, dtype=bool)
    for clause in theory.clauses:
        clause_sat = np.zeros(count, dtype=bool)
        for lit in clause:
            col = cols[abs(lit) - 1]
            clause_sat |= (col == 1) if lit > 0 else (col == 0)
        sat &= clause_sat
    rows = np.nonzero(sat)[0]
    return {tuple(bool((int(r) >> (n - 1 - j)) & 1) for j in range(n)) for r in rows}


def oracle_sat(theory: CnfTheory) -> bool:
    return bool(truth_table_models(theory))
