"""Bucket-structured clause resolution with backtrack-free model generation.

Clauses are filed by their highest-ordered proposition and buckets are
processed from the last ordering position to the first.  A bucket holding a
unit clause does unit resolution only; otherwise every opposing pair is
resolved.  The union of all buckets afterwards (originals plus resolvents)
admits model generation along the ordering with no dead ends.

Propositions are 1-based with DIMACS literal signs; ordering positions use
0-based node ids (proposition p is node p - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsatisfiableError
from .graph import Ordering, induced_width, interaction_graph
from .model import CnfTheory, sorted_clause


@dataclass(frozen=True)
class DirectionalExtension:
    """Per-proposition clause buckets after the resolution sweep."""

    ordering: Ordering
    num_props: int
    buckets: dict[int, tuple[frozenset[int], ...]]
    satisfiable: bool

    def all_clauses(self) -> list[frozenset[int]]:
        out: list[frozenset[int]] = []
        for node in self.ordering:
            out.extend(self.buckets.get(node + 1, ()))
        return out

    def clause_count(self) -> int:
        return sum(len(b) for b in self.buckets.values())

    def to_theory(self) -> CnfTheory:
        return CnfTheory(self.num_props, tuple(self.all_clauses()))

    def to_dimacs(self) -> str:
        order_line = " ".join(str(node + 1) for node in self.ordering)
        lines = [f"c order {order_line}".rstrip(),
                 f"p cnf {self.num_props} {self.clause_count()}"]
        for clause in self.all_clauses():
            lines.append(" ".join(str(lit) for lit in sorted_clause(clause)) + " 0")
        return "\n".join(lines) + "\n"


def _resolve(a: frozenset[int], b: frozenset[int], prop: int) -> frozenset[int]:
    return (a - {prop}) | (b - {-prop})


def _tautological(clause: frozenset[int]) -> bool:
    return any(-lit in clause for lit in clause)


def directional_resolution(theory: CnfTheory, ordering: Ordering) -> DirectionalExtension:
    """Resolution sweep over buckets; empty resolvent means unsatisfiable.

    On an unsatisfiable theory the returned extension is empty.
    """
    if len(ordering) != theory.num_props:
        raise ValueError(f"ordering covers {len(ordering)} propositions, "
                         f"theory has {theory.num_props}")
    unsat = DirectionalExtension(ordering, theory.num_props, {}, False)
    if any(not clause for clause in theory.clauses):
        return unsat

    buckets: dict[int, list[frozenset[int]]] = {node + 1: [] for node in ordering}
    seen: set[frozenset[int]] = set()

    def file_clause(clause: frozenset[int]) -> None:
        if clause in seen:
            return
        seen.add(clause)
        prop = max((abs(lit) for lit in clause), key=lambda q: ordering.index_of(q - 1))
        buckets[prop].append(clause)

    for clause in theory.clauses:
        file_clause(clause)

    for node in reversed(ordering.sequence):
        prop = node + 1
        bucket = buckets[prop]
        units = [c for c in bucket if len(c) == 1]
        if units:
            for unit in units:
                (lit,) = unit
                for other in list(bucket):
                    if -lit not in other:
                        continue
                    resolvent = other - {-lit}
                    if not resolvent:
                        return unsat
                    if not _tautological(resolvent):
                        file_clause(resolvent)
        else:
            positive = [c for c in bucket if prop in c]
            negative = [c for c in bucket if -prop in c]
            for a in positive:
                for b in negative:
                    resolvent = _resolve(a, b, prop)
                    if not resolvent:
                        return unsat
                    if not _tautological(resolvent):
                        file_clause(resolvent)

    extension = DirectionalExtension(ordering, theory.num_props,
                                     {p: tuple(cs) for p, cs in buckets.items()}, True)
    # Resolvent size is capped by the interaction graph's induced width.
    bound = induced_width(interaction_graph(theory), ordering).induced_width + 1
    assert all(len(c) <= bound for c in extension.all_clauses()), \
        "clause exceeded the induced-width bound"
    return extension


def generate_model(extension: DirectionalExtension) -> dict[int, bool]:
    """Assign propositions along the ordering, satisfying each bucket in turn.

    Unconstrained propositions default to false.  A dead end is impossible
    after the resolution sweep, so hitting one is reported loudly.
    """
    if not extension.satisfiable:
        raise UnsatisfiableError("theory has no models")
    assignment: dict[int, bool] = {}

    def satisfied(clause: frozenset[int]) -> bool:
        return any((lit > 0) == assignment[abs(lit)] for lit in clause)

    for node in extension.ordering:
        prop = node + 1
        bucket = extension.buckets.get(prop, ())
        chosen = None
        for value in (False, True):
            assignment[prop] = value
            if all(satisfied(c) for c in bucket):
                chosen = value
                break
        if chosen is None:
            raise AssertionError(f"dead end at proposition {prop}; "
                                 "the extension is not backtrack-free")
        assignment[prop] = chosen
    return assignment
