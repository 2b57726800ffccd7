"""Dense table algebra over discrete variable scopes.

A factor holds one real value per joint assignment of its scope.  The scope
is always kept sorted by variable id, so factors over the same variables are
comparable entrywise, and ``values`` carries one axis per scope variable in
that order.  Empty-scope factors are ordinary scalars and participate in
every operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ZeroMassError


@dataclass(frozen=True, eq=False)
class DiscreteFactor:
    """Immutable real-valued table over a sorted tuple of variable ids."""

    scope: tuple[int, ...]
    cards: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        scope = tuple(int(v) for v in self.scope)
        cards = tuple(int(c) for c in self.cards)
        if len(scope) != len(cards):
            raise ValueError("scope and cardinalities differ in length")
        if len(set(scope)) != len(scope):
            raise ValueError(f"duplicate variables in scope {scope}")
        if list(scope) != sorted(scope):
            raise ValueError(f"scope must be sorted by variable id, got {scope}")
        if any(c < 1 for c in cards):
            raise ValueError("cardinalities must be >= 1")
        values = np.array(self.values, dtype=np.float64).reshape(cards)
        if not np.all(np.isfinite(values)):
            raise ValueError("factor values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "values", values)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def scalar(cls, value: float) -> "DiscreteFactor":
        return cls((), (), np.asarray(float(value)))

    @classmethod
    def from_table(cls, scope: Sequence[int], cards: Sequence[int],
                   values: Sequence[float]) -> "DiscreteFactor":
        """Build a factor from a row-major table in the given scope order.

        The scope may be unsorted (file order); the table is transposed into
        the canonical ascending-id layout.
        """
        scope = [int(v) for v in scope]
        cards = [int(c) for c in cards]
        arr = np.asarray(values, dtype=np.float64).reshape(tuple(cards))
        order = sorted(range(len(scope)), key=lambda i: scope[i])
        return cls(tuple(scope[i] for i in order),
                   tuple(cards[i] for i in order),
                   arr.transpose(tuple(order)))

    # -- basic queries ---------------------------------------------------------

    @property
    def is_scalar(self) -> bool:
        return not self.scope

    def card_of(self, var: int) -> int:
        return self.cards[self.scope.index(var)]

    def value_at(self, assignment: Mapping[int, int]) -> float:
        return float(self.values[tuple(assignment[v] for v in self.scope)])

    def aligned_values(self, scope: Sequence[int]) -> np.ndarray:
        """View of the table broadcastable over a sorted superset scope."""
        own = dict(zip(self.scope, self.cards))
        return self.values.reshape(tuple(own.get(v, 1) for v in scope))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteFactor):
            return NotImplemented
        return (self.scope == other.scope and self.cards == other.cards
                and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:  # compact, for traces and assertion messages
        return f"DiscreteFactor(scope={self.scope}, cards={self.cards})"

    def dumps(self) -> str:
        """Debug form: scope line then values line, full precision."""
        head = " ".join(str(v) for v in self.scope)
        body = " ".join(repr(float(x)) for x in self.values.ravel())
        return f"{head}\n{body}\n"

    # -- algebra ---------------------------------------------------------------

    def restrict(self, var: int, value: int) -> "DiscreteFactor":
        """Slice of the table with ``var`` pinned to ``value``."""
        axis = self.scope.index(var)
        if not 0 <= value < self.cards[axis]:
            raise ValueError(f"value {value} out of range for variable {var}")
        rest = self.scope[:axis] + self.scope[axis + 1:]
        cards = self.cards[:axis] + self.cards[axis + 1:]
        return DiscreteFactor(rest, cards, np.take(self.values, value, axis=axis))

    def eliminate(self, var: int, op: str) -> tuple["DiscreteFactor", "ArgTable | None"]:
        """Remove ``var`` by summing or maximizing over its values.

        For ``op == "max"`` also returns the table of maximizing values;
        ties go to the lowest value index.
        """
        axis = self.scope.index(var)
        rest = self.scope[:axis] + self.scope[axis + 1:]
        cards = self.cards[:axis] + self.cards[axis + 1:]
        if op == "sum":
            return DiscreteFactor(rest, cards, self.values.sum(axis=axis)), None
        if op == "max":
            reduced = self.values.max(axis=axis)
            choices = np.argmax(self.values, axis=axis)
            table = ArgTable(var, self.cards[axis], rest, cards, choices)
            return DiscreteFactor(rest, cards, reduced), table
        raise ValueError(f"unknown elimination operator {op!r}")

    def normalized(self) -> tuple["DiscreteFactor", float]:
        """Scale entries to total mass one; returns (factor, original mass)."""
        if np.any(self.values < 0):
            raise ValueError("cannot normalize a table with negative entries")
        mass = float(self.values.sum())
        if mass == 0.0:
            raise ZeroMassError("table has zero total mass")
        return DiscreteFactor(self.scope, self.cards, self.values / mass), mass


@dataclass(frozen=True, eq=False)
class ArgTable:
    """Maximizing value of one eliminated variable, per remaining cell."""

    variable: int
    variable_card: int
    scope: tuple[int, ...]
    cards: tuple[int, ...]
    choices: np.ndarray

    def __post_init__(self):
        choices = np.array(self.choices, dtype=np.int64).reshape(self.cards)
        choices.setflags(write=False)
        object.__setattr__(self, "choices", choices)

    def choice_at(self, assignment: Mapping[int, int]) -> int:
        return int(self.choices[tuple(assignment[v] for v in self.scope)])


def _merged_scope(factors: Sequence[DiscreteFactor]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    cards: dict[int, int] = {}
    for f in factors:
        for v, c in zip(f.scope, f.cards):
            if cards.setdefault(v, c) != c:
                raise ValueError(f"cardinality conflict for variable {v}")
    scope = tuple(sorted(cards))
    return scope, tuple(cards[v] for v in scope)


def multiply(factors: Sequence[DiscreteFactor]) -> DiscreteFactor:
    """Pointwise product; output scope is the sorted union of input scopes."""
    if not factors:
        raise ValueError("multiply needs at least one factor")
    scope, cards = _merged_scope(factors)
    acc = factors[0].aligned_values(scope)
    for f in factors[1:]:
        acc = acc * f.aligned_values(scope)
    return DiscreteFactor(scope, cards, np.broadcast_to(acc, cards))


def add(factors: Sequence[DiscreteFactor]) -> DiscreteFactor:
    """Pointwise sum over the sorted union of input scopes."""
    if not factors:
        raise ValueError("add needs at least one factor")
    scope, cards = _merged_scope(factors)
    acc = factors[0].aligned_values(scope)
    for f in factors[1:]:
        acc = acc + f.aligned_values(scope)
    return DiscreteFactor(scope, cards, np.broadcast_to(acc, cards))
