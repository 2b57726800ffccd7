"""Undirected graph views, elimination orderings, and width machinery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError


class GraphView:
    """Simple undirected graph over integer node ids.

    Built once by the constructors below and then treated as read-only;
    the mutating methods exist for the working copies the ordering
    heuristics chew through.
    """

    __slots__ = ("_adj",)

    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        self._adj: dict[int, set[int]] = {int(v): set() for v in nodes}
        for u, v in edges:
            self.add_edge(u, v)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    @property
    def n(self) -> int:
        return len(self._adj)

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> set[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self._adj for v in self._adj[u] if u < v)

    def add_edge(self, u: int, v: int) -> None:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self loop at node {u}")
        if u not in self._adj or v not in self._adj:
            raise ValueError(f"edge ({u}, {v}) uses an unknown node")
        self._adj[u].add(v)
        self._adj[v].add(u)

    def remove_node(self, v: int) -> None:
        for u in self._adj.pop(v):
            self._adj[u].discard(v)

    def connect_neighbors(self, v: int) -> int:
        """Add the missing edges among v's neighbors; returns how many."""
        added = 0
        nbrs = sorted(self._adj[v])
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                if b not in self._adj[a]:
                    self.add_edge(a, b)
                    added += 1
        return added

    def copy(self) -> "GraphView":
        g = GraphView()
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        return g

    def without(self, removed: Iterable[int]) -> "GraphView":
        removed = set(removed)
        g = GraphView()
        g._adj = {v: set(nb) - removed for v, nb in self._adj.items() if v not in removed}
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphView):
            return NotImplemented
        return self._adj == other._adj


@dataclass(frozen=True)
class Ordering:
    """Distinct node ids by position; position 1 is eliminated last.

    Query engines require an ordering covering a model's variables exactly;
    orderings over node-deleted graphs may cover any id subset.
    """

    sequence: tuple[int, ...]

    def __post_init__(self):
        seq = tuple(int(v) for v in self.sequence)
        if len(set(seq)) != len(seq):
            raise ValueError(f"ordering repeats a node: {seq}")
        if any(v < 0 for v in seq):
            raise ValueError(f"ordering contains a negative id: {seq}")
        object.__setattr__(self, "sequence", seq)
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(seq)})

    def index_of(self, var: int) -> int:
        return self._pos[var]

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)

    def __contains__(self, var: int) -> bool:
        return var in self._pos

    def reversed(self) -> "Ordering":
        return Ordering(tuple(reversed(self.sequence)))

    def serialize(self) -> str:
        return " ".join(str(v) for v in self.sequence) + "\n"

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Ordering":
        try:
            seq = tuple(int(t) for t in text.split())
        except ValueError as exc:
            raise ParseError(f"ordering must be whitespace-separated integers: {exc}")
        if n is not None and sorted(seq) != list(range(n)):
            raise ParseError(f"ordering must list each of the {n} variables "
                             f"exactly once, got {seq}")
        try:
            return cls(seq)
        except ValueError as exc:
            raise ParseError(str(exc))


@dataclass(frozen=True)
class WidthReport:
    """Widths of one ordering: plain, induced, and the fill-in that induced it."""

    order: tuple[int, ...]
    node_width: dict[int, int]
    node_induced_width: dict[int, int]
    width: int
    induced_width: int
    fill_edges: tuple[tuple[int, int], ...]

    def render(self) -> str:
        return f"w={self.width} wstar={self.induced_width} fill={len(self.fill_edges)}"


def _restrict_sequence(g: GraphView, order: Sequence[int] | Ordering) -> list[int]:
    seq = [v for v in order if v in g]
    if set(seq) != set(g.nodes):
        missing = sorted(set(g.nodes) - set(seq))
        raise ValueError(f"ordering does not cover nodes {missing}")
    return seq


def induced_width(g: GraphView, order: Sequence[int] | Ordering) -> WidthReport:
    """Process nodes last to first, connecting each node's earlier neighbors.

    Entries of ``order`` outside the graph are skipped, so a full-model
    ordering can be reused on a node-deleted graph.
    """
    seq = _restrict_sequence(g, order)
    pos = {v: i for i, v in enumerate(seq)}
    node_width = {v: sum(1 for u in g.neighbors(v) if pos[u] < pos[v]) for v in seq}
    work = g.copy()
    node_induced: dict[int, int] = {}
    fill: list[tuple[int, int]] = []
    for v in reversed(seq):
        earlier = sorted(u for u in work.neighbors(v) if pos[u] < pos[v])
        node_induced[v] = len(earlier)
        for i, a in enumerate(earlier):
            for b in earlier[i + 1:]:
                if not work.has_edge(a, b):
                    work.add_edge(a, b)
                    fill.append((a, b))
    return WidthReport(
        order=tuple(seq),
        node_width=node_width,
        node_induced_width=node_induced,
        width=max(node_width.values(), default=0),
        induced_width=max(node_induced.values(), default=0),
        fill_edges=tuple(fill),
    )


def conditional_induced_width(g: GraphView, order: Sequence[int] | Ordering,
                              removed: Iterable[int]) -> WidthReport:
    """Induced width along ``order`` after deleting ``removed`` from the graph."""
    return induced_width(g.without(removed), order)


# -- greedy ordering construction ----------------------------------------------

_HEURISTICS = ("min_degree", "min_fill")


def _fill_count(g: GraphView, v: int) -> int:
    nbrs = sorted(g.neighbors(v))
    return sum(1 for i, a in enumerate(nbrs) for b in nbrs[i + 1:] if not g.has_edge(a, b))


def _pick(g: GraphView, kind: str, candidates: Iterable[int]) -> int:
    if kind == "min_degree":
        return min(candidates, key=lambda v: (g.degree(v), v))
    if kind == "min_fill":
        return min(candidates, key=lambda v: (_fill_count(g, v), v))
    raise ValueError(f"unknown ordering heuristic {kind!r}")


def _heuristic_sequence(g: GraphView, kind: str) -> tuple[int, ...]:
    # Nodes are selected in elimination order (last ordering position first).
    work = g.copy()
    taken: list[int] = []
    while work.n:
        v = _pick(work, kind, work.nodes)
        taken.append(v)
        work.connect_neighbors(v)
        work.remove_node(v)
    return tuple(reversed(taken))


def order_heuristic(g: GraphView, kind: str) -> Ordering:
    """Greedy elimination ordering; ties always break toward the lowest id."""
    return Ordering(_heuristic_sequence(g, kind))


def constrained_order(g: GraphView, kind: str = "min_fill",
                      prefix: Sequence[int] = (), suffix: Sequence[int] = ()) -> Ordering:
    """Heuristic ordering with pinned first and last regions.

    ``prefix`` occupies positions 1..k in the given order (eliminated last);
    ``suffix`` occupies the final positions in the given order (eliminated,
    or observed and scattered, first).  The free middle region is filled
    greedily on the shrinking graph.
    """
    prefix = [int(v) for v in prefix]
    suffix = [int(v) for v in suffix]
    if len(set(prefix)) != len(prefix) or len(set(suffix)) != len(suffix):
        raise ValueError("prefix/suffix contain duplicates")
    if set(prefix) & set(suffix):
        raise ValueError("prefix and suffix overlap")
    for v in prefix + suffix:
        if v not in g:
            raise ValueError(f"constrained node {v} is not in the graph")
    work = g.copy()
    free = set(g.nodes) - set(prefix) - set(suffix)
    pending_suffix = list(suffix)
    pending_prefix = list(prefix)
    taken: list[int] = []
    while work.n:
        if pending_suffix:
            v = pending_suffix.pop()
        elif free:
            v = _pick(work, kind, free)
            free.discard(v)
        else:
            v = pending_prefix.pop()
        taken.append(v)
        work.connect_neighbors(v)
        work.remove_node(v)
    return Ordering(tuple(reversed(taken)))


def cutset_heuristic(g: GraphView, bound: int, kind: str = "min_degree") -> list[int]:
    """Greedy node set whose deletion brings the heuristic width within bound.

    Repeatedly removes the highest-degree node (ties toward the lowest id)
    until the remaining graph's induced width along a fresh heuristic
    ordering is at most ``bound``.  Returned sorted by id.
    """
    if bound < 0:
        raise ValueError("width bound must be >= 0")
    work = g.copy()
    cut: set[int] = set()
    while True:
        seq = _heuristic_sequence(work, kind)
        if induced_width(work, seq).induced_width <= bound:
            return sorted(cut)
        v = min(work.nodes, key=lambda u: (-work.degree(u), u))
        cut.add(v)
        work.remove_node(v)


# -- graph constructions from models ---------------------------------------------

def moral_graph(net) -> GraphView:
    """Undirected family cliques: each child married to and among its parents."""
    g = GraphView(range(net.n))
    for child, parents in enumerate(net.parents):
        for p in parents:
            g.add_edge(child, p)
        for i, a in enumerate(parents):
            for b in parents[i + 1:]:
                if not g.has_edge(a, b):
                    g.add_edge(a, b)
    return g


def augmented_graph(diagram) -> GraphView:
    """Moral graph of the diagram plus a clique over each utility scope."""
    g = moral_graph(diagram.network)
    for f in diagram.utilities:
        scope = f.scope
        for i, a in enumerate(scope):
            for b in scope[i + 1:]:
                if not g.has_edge(a, b):
                    g.add_edge(a, b)
    return g


def interaction_graph(theory) -> GraphView:
    """One node per proposition, a clique per clause scope (0-based nodes)."""
    g = GraphView(range(theory.num_props))
    for clause in theory.clauses:
        scope = sorted({abs(l) - 1 for l in clause})
        for i, a in enumerate(scope):
            for b in scope[i + 1:]:
                if not g.has_edge(a, b):
                    g.add_edge(a, b)
    return g
