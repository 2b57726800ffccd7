"""Ordered factor partitions and the shared backward-sweep machinery.

Every query engine works the same way: factors are filed into the bucket of
their highest-ordered scope variable, buckets are processed from the last
ordering position to the first, and each bucket either scatters restricted
slices (observed variable) or eliminates its variable from the product of
its contents and files the result further down.  Empty-scope results fold
into running scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EvidenceError
from .factor import ArgTable, DiscreteFactor, multiply
from .graph import Ordering
from .model import Evidence


@dataclass(frozen=True)
class TraceEntry:
    """What one bucket did: operator, input scopes, output scopes, cells."""

    variable: int
    op: str  # "sum" | "max" | "assign" | "skip"
    input_scopes: tuple[tuple[int, ...], ...]
    output_scopes: tuple[tuple[int, ...], ...]
    cells: int

    def render(self) -> str:
        def scopes(ss):
            return ";".join(",".join(str(v) for v in s) for s in ss) or "-"
        return (f"var={self.variable} op={self.op} in={scopes(self.input_scopes)} "
                f"out={scopes(self.output_scopes)} cells={self.cells}")


@dataclass
class Bucket:
    variable: int
    factors: list[DiscreteFactor] = field(default_factory=list)
    utilities: list[DiscreteFactor] = field(default_factory=list)
    observed_value: int | None = None
    generated: list[DiscreteFactor] = field(default_factory=list)
    arg_table: ArgTable | None = None


class BucketSchedule:
    """Buckets along one ordering, plus the trace of processing them."""

    def __init__(self, ordering: Ordering, evidence: Evidence | None = None):
        self.ordering = ordering
        self.buckets: dict[int, Bucket] = {v: Bucket(v) for v in ordering}
        self.evidence: dict[int, int] = {}
        if evidence is not None:
            for var, val in evidence.items():
                if var not in self.buckets:
                    raise EvidenceError(f"unknown variable {var}")
                self.buckets[var].observed_value = val
                self.evidence[var] = val
        self.scalar = 1.0       # product of empty-scope probability results
        self.util_scalar = 0.0  # sum of empty-scope utility results
        self.trace: list[TraceEntry] = []
        self.max_generated_scope = 0

    def bucket_of(self, f: DiscreteFactor) -> int:
        return max(f.scope, key=self.ordering.index_of)

    def place(self, f: DiscreteFactor, utility: bool = False) -> None:
        if f.is_scalar:
            if utility:
                self.util_scalar += float(f.values)
            else:
                self.scalar *= float(f.values)
            return
        bucket = self.buckets.get(self.bucket_of(f))
        if bucket is None:
            raise EvidenceError(f"factor scope {f.scope} not covered by the ordering")
        (bucket.utilities if utility else bucket.factors).append(f)

    def record(self, entry: TraceEntry) -> None:
        self.trace.append(entry)
        if entry.op in ("sum", "max"):
            for scope in entry.output_scopes:
                self.max_generated_scope = max(self.max_generated_scope, len(scope))

    def scatter(self, var: int) -> None:
        """Observation rule: restrict each bucket member individually.

        Slices are re-filed one by one; nothing is multiplied first.
        """
        bucket = self.buckets[var]
        value = bucket.observed_value
        ins, outs, cells = [], [], 0
        for utility, group in ((False, bucket.factors), (True, bucket.utilities)):
            for f in group:
                sliced = f.restrict(var, value)
                ins.append(f.scope)
                outs.append(sliced.scope)
                cells += sliced.values.size
                bucket.generated.append(sliced)
                self.place(sliced, utility=utility)
        self.record(TraceEntry(var, "assign", tuple(ins), tuple(outs), cells))

    def process(self, var: int, op: str) -> None:
        """Eliminate ``var`` from its bucket with ``op``, or scatter if observed."""
        bucket = self.buckets[var]
        if bucket.observed_value is not None:
            self.scatter(var)
            return
        if not bucket.factors:
            self.record(TraceEntry(var, "skip", (), (), 0))
            return
        combined = multiply(bucket.factors)
        result, table = combined.eliminate(var, op)
        bucket.arg_table = table
        bucket.generated.append(result)
        self.place(result)
        self.record(TraceEntry(var, op, tuple(f.scope for f in bucket.factors),
                               (result.scope,), result.values.size))


def partition(factors: Iterable[DiscreteFactor], ordering: Ordering,
              evidence: Evidence | None = None,
              utilities: Iterable[DiscreteFactor] = ()) -> BucketSchedule:
    """File every factor into the bucket of its highest-ordered variable."""
    schedule = BucketSchedule(ordering, evidence)
    for f in factors:
        schedule.place(f)
    for f in utilities:
        schedule.place(f, utility=True)
    return schedule


def forward_decode(schedule: BucketSchedule, over: Iterable[int]) -> dict[int, int]:
    """Read maximizing values front to back, restricted to ``over``.

    Observed variables take their observed value; a variable whose bucket
    never recorded a choice table defaults to value 0.
    """
    wanted = set(over)
    chosen: dict[int, int] = {}
    for var in schedule.ordering:
        if var not in wanted:
            continue
        bucket = schedule.buckets[var]
        if bucket.observed_value is not None:
            chosen[var] = bucket.observed_value
        elif bucket.arg_table is not None:
            chosen[var] = bucket.arg_table.choice_at(chosen)
        else:
            chosen[var] = 0
    return chosen
