"""Generic table-passing engine over nice tree decompositions.

A post-order traversal hands each node to a type-specific handler and
stores the resulting table.  Rows carry exact integer counts, optional
integer costs, optional rational weights, witness states for stability
checking, and per-child origin pointers so that later passes (purge,
enumeration, projection) can walk the derivation structure instead of
materializing solutions.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import BagMismatchError, HandlerFailureError
from .treedecomp import NiceTreeDecomposition, NodeKind


class Mode(enum.Enum):
    COUNT = "count"
    OPTCOUNT = "optcount"
    DECISION = "decision"
    WEIGHTED = "weighted"


class Row:
    """One table row.

    assignment      bitmask over the sorted bag
    witnesses       frozenset of (bitmask, strict) counter-witness states
    count           number of distinct decided-atom extensions, >= 1
    cost            accumulated minimize weight of the decided part
    weight          accumulated rational weight (weighted counting only)
    origins         per child, tuple of rows this row was derived from
    join_pairs      at join nodes, the exact (left, right) row pairs
    """

    __slots__ = ("assignment", "witnesses", "count", "cost", "weight", "origins", "join_pairs")

    def __init__(self, assignment, witnesses, count, cost=0, weight=None, origins=(), join_pairs=None):
        self.assignment = assignment
        self.witnesses = witnesses
        self.count = count
        self.cost = cost
        self.weight = weight
        self.origins = origins
        self.join_pairs = join_pairs

    def key(self):
        return (self.assignment, self.witnesses, self.cost)

    def has_strict_witness(self) -> bool:
        return any(strict for _, strict in self.witnesses)

    def __repr__(self):  # compact, deterministic; used by store fingerprints
        ws = sorted(self.witnesses)
        base = f"Row(a={self.assignment:b}, w={ws}, n={self.count}, c={self.cost}"
        if self.weight is not None:
            base += f", wt={self.weight}"
        return base + ")"


class DpTable:
    """Rows keyed uniquely by (assignment, witnesses, cost); merging sums
    counts and weights and unions origin pointers."""

    def __init__(self, node_id: int):
        self.node_id = node_id
        self.rows: dict[tuple, Row] = {}

    def add(self, row: Row) -> None:
        if row.count < 1:
            raise ValueError("row count must be positive")
        existing = self.rows.get(row.key())
        if existing is None:
            self.rows[row.key()] = row
            return
        existing.count += row.count
        if existing.weight is not None:
            existing.weight += row.weight
        merged = []
        for mine, theirs in zip(existing.origins, row.origins):
            seen = set(map(id, mine))
            merged.append(
                mine + tuple(r for r in theirs if id(r) not in seen)
            )
        existing.origins = tuple(merged)
        if existing.join_pairs is not None:
            seen = {(id(a), id(b)) for a, b in existing.join_pairs}
            existing.join_pairs += tuple(
                p for p in row.join_pairs if (id(p[0]), id(p[1])) not in seen
            )

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows.values())

    def total_count(self) -> int:
        return sum(r.count for r in self.rows.values())

    def max_witness_set(self) -> int:
        return max((len(r.witnesses) for r in self.rows.values()), default=0)


@dataclass
class Handlers:
    leaf: callable
    introduce: callable
    forget: callable
    join: callable


class TableStore:
    def __init__(self, ntd: NiceTreeDecomposition, mode: Mode):
        self.ntd = ntd
        self.mode = mode
        self.tables: list[DpTable | None] = [None] * len(ntd.nodes)

    @property
    def root_table(self) -> DpTable:
        return self.tables[self.ntd.root]

    def fingerprint(self) -> str:
        """Deterministic textual form of every table, for equality checks."""
        parts = []
        for i, table in enumerate(self.tables):
            rows = sorted(repr(r) for r in table) if table is not None else []
            parts.append(f"node {i}: " + "; ".join(rows))
        return "\n".join(parts)


def _check_table(node, table: DpTable, mode: Mode) -> None:
    bag_size = len(node.bag)
    witness_cap = 1 << (bag_size + 1)
    witness_free = True
    for row in table:
        assert len(row.witnesses) <= witness_cap, "witness-set bound exceeded"
        if row.witnesses:
            witness_free = False
            # the non-strict self-witness must survive every step
            assert (row.assignment, False) in row.witnesses, "self-witness lost"
    if witness_free and mode is not Mode.OPTCOUNT:
        assert len(table) <= (1 << bag_size), "row bound exceeded for witness-free tables"


def _prune_dominated(table: DpTable) -> DpTable:
    """Optimization mode: per (assignment, witnesses), only cost-minimal
    rows can extend to optimal solutions, so the rest are dropped."""
    best: dict[tuple, int] = {}
    for row in table:
        k = (row.assignment, row.witnesses)
        if k not in best or row.cost < best[k]:
            best[k] = row.cost
    pruned = DpTable(table.node_id)
    for row in table:
        if row.cost == best[(row.assignment, row.witnesses)]:
            pruned.rows[row.key()] = row
    return pruned


def traverse(
    ntd: NiceTreeDecomposition,
    handlers: Handlers,
    mode: Mode = Mode.COUNT,
    trace=None,
) -> TableStore:
    """Fill a table for every node in post-order.  Handler exceptions are
    wrapped in HandlerFailureError with the offending node attached."""
    store = TableStore(ntd, mode)
    for i, node in enumerate(ntd.nodes):
        try:
            if node.kind is NodeKind.LEAF:
                table = handlers.leaf(i, node)
            elif node.kind is NodeKind.INTRODUCE:
                table = handlers.introduce(i, node, store.tables[node.children[0]])
            elif node.kind is NodeKind.FORGET:
                table = handlers.forget(i, node, store.tables[node.children[0]])
            else:
                left, right = node.children
                table = handlers.join(i, node, store.tables[left], store.tables[right])
            if mode is Mode.OPTCOUNT:
                table = _prune_dominated(table)
            _check_table(node, table, mode)
        except Exception as exc:
            raise HandlerFailureError(i, node.kind.value) from exc
        store.tables[i] = table
        if trace is not None:
            record = {
                "node": i,
                "type": node.kind.value,
                "bag": list(node.bag),
                "rows": len(table),
                "max_witness_set": table.max_witness_set(),
            }
            trace.write(json.dumps(record, sort_keys=True) + "\n")
    return store


def solution_rows(table: DpTable) -> list[Row]:
    return [r for r in table if not r.has_strict_witness()]


def purge(store: TableStore) -> TableStore:
    """Drop every row not reachable from a root solution row along
    origin pointers.  Root aggregates are unchanged by construction."""
    ntd = store.ntd
    marked: list[set[int]] = [set() for _ in ntd.nodes]
    root = ntd.root
    for row in solution_rows(store.root_table):
        marked[root].add(id(row))
    for i in range(root, -1, -1):
        node = ntd.nodes[i]
        table = store.tables[i]
        if not node.children:
            continue
        for row in table:
            if id(row) not in marked[i]:
                continue
            for child, refs in zip(node.children, row.origins):
                for ref in refs:
                    marked[child].add(id(ref))
    out = TableStore(ntd, store.mode)
    for i, table in enumerate(store.tables):
        kept = DpTable(i)
        for row in table:
            if id(row) in marked[i]:
                kept.rows[row.key()] = row
        out.tables[i] = kept
    return out


def root_aggregate(store: TableStore, mode: Mode):
    """Aggregate the root table: a count, a (cost, count) pair, a
    consistency flag, or a rational weight depending on the mode."""
    ntd = store.ntd
    assert ntd.nodes[ntd.root].bag == (), "root bag must be empty"
    sols = solution_rows(store.root_table)
    if mode is Mode.COUNT:
        return sum(r.count for r in sols)
    if mode is Mode.DECISION:
        return bool(sols)
    if mode is Mode.OPTCOUNT:
        if not sols:
            return (None, 0)
        best = min(r.cost for r in sols)
        return (best, sum(r.count for r in sols if r.cost == best))
    if mode is Mode.WEIGHTED:
        return sum((r.weight for r in sols), Fraction(0))
    raise ValueError(f"unknown mode {mode}")


def place_checks(ntd: NiceTreeDecomposition, atom_sets: list[frozenset[int]]) -> dict[int, list[int]]:
    """Map each constraint (given by its atom set) to the forget node of
    its earliest-forgotten atom.  The decomposition guarantees that all
    atoms of the constraint sit in that node's child bag, which is
    asserted here at plan time."""
    plan: dict[int, list[int]] = {}
    for idx, atoms in enumerate(atom_sets):
        assert atoms, "constraints with no atoms are resolved before planning"
        node_id = min(ntd.forget_node_of[a] for a in atoms)
        node = ntd.nodes[node_id]
        child_bag = ntd.nodes[node.children[0]].bag
        assert atoms <= set(child_bag), "constraint atoms must share the child bag"
        plan.setdefault(node_id, []).append(idx)
    return plan


def require_same_bag(node, left_bag, right_bag) -> None:
    if left_bag != right_bag or tuple(left_bag) != node.bag:
        raise BagMismatchError(
            f"join bags differ: {left_bag} vs {right_bag} at bag {node.bag}"
        )


# --- bit helpers shared by the concrete handlers ---


def insert_bit(mask: int, pos: int, bit: int) -> int:
    low = mask & ((1 << pos) - 1)
    high = (mask >> pos) << (pos + 1)
    return high | (bit << pos) | low


def remove_bit(mask: int, pos: int) -> int:
    low = mask & ((1 << pos) - 1)
    high = (mask >> (pos + 1)) << pos
    return high | low
