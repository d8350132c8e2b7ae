"""Projected counting: a third pass over the purged tables.

For a set of rows O at a node, `pmc` is the number of distinct
projections of extensions compatible with at least one row of O, and
`ipmc` the number compatible with every row.  The two quantities are
inclusion-exclusion duals.  Projections of rows that disagree on a
projected bag atom are disjoint, so rows are bucketed by their
projection-restricted bag assignment and cross-bucket intersections are
zero.

Unions are cheap: at an introduce or forget node the union over a row
set equals the union over the combined child origins (split on the two
values of an introduced projected atom, which separates the projections
outright), so `pmc` walks down without inclusion-exclusion.
Intersections are not: `ipmc` expands over row subsets, and join nodes
recombine exactly the row pairs that joined, because a product of
per-child origin unions would count phantom combinations.
"""

from __future__ import annotations

from itertools import combinations

from .dpcore import Mode, Row, TableStore, purge, solution_rows
from .errors import ProjectionOutOfRangeError
from .model import CnfFormula, GroundProgram
from .treedecomp import NodeKind

ProjTable = dict


def _row_order(row: Row):
    return (row.assignment, tuple(sorted(row.witnesses)), row.cost)


def _subsets(rows):
    ordered = sorted(rows, key=_row_order)
    for size in range(1, len(ordered) + 1):
        for combo in combinations(ordered, size):
            yield frozenset(combo), -1 if size % 2 == 0 else 1


class ProjectionPass:
    def __init__(self, store: TableStore, proj_vertices) -> None:
        self.store = store
        self.ntd = store.ntd
        self.proj = frozenset(proj_vertices)
        self.tables: list[ProjTable] = [{} for _ in self.ntd.nodes]
        self._pmask = [
            sum(1 << i for i, v in enumerate(node.bag) if v in self.proj)
            for node in self.ntd.nodes
        ]
        # below the deepest projected forget, every extension of a row
        # projects to the row's own projected bag assignment, so the
        # counts are immediate: distinct buckets for a union, 1 for an
        # intersection
        self._pforget_below = [False] * len(self.ntd.nodes)
        for i, node in enumerate(self.ntd.nodes):
            self._pforget_below[i] = (
                node.kind is NodeKind.FORGET and node.vertex in self.proj
            ) or any(self._pforget_below[c] for c in node.children)
        self._pmc_cache: dict[tuple[int, frozenset], int] = {}
        self._pairs_cache: dict[tuple[int, frozenset], int] = {}

    def bucket_of(self, node_id: int, row: Row) -> int:
        return row.assignment & self._pmask[node_id]

    def pmc(self, node_id: int, rows: frozenset) -> int:
        """Projections compatible with at least one of `rows`."""
        if not rows:
            return 0
        if not self._pforget_below[node_id]:
            return len({self.bucket_of(node_id, row) for row in rows})
        key = (node_id, rows)
        cached = self._pmc_cache.get(key)
        if cached is not None:
            return cached
        node = self.ntd.nodes[node_id]
        if node.kind is NodeKind.LEAF:
            value = 1
        elif node.kind is NodeKind.JOIN:
            buckets: dict[int, set] = {}
            for row in rows:
                pairs = buckets.setdefault(self.bucket_of(node_id, row), set())
                pairs.update(row.join_pairs)
            value = sum(
                self._pairs_union(node_id, frozenset(pairs))
                for pairs in buckets.values()
            )
        elif node.kind is NodeKind.INTRODUCE and node.vertex in self.proj:
            # rows that disagree on the introduced projected atom
            # project disjointly, so the union splits by its value
            pos = node.bag.index(node.vertex)
            value = 0
            for bit in (0, 1):
                origins = frozenset(
                    o
                    for row in rows
                    if (row.assignment >> pos) & 1 == bit
                    for o in row.origins[0]
                )
                value += self.pmc(node.children[0], origins)
        else:
            # introducing an unprojected atom or forgetting any atom
            # keeps the union of projections the union over origins
            origins = frozenset(o for row in rows for o in row.origins[0])
            value = self.pmc(node.children[0], origins)
        self._pmc_cache[key] = value
        return value

    def ipmc(self, node_id: int, sigma: frozenset) -> int:
        """Projections compatible with every row of `sigma`; the rows
        must share a bucket."""
        table = self.tables[node_id]
        cached = table.get(sigma)
        if cached is not None:
            return cached
        assert sigma, "ipmc of the empty set is undefined"
        assert (
            len({self.bucket_of(node_id, r) for r in sigma}) == 1
        ), "ipmc keys agree on the projected bag assignment"
        if not self._pforget_below[node_id]:
            table[sigma] = 1
            return 1
        node = self.ntd.nodes[node_id]
        if node.kind is NodeKind.LEAF:
            value = 1
        elif node.kind is NodeKind.JOIN:
            value = 0
            for subset, sign in _subsets(sigma):
                pairs = frozenset(p for row in subset for p in row.join_pairs)
                value += sign * self._pairs_union(node_id, pairs)
        elif node.kind is NodeKind.INTRODUCE:
            # an introduce row extends exactly one child row, and rows
            # of one bucket agree on the introduced atom, so the
            # intersection passes through unchanged
            origins = set()
            for row in sigma:
                assert len(row.origins[0]) == 1
                origins.add(row.origins[0][0])
            value = self.ipmc(node.children[0], frozenset(origins))
        else:
            child = node.children[0]
            value = 0
            for subset, sign in _subsets(sigma):
                origins = frozenset(r for row in subset for r in row.origins[0])
                value += sign * self.pmc(child, origins)
        table[sigma] = value
        return value

    def _pairs_union(self, node_id: int, pairs: frozenset) -> int:
        """Projections compatible with at least one (left, right) pair."""
        key = (node_id, pairs)
        cached = self._pairs_cache.get(key)
        if cached is not None:
            return cached
        lchild, rchild = self.ntd.nodes[node_id].children
        ordered = sorted(pairs, key=lambda p: (_row_order(p[0]), _row_order(p[1])))
        total = 0
        for size in range(1, len(ordered) + 1):
            sign = -1 if size % 2 == 0 else 1
            for combo in combinations(ordered, size):
                lefts = frozenset(p[0] for p in combo)
                rights = frozenset(p[1] for p in combo)
                total += sign * self.ipmc(lchild, lefts) * self.ipmc(rchild, rights)
        self._pairs_cache[key] = total
        return total

    def root_value(self) -> int:
        sols = solution_rows(self.store.root_table)
        if not sols:
            return 0
        return self.pmc(self.ntd.root, frozenset(sols))


def build_proj_table(pass_: ProjectionPass, node_id: int) -> ProjTable:
    """Fill the node's table with one entry per bucket of its purged
    rows (recursive lookups extend the child tables on demand)."""
    buckets: dict[int, list[Row]] = {}
    for row in pass_.store.tables[node_id]:
        buckets.setdefault(pass_.bucket_of(node_id, row), []).append(row)
    for bucket in buckets.values():
        pass_.ipmc(node_id, frozenset(bucket))
    return pass_.tables[node_id]


def _deferred_decomp(graph, vertices, options) -> None:
    """Build a decomposition that eliminates the projected vertices
    last, unless the caller supplied one.  Forgets then follow the
    elimination order along every branch, so below the first projected
    forget each row admits a single projection and the
    inclusion-exclusion recursions bottom out early."""
    from .treedecomp import decompose

    if options.get("decomp") is None:
        options["decomp"] = decompose(
            graph,
            options.pop("heuristic", "min-fill"),
            options.pop("seed", 0),
            options.pop("seeds", 1),
            defer=vertices,
        )


def projected_count(instance, projection, **options) -> int:
    """Number of distinct projections of answer sets (programs, atom
    ids) or models (CNF, 1-based variables) onto `projection`."""
    from . import aspdp, satdp
    from .graphs import primal_graph, primal_graph_cnf

    if isinstance(instance, GroundProgram):
        proj = set(projection)
        bad = [a for a in proj if not 0 <= a < instance.num_atoms]
        if bad:
            raise ProjectionOutOfRangeError(f"unknown atom id {bad[0]}")
        if instance.is_trivially_inconsistent():
            return 0
        vertices = proj
        _deferred_decomp(primal_graph(instance), vertices, options)
        store, _ = aspdp.build_store(instance, Mode.COUNT, **options)
    elif isinstance(instance, CnfFormula):
        proj = set(projection)
        bad = [v for v in proj if not 1 <= v <= instance.num_vars]
        if bad:
            raise ProjectionOutOfRangeError(f"variable {bad[0]} out of range")
        if instance.has_empty_clause():
            return 0
        vertices = {v - 1 for v in proj}
        _deferred_decomp(primal_graph_cnf(instance), vertices, options)
        store, _ = satdp.build_store(instance, weighted=False, **options)
    else:
        raise TypeError(f"cannot project a {type(instance).__name__}")
    purged = purge(store)
    return ProjectionPass(purged, vertices).root_value()
