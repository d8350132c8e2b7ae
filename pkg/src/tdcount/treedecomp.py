"""Tree decompositions: greedy elimination orderings, bucket-elimination
construction, validation, nice-form conversion, and PACE-style .td I/O."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from .graphs import Graph


class ViolationKind(enum.Enum):
    VERTEX_NOT_COVERED = "vertex-not-covered"
    EDGE_NOT_COVERED = "edge-not-covered"
    CONNECTEDNESS_BROKEN = "connectedness-broken"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: tuple


@dataclass
class TreeDecomposition:
    """Rooted decomposition; node i has bag bags[i] and children children[i]."""

    bags: list[frozenset[int]]
    children: list[list[int]]
    root: int
    num_graph_vertices: int

    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    def tree_edges(self):
        for parent, kids in enumerate(self.children):
            for child in kids:
                yield (parent, child)


class NodeKind(enum.Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: NodeKind
    bag: tuple[int, ...]  # sorted ascending
    vertex: int | None
    children: tuple[int, ...]


@dataclass
class NiceTreeDecomposition:
    """Nodes are stored in post-order: children always precede parents,
    the root is the last node and has an empty bag."""

    nodes: list[NiceNode]
    num_graph_vertices: int
    forget_node_of: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for i, node in enumerate(self.nodes):
            assert all(c < i for c in node.children), "nodes must be post-ordered"
        assert self.nodes[-1].bag == (), "root bag must be empty"
        if not self.forget_node_of:
            for i, node in enumerate(self.nodes):
                if node.kind is NodeKind.FORGET:
                    assert node.vertex not in self.forget_node_of
                    self.forget_node_of[node.vertex] = i

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    def width(self) -> int:
        return max(len(n.bag) for n in self.nodes) - 1


def width(td) -> int:
    """Width of a (nice) tree decomposition: largest bag size minus one."""
    return td.width()


def _min_degree_score(adj, v):
    return len(adj[v])


def _min_fill_score(adj, v):
    ns = adj[v]
    missing = 0
    for u in ns:
        # ns - adj[u] holds u itself plus the neighbors u is not adjacent to
        missing += len(ns - adj[u]) - 1
    return missing // 2  # each non-adjacent pair was counted from both ends


def elimination_ordering(
    graph: Graph, heuristic: str = "min-fill", seed: int = 0, defer=()
) -> list[int]:
    """Greedy ordering under min-fill or min-degree scoring.  Ties are
    broken uniformly at random from a generator seeded with `seed`, so
    repeated calls with identical arguments agree.  Vertices in `defer`
    are eliminated only once every other vertex is gone."""
    if heuristic == "min-fill":
        score = _min_fill_score
    elif heuristic == "min-degree":
        score = _min_degree_score
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    deferred = frozenset(defer)
    rng = random.Random(seed)
    adj = [set(ns) for ns in graph.neighbors]
    alive = sorted(range(graph.num_vertices))
    order = []
    while alive:
        pool = [v for v in alive if v not in deferred] or alive
        best_score = None
        ties = []
        for v in pool:
            s = score(adj, v)
            if best_score is None or s < best_score:
                best_score = s
                ties = [v]
            elif s == best_score:
                ties.append(v)
        v = ties[0] if len(ties) == 1 else rng.choice(ties)
        order.append(v)
        ns = adj[v]
        for u in ns:
            adj[u].discard(v)
        ns = sorted(ns)
        for i, u in enumerate(ns):
            for w in ns[i + 1 :]:
                adj[u].add(w)
                adj[w].add(u)
        alive.remove(v)
    return order


def td_from_ordering(graph: Graph, ordering: list[int]) -> TreeDecomposition:
    """Bucket elimination: the bag of v is v plus its later neighbors in
    the fill-in graph; each node attaches to the earliest-eliminated
    vertex of its bag remainder."""
    n = graph.num_vertices
    if sorted(ordering) != list(range(n)):
        raise ValueError("ordering must be a permutation of the vertices")
    if n == 0:
        return TreeDecomposition([frozenset()], [[]], 0, 0)
    pos = {v: i for i, v in enumerate(ordering)}
    adj = [set(ns) for ns in graph.neighbors]
    bags: list[frozenset[int]] = [frozenset()] * n
    parent = [None] * n  # node index of the parent, by ordering index
    for i, v in enumerate(ordering):
        ns = adj[v]
        bags[i] = frozenset(ns | {v})
        if ns:
            u = min(ns, key=lambda x: pos[x])
            parent[i] = pos[u]
        for u in ns:
            adj[u].discard(v)
        ns = sorted(ns)
        for a_i, u in enumerate(ns):
            for w in ns[a_i + 1 :]:
                adj[u].add(w)
                adj[w].add(u)
    root = n - 1
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        if i == root:
            continue
        p = parent[i] if parent[i] is not None else root
        children[p].append(i)
    return TreeDecomposition(bags, children, root, n)


def validate_td(graph: Graph, td: TreeDecomposition) -> Violation | None:
    """None when the three decomposition conditions hold, else the first
    violation found (vertex coverage, edge coverage, connectedness)."""
    nodes_with: dict[int, set[int]] = {v: set() for v in range(graph.num_vertices)}
    for i, bag in enumerate(td.bags):
        for v in bag:
            if v not in nodes_with:
                return Violation(ViolationKind.VERTEX_NOT_COVERED, (v,))
            nodes_with[v].add(i)
    for v in range(graph.num_vertices):
        if not nodes_with[v]:
            return Violation(ViolationKind.VERTEX_NOT_COVERED, (v,))
    for u, v in sorted(graph.edges()):
        if not (nodes_with[u] & nodes_with[v]):
            return Violation(ViolationKind.EDGE_NOT_COVERED, (u, v))
    neigh: list[list[int]] = [[] for _ in range(td.num_nodes)]
    for p, c in td.tree_edges():
        neigh[p].append(c)
        neigh[c].append(p)
    for v in range(graph.num_vertices):
        members = nodes_with[v]
        start = next(iter(members))
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in neigh[cur]:
                if nxt in members and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != members:
            return Violation(ViolationKind.CONNECTEDNESS_BROKEN, (v,))
    return None


def make_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Convert to typed Leaf/Introduce/Forget/Join form.  Width is
    preserved, every source bag appears, and Forget nodes are inserted
    above the old root until the bag is empty."""
    nodes: list[NiceNode] = []

    def emit(kind, bag, vertex, children):
        nodes.append(NiceNode(kind, tuple(sorted(bag)), vertex, tuple(children)))
        return len(nodes) - 1

    def chain_to(cur, cur_bag, target_bag):
        bag = set(cur_bag)
        for v in sorted(cur_bag - target_bag):
            bag.discard(v)
            cur = emit(NodeKind.FORGET, bag, v, (cur,))
        for v in sorted(target_bag - cur_bag):
            bag.add(v)
            cur = emit(NodeKind.INTRODUCE, bag, v, (cur,))
        return cur

    # iterative post-order over the source tree
    order = []
    stack = [td.root]
    while stack:
        t = stack.pop()
        order.append(t)
        stack.extend(td.children[t])
    order.reverse()

    built: dict[int, int] = {}
    for t in order:
        bag = set(td.bags[t])
        kids = td.children[t]
        if not kids:
            cur = emit(NodeKind.LEAF, (), None, ())
            cur = chain_to(cur, set(), bag)
        else:
            tops = [chain_to(built[c], set(td.bags[c]), bag) for c in kids]
            cur = tops[0]
            for other in tops[1:]:
                cur = emit(NodeKind.JOIN, bag, None, (cur, other))
        built[t] = cur

    cur = built[td.root]
    cur = chain_to(cur, set(td.bags[td.root]), set())
    assert cur == len(nodes) - 1

    ntd = NiceTreeDecomposition(nodes, td.num_graph_vertices)
    assert ntd.width() == td.width()
    covered = set()
    for node in nodes:
        covered.update(node.bag)
    forgotten = set(ntd.forget_node_of)
    assert forgotten == covered, "each covered vertex is forgotten exactly once"
    return ntd


@dataclass
class DecompResult:
    ntd: NiceTreeDecomposition
    td: TreeDecomposition
    width: int
    seed: int
    heuristic: str


def decompose(
    graph: Graph,
    heuristic: str = "min-fill",
    seed: int = 0,
    tries: int = 1,
    defer=(),
) -> DecompResult:
    """Run `tries` seeded orderings and keep the best: lowest width,
    breaking ties toward the lowest seed."""
    if tries < 1:
        raise ValueError("tries must be positive")
    best = None
    for s in range(seed, seed + tries):
        order = elimination_ordering(graph, heuristic, s, defer)
        td = td_from_ordering(graph, order)
        w = td.width()
        if best is None or w < best[0]:
            best = (w, s, td)
    w, s, td = best
    return DecompResult(make_nice(td), td, w, s, heuristic)


# --- PACE .td I/O (1-based vertices and bag ids) ---


def write_td(td: TreeDecomposition) -> str:
    lines = [
        f"s td {td.num_nodes} {td.width() + 1} {td.num_graph_vertices}"
    ]
    for i, bag in enumerate(td.bags):
        entries = " ".join(str(v + 1) for v in sorted(bag))
        lines.append(f"b {i + 1} {entries}".rstrip())
    for p, c in td.tree_edges():
        lines.append(f"{min(p, c) + 1} {max(p, c) + 1}")
    return "\n".join(lines) + "\n"


def read_td(text: str) -> TreeDecomposition:
    """Parse a .td file; the tree is rooted at bag 1."""
    from .errors import ParseError

    num_bags = None
    num_vertices = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if num_bags is not None:
                raise ParseError("duplicate solution line", line_no)
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError("malformed solution line", line_no)
            num_bags, _width_plus, num_vertices = (
                int(parts[2]),
                int(parts[3]),
                int(parts[4]),
            )
        elif parts[0] == "b":
            if num_bags is None:
                raise ParseError("bag line before solution line", line_no)
            idx = int(parts[1])
            if idx in bags or not 1 <= idx <= num_bags:
                raise ParseError(f"bad bag id {idx}", line_no)
            bags[idx] = frozenset(int(t) - 1 for t in parts[2:])
        else:
            if num_bags is None:
                raise ParseError("edge line before solution line", line_no)
            if len(parts) != 2:
                raise ParseError("malformed edge line", line_no)
            edges.append((int(parts[0]), int(parts[1])))
    if num_bags is None:
        raise ParseError("missing solution line")
    if set(bags) != set(range(1, num_bags + 1)):
        raise ParseError("bag ids do not cover the declared range")
    neigh: list[list[int]] = [[] for _ in range(num_bags + 1)]
    for a, b in edges:
        if not (1 <= a <= num_bags and 1 <= b <= num_bags):
            raise ParseError(f"edge endpoint out of range: {a} {b}")
        neigh[a].append(b)
        neigh[b].append(a)
    children: list[list[int]] = [[] for _ in range(num_bags)]
    seen = {1}
    stack = [1]
    reached = 1
    while stack:
        cur = stack.pop()
        for nxt in neigh[cur]:
            if nxt not in seen:
                seen.add(nxt)
                reached += 1
                children[cur - 1].append(nxt - 1)
                stack.append(nxt)
    if reached != num_bags:
        raise ParseError("bag graph is not a connected tree")
    if len(edges) != num_bags - 1:
        raise ParseError("bag graph has a cycle")
    bag_list = [bags[i + 1] for i in range(num_bags)]
    return TreeDecomposition(bag_list, children, 0, num_vertices)
