"""Graph-backed utility oracles for four utility families.

Items are graph nodes; elements are (node, instance) pairs where each
instance is one sampled edge set of a randomized model.  Utilities are
derived from per-instance structure:

* distance: alpha(shortest-path distance from item to element node),
* reverse_rank: alpha(number of nodes the element node reaches at least
  as cheaply as it reaches the item),
* reachability: 1 when the element node is reachable from the item,
* survival: the largest t such that the element node stays reachable
  using only edges with lifetime >= t.

Reverse sorted access runs an incremental Dijkstra-family search outward
from the element node and yields items by non-increasing utility.
Forward search runs one pruned search per instance from the item; a
branch is cut once the item's utility falls below the element's k-th
best stored seed utility, which provably cannot hide any element where
the item still has positive marginal utility.

Reference (brute-force) utilities are computed through scipy.sparse.csgraph
and a descending threshold sweep, deliberately independent code paths from
the incremental searches so the two can cross-check each other.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

from .aggregation import DigestTable, StaleStreamError
from .matrix import SparseUtilityMatrix

DISTANCE = "distance"
REVERSE_RANK = "reverse_rank"
REACHABILITY = "reachability"
SURVIVAL = "survival"
FAMILIES = (DISTANCE, REVERSE_RANK, REACHABILITY, SURVIVAL)


class Alpha:
    """Non-increasing map from distance or rank to utility.

    Kinds: threshold:T (1 up to T, then 0), inverse (1/x, clamped to 1
    below x=1 so self-distances stay finite), exp:sigma (exp(-x/sigma)),
    and table (right-continuous step function over breakpoints).
    """

    def __init__(self, kind: str, param: float | None = None,
                 points: list[tuple[float, float]] | None = None):
        self.kind = kind
        self.param = param
        self.points = points
        if kind == "table":
            if not points:
                raise ValueError("table alpha needs breakpoints")
            xs = [x for x, _ in points]
            vs = [v for _, v in points]
            if xs != sorted(xs) or len(set(xs)) != len(xs):
                raise ValueError("table breakpoints must be strictly increasing")
            if any(v < 0 for v in vs):
                raise ValueError("table values must be non-negative")
            if any(b > a for a, b in zip(vs, vs[1:])):
                raise ValueError("table values must be non-increasing")
        elif kind == "threshold":
            if param is None or param < 0:
                raise ValueError("threshold alpha needs T >= 0")
        elif kind == "exp":
            if param is None or param <= 0:
                raise ValueError("exponential alpha needs sigma > 0")
        elif kind != "inverse":
            raise ValueError(f"unknown alpha kind {kind!r}")

    @classmethod
    def threshold(cls, t: float) -> "Alpha":
        return cls("threshold", t)

    @classmethod
    def inverse(cls) -> "Alpha":
        return cls("inverse")

    @classmethod
    def exponential(cls, sigma: float) -> "Alpha":
        return cls("exp", sigma)

    @classmethod
    def table(cls, points: list[tuple[float, float]]) -> "Alpha":
        return cls("table", points=points)

    def __call__(self, x: float) -> float:
        if math.isinf(x):
            return 0.0
        if self.kind == "threshold":
            return 1.0 if x <= self.param else 0.0
        if self.kind == "inverse":
            return 1.0 / max(x, 1.0)
        if self.kind == "exp":
            return math.exp(-x / self.param)
        pos = 0
        for k, (bx, _) in enumerate(self.points):
            if bx <= x:
                pos = k
            else:
                break
        return self.points[pos][1]


@dataclass(frozen=True)
class UtilityFamily:
    kind: str
    alpha: Alpha | None = None

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown utility family {self.kind!r}")
        if self.kind in (DISTANCE, REVERSE_RANK):
            if self.alpha is None:
                raise ValueError(f"{self.kind} utility requires an alpha map")
        elif self.alpha is not None:
            raise ValueError(f"{self.kind} utility takes no alpha map")


@dataclass(frozen=True)
class DirectedGraph:
    """Base weighted directed graph the randomized models draw from."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for s, d, w in self.edges:
            if not (0 <= s < self.n) or not (0 <= d < self.n):
                raise ValueError(f"edge ({s}, {d}) out of range")
            if not (w > 0) or math.isinf(w):
                raise ValueError(f"edge ({s}, {d}) needs a positive finite weight")


class RankTable:
    """Exact per-instance Dijkstra ranks from full single-source searches.

    pi[src][dst] counts the nodes src reaches at least as cheaply as it
    reaches dst (weak inequality, so equidistant nodes share a rank);
    unreachable pairs get inf.
    """

    def __init__(self, tables: list[np.ndarray]):
        self.tables = tables

    def row(self, h: int, src: int) -> np.ndarray:
        return self.tables[h][src]

    def pi(self, h: int, src: int, dst: int) -> float:
        return float(self.tables[h][src][dst])


def ranks_from_distances(dist_row: np.ndarray) -> np.ndarray:
    """Weak-inequality ranks of one source's distance vector."""
    finite = np.sort(dist_row[np.isfinite(dist_row)])
    ranks = np.searchsorted(finite, dist_row, side="right").astype(float)
    ranks[~np.isfinite(dist_row)] = np.inf
    return ranks


class GraphInstanceSet:
    """A set of directed graph instances over one shared node set.

    Element ids enumerate (node, instance) pairs as h * n + v.  Transposed
    adjacency keeps incoming edges sorted by weight.
    """

    def __init__(self, n: int, instances: list[list[tuple[int, int, float]]]):
        if n <= 0:
            raise ValueError("node count must be positive")
        if not instances:
            raise ValueError("at least one instance required")
        self.n = n
        self.instances = [list(edges) for edges in instances]
        self.adj: list[list[list[tuple[int, float]]]] = []
        self.tadj: list[list[list[tuple[int, float]]]] = []
        self.caps: list[float] = []
        for edges in self.instances:
            fwd = [[] for _ in range(n)]
            rev = [[] for _ in range(n)]
            cap = 0.0
            for s, d, w in edges:
                if not (0 <= s < n) or not (0 <= d < n):
                    raise ValueError(f"edge ({s}, {d}) out of range")
                if not (w > 0) or math.isinf(w):
                    raise ValueError("edge weights must be positive and finite")
                fwd[s].append((d, float(w)))
                rev[d].append((s, float(w)))
                cap = max(cap, float(w))
            for lst in rev:
                lst.sort(key=lambda t: (t[1], t[0]))
            self.adj.append(fwd)
            self.tadj.append(rev)
            self.caps.append(cap)
        self._csr_cache: dict = {}
        self._rank_table: RankTable | None = None

    @property
    def count(self) -> int:
        return len(self.instances)

    @property
    def n_elements(self) -> int:
        return self.n * self.count

    def element_id(self, v: int, h: int) -> int:
        return h * self.n + v

    def node_of(self, e: int) -> int:
        return e % self.n

    def instance_of(self, e: int) -> int:
        return e // self.n

    def csr(self, h: int, unit: bool = False):
        """Sparse matrix of instance h; parallel edges collapse to the minimum."""
        key = (h, unit)
        if key not in self._csr_cache:
            best: dict[tuple[int, int], float] = {}
            for s, d, w in self.instances[h]:
                w = 1.0 if unit else w
                if (s, d) not in best or w < best[(s, d)]:
                    best[(s, d)] = w
            if best:
                rows, cols = zip(*best.keys())
                data = list(best.values())
            else:
                rows, cols, data = [], [], []
            self._csr_cache[key] = csr_matrix(
                (data, (rows, cols)), shape=(self.n, self.n)
            )
        return self._csr_cache[key]

    def distances(self, h: int, source: int | None = None) -> np.ndarray:
        mat = self.csr(h)
        if source is None:
            return _sp_dijkstra(mat)
        return _sp_dijkstra(mat, indices=[source])[0]

    def rank_table(self) -> RankTable:
        if self._rank_table is None:
            tables = []
            for h in range(self.count):
                dist = self.distances(h)
                tables.append(np.vstack([ranks_from_distances(row) for row in dist]))
            self._rank_table = RankTable(tables)
        return self._rank_table


def simulate_instances(
    base: DirectedGraph, model: str, count: int, rng_seed: int
) -> GraphInstanceSet:
    """Draw edge-set instances from a randomized model, deterministically.

    * ic: keep each edge independently with its weight as probability,
      kept edges get weight 1;
    * exponential_lengths: redraw each edge length from the exponential
      distribution whose rate is the edge weight;
    * fixed: count verbatim copies of the base graph.
    """
    if count < 1:
        raise ValueError("instance count must be at least 1")
    rng = np.random.default_rng(rng_seed)
    name = {"exponential_lengths": "exponential"}.get(model, model)
    instances = []
    if name == "fixed":
        instances = [list(base.edges) for _ in range(count)]
    elif name == "ic":
        for _, _, w in base.edges:
            if w > 1.0:
                raise ValueError("ic edge probabilities must lie in [0, 1]")
        for _ in range(count):
            draws = rng.random(len(base.edges))
            instances.append(
                [(s, d, 1.0) for (s, d, w), x in zip(base.edges, draws) if x < w]
            )
    elif name == "exponential":
        for _ in range(count):
            lengths = [rng.exponential(1.0 / w) for _, _, w in base.edges]
            instances.append(
                [(s, d, ln) for (s, d, _), ln in zip(base.edges, lengths)]
            )
    else:
        raise ValueError(f"unknown simulation model {model!r}")
    return GraphInstanceSet(base.n, instances)


# ---------------------------------------------------------------------------
# incremental searches


class _DijkstraFrontier:
    """Hand-rolled incremental Dijkstra; settling and expansion are split so
    pruned searches can refuse to expand a settled node."""

    def __init__(self, adj, source: int):
        self.adj = adj
        self.dist: dict[int, float] = {}
        self.parent: dict[int, int | None] = {source: None}
        self._seen = {source: 0.0}
        self._heap = [(0.0, source)]

    def next(self) -> tuple[int, float] | None:
        while self._heap:
            d, v = heapq.heappop(self._heap)
            if v in self.dist:
                continue
            self.dist[v] = d
            return v, d
        return None

    def expand(self, v: int) -> None:
        d = self.dist[v]
        for w, weight in self.adj[v]:
            nd = d + weight
            if w not in self.dist and nd < self._seen.get(w, math.inf):
                self._seen[w] = nd
                self.parent[w] = v
                heapq.heappush(self._heap, (nd, w))


class _WidestFrontier:
    """Max-min (bottleneck) variant: labels are the best minimum edge
    lifetime over paths from the source; nodes settle by decreasing label."""

    def __init__(self, adj, source: int, source_label: float):
        self.adj = adj
        self.label: dict[int, float] = {}
        self.parent: dict[int, int | None] = {source: None}
        self._seen = {source: source_label}
        self._heap = [(-source_label, source)]

    def next(self) -> tuple[int, float] | None:
        while self._heap:
            nt, v = heapq.heappop(self._heap)
            if v in self.label:
                continue
            self.label[v] = -nt
            return v, -nt
        return None

    def expand(self, v: int) -> None:
        t = self.label[v]
        for w, weight in self.adj[v]:
            cand = min(t, weight)
            if w not in self.label and cand > self._seen.get(w, 0.0):
                self._seen[w] = cand
                self.parent[w] = v
                heapq.heappush(self._heap, (-cand, w))


class _ReachFrontier:
    """Plain BFS with split settle/expand."""

    def __init__(self, adj, source: int):
        self.adj = adj
        self.visited = {source}
        self.parent: dict[int, int | None] = {source: None}
        self._queue = deque([source])

    def next(self) -> tuple[int, float] | None:
        if not self._queue:
            return None
        return self._queue.popleft(), 1.0

    def expand(self, v: int) -> None:
        for w, _ in self.adj[v]:
            if w not in self.visited:
                self.visited.add(w)
                self.parent[w] = v
                self._queue.append(w)


# ---------------------------------------------------------------------------
# reverse sorted access


class GraphRevStream:
    """Peekable single-pass stream of (item, utility) by non-increasing utility."""

    def __init__(self, gen):
        self._gen = gen
        self._cache: tuple[int, float] | None = None
        self._done = False

    def top(self) -> tuple[int, float] | None:
        if self._cache is None and not self._done:
            try:
                self._cache = next(self._gen)
            except StopIteration:
                self._done = True
        return self._cache

    def pop(self) -> tuple[int, float] | None:
        t = self.top()
        self._cache = None
        return t

    def close(self) -> None:
        self._gen = iter(())
        self._done = True
        self._cache = None


def rev_sorted_stream(
    instances: GraphInstanceSet, family: UtilityFamily, j: int
) -> GraphRevStream:
    """Incremental reverse sorted access for element j.

    Distance and survival searches run on the transposed instance (paths
    into the element node); reverse-rank runs forward from the element
    node because ranks there are monotone in its own distances.  The
    stream ends at the first zero utility since later ones only shrink.
    """
    v, h = instances.node_of(j), instances.instance_of(j)
    kind = family.kind

    def gen_distance():
        frontier = _DijkstraFrontier(instances.tadj[h], v)
        while (step := frontier.next()) is not None:
            node, d = step
            u = family.alpha(d)
            if u <= 0.0:
                return
            frontier.expand(node)
            yield node, u

    def gen_rank():
        ranks = instances.rank_table().row(h, v)
        frontier = _DijkstraFrontier(instances.adj[h], v)
        while (step := frontier.next()) is not None:
            node, _ = step
            u = float(family.alpha(float(ranks[node])))
            if u <= 0.0:
                return
            frontier.expand(node)
            yield node, u

    def gen_survival():
        frontier = _WidestFrontier(instances.tadj[h], v, instances.caps[h])
        while (step := frontier.next()) is not None:
            node, t = step
            if t <= 0.0:
                return
            frontier.expand(node)
            yield node, t

    def gen_reach():
        frontier = _ReachFrontier(instances.tadj[h], v)
        while (step := frontier.next()) is not None:
            node, _ = step
            frontier.expand(node)
            yield node, 1.0

    gens = {
        DISTANCE: gen_distance,
        REVERSE_RANK: gen_rank,
        SURVIVAL: gen_survival,
        REACHABILITY: gen_reach,
    }
    return GraphRevStream(gens[kind]())


# ---------------------------------------------------------------------------
# forward search


class GraphForwardStream:
    """Iterator of (element, utility) pairs with positive marginal gain.

    Tracks how many nodes the pruned searches settle (visited) and goes
    stale once another seed is committed to the digest table.
    """

    def __init__(self, digests: DigestTable):
        self._digests = digests
        self._version = digests.version
        self._gen = None
        self.visited = 0

    def _bind(self, gen):
        self._gen = gen
        return self

    def __iter__(self):
        return self

    def __next__(self) -> tuple[int, float]:
        if self._digests.version != self._version:
            raise StaleStreamError("forward search used after a seed was added")
        return next(self._gen)


def forward_search(
    instances: GraphInstanceSet,
    family: UtilityFamily,
    i: int,
    digests: DigestTable,
) -> GraphForwardStream:
    """Pruned forward search from item i across all instances.

    Expansion stops at an element whose stored k-th best seed utility
    already beats (strictly, for distance and rank; weakly, for survival
    and reachability, where the family-specific pruning arguments allow
    it) the item's utility there.  Yielded pairs are exactly the elements
    where the item's marginal gain is positive.
    """
    kind = family.kind
    stream = GraphForwardStream(digests)
    strict = kind in (DISTANCE, REVERSE_RANK)

    def run():
        ranks = instances.rank_table() if kind == REVERSE_RANK else None
        for h in range(instances.count):
            base = h * instances.n
            if kind == DISTANCE:
                frontier = _DijkstraFrontier(instances.adj[h], i)
                to_utility = family.alpha
            elif kind == REVERSE_RANK:
                frontier = _DijkstraFrontier(instances.tadj[h], i)
                to_utility = None  # rank lookup per settled node
            elif kind == SURVIVAL:
                frontier = _WidestFrontier(instances.adj[h], i, instances.caps[h])
                to_utility = None
            else:
                frontier = _ReachFrontier(instances.adj[h], i)
                to_utility = None
            while (step := frontier.next()) is not None:
                node, label = step
                stream.visited += 1
                if kind == DISTANCE:
                    u = to_utility(label)
                    if u <= 0.0:
                        break  # settle order is by distance, the rest are zero too
                elif kind == REVERSE_RANK:
                    u = family.alpha(ranks.pi(h, node, i))
                    if u <= 0.0:
                        continue  # dead branch; ranks are only tree-monotone
                elif kind == SURVIVAL:
                    u = label
                    if u <= 0.0:
                        break
                else:
                    u = 1.0
                digest = digests[base + node]
                level = digest.prune_level()
                pruned = (u < level) if strict else (u <= level)
                if not pruned:
                    frontier.expand(node)
                if digest.marg(u) > 0.0:
                    yield base + node, u

    return stream._bind(run())


def marg_gain(
    instances: GraphInstanceSet,
    family: UtilityFamily,
    i: int,
    digests: DigestTable,
) -> float:
    """Marginal influence of item i against the current digests; no mutation."""
    return sum(digests[j].marg(u) for j, u in forward_search(instances, family, i, digests))


def add_seed(
    instances: GraphInstanceSet,
    family: UtilityFamily,
    i: int,
    digests: DigestTable,
    seeds: set[int] | None = None,
) -> float:
    """Add item i to the seed set: fold its utilities into every digest it
    still improves and return the marginal gain."""
    if seeds is not None:
        if i in seeds:
            raise ValueError(f"item {i} is already a seed")
        seeds.add(i)
    gain = 0.0
    for j, u in forward_search(instances, family, i, digests):
        gain += digests[j].marg(u)
        digests[j].update(u)
    digests.mark_seed_added()
    return gain


class GraphProblem:
    """Oracle bundle over graph instances, as consumed by the maximizer."""

    def __init__(self, instances: GraphInstanceSet, family: UtilityFamily, spec):
        self.instances = instances
        self.family = family
        self.spec = spec
        self.n_items = instances.n
        self.n_elements = instances.n_elements
        if family.kind == REVERSE_RANK:
            instances.rank_table()

    def weight(self, j: int) -> float:
        return 1.0

    def rev_stream(self, j: int) -> GraphRevStream:
        return rev_sorted_stream(self.instances, self.family, j)

    def forward_stream(self, i: int, digests: DigestTable) -> GraphForwardStream:
        return forward_search(self.instances, self.family, i, digests)


# ---------------------------------------------------------------------------
# reference (brute-force) utilities


def survival_thresholds_brute(
    instances: GraphInstanceSet, h: int, src: int
) -> list[float]:
    """Survival thresholds from src by a descending threshold sweep.

    Adds edges in decreasing lifetime order and reruns plain reachability
    after each distinct lifetime; the first threshold at which a node
    becomes reachable is its survival threshold.  Independent of the
    max-min search used by the oracles.
    """
    n = instances.n
    tau = [0.0] * n
    tau[src] = instances.caps[h]
    edges = sorted(instances.instances[h], key=lambda e: -e[2])
    adj: list[list[int]] = [[] for _ in range(n)]
    reached = {src}
    pos = 0
    while pos < len(edges):
        t = edges[pos][2]
        while pos < len(edges) and edges[pos][2] == t:
            s, d, _ = edges[pos]
            adj[s].append(d)
            pos += 1
        queue = [v for v in reached]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in reached:
                    reached.add(w)
                    tau[w] = t
                    queue.append(w)
    return tau


def pairwise_utility(
    instances: GraphInstanceSet, family: UtilityFamily, i: int, j: int
) -> float:
    """Reference non-incremental utility of item i to element j."""
    v, h = instances.node_of(j), instances.instance_of(j)
    kind = family.kind
    if kind == DISTANCE:
        d = instances.distances(h, source=i)[v]
        return 0.0 if math.isinf(d) else family.alpha(d)
    if kind == REVERSE_RANK:
        ranks = ranks_from_distances(instances.distances(h, source=v))
        pi = float(ranks[i])
        return 0.0 if math.isinf(pi) else family.alpha(pi)
    if kind == REACHABILITY:
        d = _sp_dijkstra(instances.csr(h, unit=True), indices=[i], unweighted=True)[0][v]
        return 0.0 if math.isinf(d) else 1.0
    return survival_thresholds_brute(instances, h, i)[v]


def to_utility_matrix(
    instances: GraphInstanceSet, family: UtilityFamily
) -> SparseUtilityMatrix:
    """Materialize the full utility matrix through the reference routines."""
    n = instances.n
    entries = []
    for h in range(instances.count):
        base = h * n
        kind = family.kind
        if kind == DISTANCE:
            dist = instances.distances(h)
            for i in range(n):
                for v in range(n):
                    if math.isfinite(dist[i][v]):
                        u = family.alpha(dist[i][v])
                        if u > 0:
                            entries.append((i, base + v, u))
        elif kind == REVERSE_RANK:
            dist = instances.distances(h)
            for v in range(n):
                ranks = ranks_from_distances(dist[v])
                for i in range(n):
                    if math.isfinite(ranks[i]):
                        u = family.alpha(ranks[i])
                        if u > 0:
                            entries.append((i, base + v, u))
        elif kind == REACHABILITY:
            dist = _sp_dijkstra(instances.csr(h, unit=True), unweighted=True)
            for i in range(n):
                for v in range(n):
                    if math.isfinite(dist[i][v]):
                        entries.append((i, base + v, 1.0))
        else:
            for i in range(n):
                taus = survival_thresholds_brute(instances, h, i)
                for v in range(n):
                    if taus[v] > 0:
                        entries.append((i, base + v, taus[v]))
    return SparseUtilityMatrix(n, instances.n_elements, entries)
