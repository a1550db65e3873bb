"""Sketch-based approximate greedy maximization over oracle access.

The maximizer never materializes the utility matrix.  It keeps, per item,
a weighted sample of the elements where the item still has marginal
utility.  Elements are assigned fixed random ranks r in (0, 1]; an
element belongs to item i's sample while w * (marginal utility) / r is
at least a global threshold tau, which decays geometrically.  The sum of
sampled marginal utilities clipped below at tau is an unbiased estimate
of the item's marginal influence, so once some item's estimate reaches
k * tau the estimate is trustworthy enough (relative error about
1/sqrt(k)) to validate with one exact marginal-gain computation and, if
it holds up, commit the item as the next seed.

Samples are stored inverted: index[j] lists the items that sampled
element j, in the utility order delivered by the element's reverse
sorted access stream.  Each list is segmented into H entries (marginal
utility >= tau, counted at face value), M entries (below tau but still
sampled, counted as tau) and L entries (lapsed, kept because a lower tau
may revive them).  Segment boundaries move right when tau drops
(move_up) and entries are reclassified or truncated when a new seed
lowers marginal utilities (move_down).
"""

import heapq
import math

import numpy as np

from .aggregation import DigestTable
from .greedy import GreedySequence, SeedRecord


class LazyMaxQueue:
    """Max-priority queue with lazy revision: pushing a key again simply
    supersedes its old heap entries."""

    def __init__(self):
        self._heap: list[tuple[float, int]] = []
        self._prio: dict[int, float] = {}

    def push(self, key: int, priority: float) -> None:
        self._prio[key] = priority
        heapq.heappush(self._heap, (-priority, key))

    def remove(self, key: int) -> None:
        self._prio.pop(key, None)

    def _settle(self) -> tuple[float, int] | None:
        while self._heap:
            negp, key = self._heap[0]
            if self._prio.get(key) == -negp:
                return -negp, key
            heapq.heappop(self._heap)
        return None

    def peek(self) -> tuple[float, int] | None:
        return self._settle()

    def pop(self) -> tuple[float, int] | None:
        t = self._settle()
        if t is None:
            return None
        heapq.heappop(self._heap)
        del self._prio[t[1]]
        return t

    def __len__(self) -> int:
        return len(self._prio)

    def __contains__(self, key: int) -> bool:
        return key in self._prio

    def keys(self):
        return list(self._prio)


def default_sample_size(epsilon: float, n_items: int, n_elements: int) -> int:
    """Sample-size parameter giving ~(1 - epsilon) selections w.h.p."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    return max(2, math.ceil(3.0 * epsilon ** -2 * math.log(n_items + n_elements)))


class SkimRun:
    """State machine for one maximization run; see run_skim for the API."""

    def __init__(
        self,
        problem,
        k: int | None = None,
        lam: float = 0.5,
        epsilon: float = 0.2,
        rng_seed: int = 0,
        rank_mode: str = "uniform",
        trace: list | None = None,
        stats: dict | None = None,
        audit=None,
    ):
        if k is None:
            k = default_sample_size(epsilon, problem.n_items, problem.n_elements)
        if k < 2:
            raise ValueError("sample-size parameter k must be at least 2")
        if not 0.0 < lam < 1.0:
            raise ValueError("threshold decrease factor must lie in (0, 1)")
        self.problem = problem
        self.spec = problem.spec
        self.k = k
        self.lam = lam
        self.epsilon = epsilon
        self.trace = trace
        self.audit = audit
        self.stats = stats if stats is not None else {}
        self.stats.setdefault("forward_yields", 0)
        self.stats.setdefault("rev_pops", 0)
        self.stats.setdefault("exact_evals", 0)

        rng = np.random.default_rng(rng_seed)
        n_el = problem.n_elements
        if rank_mode == "uniform":
            self.rank = (1.0 - rng.random(n_el)).tolist()  # (0, 1]
        elif rank_mode == "permutation":
            order = rng.permutation(n_el)
            self.rank = [0.0] * n_el
            for pos, j in enumerate(order):
                self.rank[j] = (pos + 1) / n_el
        else:
            raise ValueError(f"unknown rank mode {rank_mode!r}")

        self.digests = DigestTable(n_el, self.spec)
        self.rev = [problem.rev_stream(j) for j in range(n_el)]
        self.index: dict[int, list[tuple[int, float]]] = {}
        self.hm: dict[int, int | None] = {}
        self.ml: dict[int, int | None] = {}
        self.est_h = [0.0] * problem.n_items
        self.est_m = [0] * problem.n_items
        # exact H-entry counts: when a count returns to zero the float
        # accumulator is snapped back to 0.0, so cancellation residue can
        # never keep a dead item looking alive
        self.h_count = [0] * problem.n_items
        self.qelements = LazyMaxQueue()
        self.qitems = LazyMaxQueue()
        self.qhml = LazyMaxQueue()
        self.seeds: set[int] = set()
        self.records: GreedySequence = []
        self.coverage = 0.0

        for j in range(n_el):
            t = self.rev[j].top()
            if t is not None:
                _, u = t
                self.qelements.push(j, problem.weight(j) * u / self.rank[j])
        top = self.qelements.peek()
        self.tau = top[0] / (2.0 * k) if top is not None else None

    # -- estimate bookkeeping ------------------------------------------------

    def _estimate(self, i: int) -> float:
        return self.est_h[i] + self.tau * self.est_m[i]

    def _touch(self, i: int) -> None:
        if self.h_count[i] == 0:
            self.est_h[i] = 0.0
        if i not in self.seeds:
            self.qitems.push(i, self._estimate(i))

    def _fresh_max(self) -> float:
        best = 0.0
        for i in self.qitems.keys():
            if i not in self.seeds:
                best = max(best, self._estimate(i))
        return best

    # -- sampling ------------------------------------------------------------

    def _drain(self) -> None:
        """Pull items from reverse streams for every element whose next entry
        may now satisfy the sampling condition."""
        while True:
            top = self.qelements.peek()
            if top is None or top[0] < self.tau:
                return
            _, j = self.qelements.pop()
            self._drain_element(j)

    def _drain_element(self, j: int) -> None:
        stream = self.rev[j]
        w = self.problem.weight(j)
        r = self.rank[j]
        digest = self.digests[j]
        while True:
            t = stream.top()
            if t is None:
                return  # exhausted for good
            i, u = t
            if u < digest.thresh():
                stream.close()  # utilities only shrink from here; retire
                return
            if i in self.seeds:
                stream.pop()
                continue
            c = w * digest.marg(u)
            if c == 0.0:
                stream.pop()
                continue
            if c / r < self.tau:
                self.qelements.push(j, c / r)  # revisit when tau drops
                return
            stream.pop()
            self.stats["rev_pops"] += 1
            entries = self.index.setdefault(j, [])
            entries.append((i, u))
            if c >= self.tau:
                self.est_h[i] += c
                self.h_count[i] += 1
            else:
                self.est_m[i] += 1
                if self.hm.get(j) is None:
                    self.hm[j] = len(entries) - 1
                    self.qhml.push(j, c)
            self._touch(i)

    # -- seed selection ------------------------------------------------------

    def next_seed(self) -> tuple[int, float] | None:
        """Try to certify the current best estimate as the next seed.

        Returns None when no estimate reaches k * tau, or when the top
        estimate fails its exact-gain validation (its priority is then
        replaced by the exact gain and sampling continues).
        """
        if self.audit is not None:
            self.audit(self)
        k_tau = self.k * self.tau
        accept = 1.0 - 1.0 / math.sqrt(self.k)
        q = self.qitems
        while True:
            top = q.peek()
            if top is None or top[0] < k_tau:
                return None
            _, i = q.pop()
            if i in self.seeds:
                continue
            est = self._estimate(i)
            runner = q.peek()
            runner_p = None
            if runner is not None:
                rp, ri = runner
                rfresh = 0.0 if ri in self.seeds else self._estimate(ri)
                if rfresh != rp:
                    q.push(ri, rfresh)  # revalidate the runner-up once
                runner_p = rfresh
            if est >= k_tau and (runner_p is None or est >= runner_p):
                exact = self._marg_gain(i)
                self.stats["exact_evals"] += 1
                if exact >= accept * est:
                    return i, est
                q.push(i, exact)
                return None
            q.push(i, est)

    def _marg_gain(self, i: int) -> float:
        gain = 0.0
        for j, u in self.problem.forward_stream(i, self.digests):
            self.stats["forward_yields"] += 1
            gain += self.problem.weight(j) * self.digests[j].marg(u)
        return gain

    def _process_seed(self, i: int, est: float) -> float:
        gain = 0.0
        for j, u in self.problem.forward_stream(i, self.digests):
            self.stats["forward_yields"] += 1
            self.move_down(j, u, i)
            gain += self.problem.weight(j) * self.digests[j].marg(u)
            self.digests[j].update(u)
        self.digests.mark_seed_added()
        self.seeds.add(i)
        self.qitems.remove(i)
        self.coverage += gain
        self.records.append(SeedRecord(i, est, gain, self.coverage))
        if self.trace is not None:
            self.trace.append((self.tau, i, est, gain))
        return gain

    # -- segment maintenance ---------------------------------------------------

    def move_up(self) -> None:
        """After tau decreased, promote entries whose class improved."""
        while True:
            top = self.qhml.peek()
            if top is None or top[0] < self.tau:
                return
            _, j = self.qhml.pop()
            self._reclassify_up(j)
            self.update_reclass_thresh(j)

    def _reclassify_up(self, j: int) -> None:
        entries = self.index.get(j, [])
        w = self.problem.weight(j)
        r = self.rank[j]
        digest = self.digests[j]
        hm = self.hm.get(j)
        ml = self.ml.get(j)
        touched = set()
        if hm is not None:
            while hm < len(entries):
                i, u = entries[hm]
                c = w * digest.marg(u)
                if c < self.tau:
                    break
                self.est_h[i] += c
                self.h_count[i] += 1
                if ml is None or ml > hm:  # entry was M
                    self.est_m[i] -= 1
                touched.add(i)
                hm += 1
            if ml is not None and ml < hm:
                ml = hm
            if hm >= len(entries):
                hm = None
                ml = None
        if ml is not None:
            start = ml
            while ml < len(entries):
                i, u = entries[ml]
                c = w * digest.marg(u)
                if c < r * self.tau:
                    break
                self.est_m[i] += 1
                touched.add(i)
                ml += 1
            if ml > start and hm is None:
                hm = start  # first revived M; keeps future H-promotion reachable
            if ml >= len(entries):
                ml = None
        self.hm[j] = hm
        self.ml[j] = ml
        for i in touched:
            self._touch(i)

    def move_down(self, j: int, x: float, new_seed: int) -> None:
        """Reclassify element j's entries before its digest absorbs utility x.

        Each entry's marginal utility under the grown seed set is computed
        from the pre-update digest; entries whose new marginal hits zero
        (always including the new seed's own entry) are dropped, the rest
        are re-segmented and the estimate components adjusted.
        """
        entries = self.index.get(j)
        if not entries:
            return
        w = self.problem.weight(j)
        r = self.rank[j]
        tau = self.tau
        digest = self.digests[j]
        ml = self.ml.get(j)
        z = (ml - 1) if ml is not None else (len(entries) - 1)
        kept: list[tuple[int, float]] = []
        hm2: int | None = None
        ml2: int | None = None
        touched = set()
        for pos, (i, u) in enumerate(entries):
            seed_entry = i == new_seed or i in self.seeds
            nc = 0.0 if seed_entry else w * digest.add_marg(x, u)
            if pos > z:
                # L tail: carries no estimate weight, keep while still alive
                if nc > 0.0:
                    kept.append((i, u))
                    if ml2 is None:
                        ml2 = len(kept) - 1
                continue
            oc = w * digest.marg(u)
            touched.add(i)
            if oc >= tau:  # entry was H
                self.est_h[i] -= oc
                self.h_count[i] -= 1
                if nc >= tau:
                    self.est_h[i] += nc
                    self.h_count[i] += 1
                    kept.append((i, u))
                elif nc >= r * tau:
                    self.est_m[i] += 1
                    kept.append((i, u))
                    if hm2 is None:
                        hm2 = len(kept) - 1
                elif nc > 0.0:
                    kept.append((i, u))
                    if ml2 is None:
                        ml2 = len(kept) - 1
            elif oc >= r * tau:  # entry was M
                if nc >= r * tau:
                    kept.append((i, u))
                    if hm2 is None:
                        hm2 = len(kept) - 1
                else:
                    self.est_m[i] -= 1
                    if nc > 0.0:
                        kept.append((i, u))
                        if ml2 is None:
                            ml2 = len(kept) - 1
            else:  # stale L inside the scanned range (defensive)
                if nc > 0.0:
                    kept.append((i, u))
                    if ml2 is None:
                        ml2 = len(kept) - 1
        if kept:
            self.index[j] = kept
        else:
            self.index.pop(j, None)
        self.hm[j] = hm2
        self.ml[j] = ml2
        for i in touched:
            self._touch(i)
        self.qhml.remove(j)
        self.update_reclass_thresh(j)

    def update_reclass_thresh(self, j: int) -> None:
        """Refresh element j's reclassification priority: the largest tau at
        which one of its boundary entries changes segment."""
        entries = self.index.get(j, [])
        w = self.problem.weight(j)
        r = self.rank[j]
        digest = self.digests[j]
        c = 0.0
        hm = self.hm.get(j)
        ml = self.ml.get(j)
        if hm is not None and hm < len(entries):
            i, u = entries[hm]
            c = w * digest.marg(u)
        if ml is not None and ml < len(entries):
            i, u = entries[ml]
            c = max(c, w * digest.marg(u) / r)
        if c > 0.0:
            self.qhml.push(j, c)
        else:
            self.qhml.remove(j)

    # -- driver ----------------------------------------------------------------

    def run(self) -> GreedySequence:
        if self.tau is None:
            return self.records  # no positive utilities at all
        n = self.problem.n_items
        first_gain = None
        while True:
            res = self.next_seed()
            while res is None:
                if self.qelements.peek() is None and self._fresh_max() <= 0.0:
                    self.stats["tau_final"] = self.tau
                    return self.records  # nothing left to sample or select
                if self.tau == 0.0:
                    self.stats["tau_final"] = self.tau
                    return self.records  # threshold underflowed, nothing viable
                self.tau *= self.lam
                self.move_up()
                self._drain()
                res = self.next_seed()
            i, est = res
            gain = self._process_seed(i, est)
            if first_gain is None:
                first_gain = gain
            if gain < first_gain / n ** 2 or len(self.seeds) == n:
                break
        self.stats["tau_final"] = self.tau
        return self.records


def run_skim(
    problem,
    k: int | None = None,
    lam: float = 0.5,
    epsilon: float = 0.2,
    rng_seed: int = 0,
    rank_mode: str = "uniform",
    trace: list | None = None,
    stats: dict | None = None,
    audit=None,
) -> GreedySequence:
    """Approximate greedy sequence using only oracle access.

    problem is an oracle bundle (MatrixProblem or GraphProblem): it
    exposes n_items, n_elements, spec, per-element weights, reverse
    sorted access streams and forward searches.  Deterministic for fixed
    arguments.  trace, when given a list, receives one
    (tau, item, estimate, exact_gain) tuple per selection.
    """
    return SkimRun(
        problem,
        k=k,
        lam=lam,
        epsilon=epsilon,
        rng_seed=rng_seed,
        rank_mode=rank_mode,
        trace=trace,
        stats=stats,
        audit=audit,
    ).run()


def threshold_sample_estimate(
    margs: np.ndarray, ranks: np.ndarray, tau: float, weights: np.ndarray | None = None
) -> float:
    """Inverse-probability estimate of a marginal influence from one rank draw.

    An element j enters the sample when w_j * margs[j] / ranks[j] >= tau
    and then contributes max(w_j * margs[j], tau); the expectation over
    ranks drawn uniformly from (0, 1] is exactly sum(w * margs).
    """
    margs = np.asarray(margs, dtype=float)
    w = np.ones_like(margs) if weights is None else np.asarray(weights, dtype=float)
    wm = w * margs
    sampled = wm / ranks >= tau
    return float(np.maximum(wm, tau)[sampled].sum())
