"""Lazy approximate greedy maximization over an explicit utility matrix.

CELF-style lazy evaluation: items sit in a max heap keyed by their
marginal influence when last evaluated.  Since marginal influence only
shrinks as seeds are added, a popped item whose fresh gain is within
(1 - epsilon) of its stale priority is guaranteed to be an approximate
argmax and is selected on the spot.
"""

import heapq
from dataclasses import dataclass

from .aggregation import AggregationSpec, DigestTable
from .matrix import SparseUtilityMatrix


@dataclass
class SeedRecord:
    """One step of a greedy sequence."""

    item: int
    estimate: float | None  # priority/estimate at selection time, None if exact
    gain: float  # exact marginal influence when selected
    cumulative: float
    below_cutoff: bool = False


GreedySequence = list[SeedRecord]


def sequence_items(seq: GreedySequence, selected_only: bool = True) -> list[int]:
    return [r.item for r in seq if not (selected_only and r.below_cutoff)]


def lazy_greedy(
    matrix: SparseUtilityMatrix,
    spec: AggregationSpec,
    epsilon: float = 0.0,
    stats: dict | None = None,
) -> GreedySequence:
    """Compute the full greedy sequence with lazily re-evaluated priorities.

    Every selected item has exact marginal influence at least
    (1 - epsilon) times its heap priority, which upper-bounds the true
    maximum; ties pop by ascending item id.  Items whose gain falls to at
    most max_single/n_items^2 are dropped from the heap and appended at
    the end flagged below_cutoff, so the result is a full permutation.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    if matrix.m == 0:
        return []
    digests = DigestTable(matrix.n_elements, spec)
    weights = matrix.element_weights

    heap = []  # (-priority, item)
    max_single = 0.0
    for i in range(matrix.n_items):
        p = matrix.singleton_influence(i)
        max_single = max(max_single, p)
        heapq.heappush(heap, (-p, i))
    cutoff = max_single / (matrix.n_items ** 2)

    seq: GreedySequence = []
    dropped: GreedySequence = []
    cumulative = 0.0
    pops = 0
    while heap:
        neg_p, i = heapq.heappop(heap)
        priority = -neg_p
        pops += 1
        gain = sum(weights[j] * digests.marg(j, u) for j, u in matrix.rows[i])
        if gain >= (1.0 - epsilon) * priority:
            for j, u in matrix.rows[i]:
                digests.update(j, u)
            digests.mark_seed_added()
            cumulative += gain
            seq.append(SeedRecord(i, priority, gain, cumulative))
        elif gain > cutoff:
            heapq.heappush(heap, (-gain, i))
        else:
            dropped.append(SeedRecord(i, priority, gain, cumulative, below_cutoff=True))
    for rec in dropped:
        rec.cumulative = cumulative
    if stats is not None:
        stats["digest_ops"] = digests.marg_calls + digests.update_calls
        stats["pops"] = pops
    return seq + dropped
