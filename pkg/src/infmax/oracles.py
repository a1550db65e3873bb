"""Oracle contracts over explicit matrices plus brute-force baselines.

Two access patterns drive the sketch-based maximizer:

* reverse sorted access: for one element, stream (item, utility) pairs by
  non-increasing utility;
* forward search: for one item, stream every element where the item still
  has positive marginal utility given the current digests.

This module provides the matrix-backed implementations and the slow,
obviously-correct references (exact influence by enumeration, exact
greedy by full recomputation, exhaustive optimum) used as test baselines.
"""

import itertools
from typing import Iterable

from .aggregation import AggregationSpec, DigestTable, StaleStreamError, aggregate
from .greedy import GreedySequence, SeedRecord
from .matrix import SparseUtilityMatrix


class MatrixRevStream:
    """Cursor over one pre-sorted matrix column.

    pop() yields (item, utility) by non-increasing utility, ties by
    ascending item id; top() peeks without consuming.  Exhausted streams
    return None.  Streams are single-pass; build a new one to restart.
    """

    def __init__(self, matrix: SparseUtilityMatrix, j: int):
        if not 0 <= j < matrix.n_elements:
            raise ValueError(f"unknown element {j}")
        self._col = matrix.sorted_cols[j]
        self._pos = 0

    def top(self) -> tuple[int, float] | None:
        if self._pos >= len(self._col):
            return None
        return self._col[self._pos]

    def pop(self) -> tuple[int, float] | None:
        t = self.top()
        if t is not None:
            self._pos += 1
        return t

    def close(self) -> None:
        self._col = []
        self._pos = 0


class MatrixForwardStream:
    """Iterator over the elements where an item still gains.

    Holds a read-only view of the digest table; iterating after another
    seed has been committed raises StaleStreamError.
    """

    def __init__(self, matrix: SparseUtilityMatrix, i: int, digests: DigestTable):
        if not 0 <= i < matrix.n_items:
            raise ValueError(f"unknown item {i}")
        self._row = matrix.rows[i]
        self._pos = 0
        self._digests = digests
        self._version = digests.version
        self.visited = 0

    def __iter__(self):
        return self

    def __next__(self) -> tuple[int, float]:
        if self._digests.version != self._version:
            raise StaleStreamError("forward search used after a seed was added")
        while self._pos < len(self._row):
            j, u = self._row[self._pos]
            self._pos += 1
            self.visited += 1
            if self._digests[j].marg(u) > 0.0:
                return j, u
        raise StopIteration


def matrix_rev_sorted_stream(matrix: SparseUtilityMatrix, j: int) -> MatrixRevStream:
    return MatrixRevStream(matrix, j)


def matrix_forward_search(
    matrix: SparseUtilityMatrix, i: int, digests: DigestTable
) -> MatrixForwardStream:
    return MatrixForwardStream(matrix, i, digests)


class MatrixProblem:
    """Oracle bundle over an explicit matrix, as consumed by the maximizer."""

    def __init__(self, matrix: SparseUtilityMatrix, spec: AggregationSpec):
        self.matrix = matrix
        self.spec = spec
        self.n_items = matrix.n_items
        self.n_elements = matrix.n_elements

    def weight(self, j: int) -> float:
        return self.matrix.weight(j)

    def rev_stream(self, j: int) -> MatrixRevStream:
        return matrix_rev_sorted_stream(self.matrix, j)

    def forward_stream(self, i: int, digests: DigestTable) -> MatrixForwardStream:
        return matrix_forward_search(self.matrix, i, digests)


def exact_influence(
    matrix: SparseUtilityMatrix, spec: AggregationSpec, seeds: Iterable[int]
) -> float:
    """Influence of a seed set by direct enumeration (no digests)."""
    seed_list = list(seeds)
    total = 0.0
    for j in range(matrix.n_elements):
        vals = matrix.column_utilities(j, seed_list)
        if vals:
            total += matrix.weight(j) * aggregate(spec, vals)
    return total


def exact_greedy(matrix: SparseUtilityMatrix, spec: AggregationSpec) -> GreedySequence:
    """Greedy sequence by full recomputation each step; ties by ascending id.

    Quadratic reference used to validate the lazy implementation.
    """
    remaining = list(range(matrix.n_items))
    seq: GreedySequence = []
    selected: list[int] = []
    current = 0.0
    while remaining:
        best_i, best_gain = None, None
        for i in remaining:
            gain = exact_influence(matrix, spec, selected + [i]) - current
            if best_gain is None or gain > best_gain:
                best_i, best_gain = i, gain
        selected.append(best_i)
        remaining.remove(best_i)
        current += best_gain
        seq.append(SeedRecord(best_i, None, best_gain, current))
    return seq


def optimal_subset(
    matrix: SparseUtilityMatrix, spec: AggregationSpec, s: int
) -> tuple[tuple[int, ...], float]:
    """Exhaustive maximum of influence over all size-s seed sets."""
    if s <= 0:
        raise ValueError("subset size must be positive")
    if matrix.n_items > 20:
        raise ValueError("exhaustive search capped at 20 items")
    s = min(s, matrix.n_items)
    best_set, best_val = None, None
    for combo in itertools.combinations(range(matrix.n_items), s):
        val = exact_influence(matrix, spec, combo)
        if best_val is None or val > best_val:
            best_set, best_val = combo, val
    return best_set, best_val
