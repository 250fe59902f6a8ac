"""Non-crossing pair partitions, adopted sequences and adopted trees.

A pair partition of {1, ..., k} is stored as a partner array: ``partner[i]``
is the (0-based) index paired with ``i``. Display is 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

MAX_CATALAN = 30
MAX_K = 16


@dataclass(frozen=True)
class PairPartition:
    partner: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(v) for v in self.partner)
        object.__setattr__(self, "partner", p)
        k = len(p)
        if k == 0 or k % 2:
            raise ValueError(f"pair partition needs even positive size, got {k}")
        for i, j in enumerate(p):
            if not 0 <= j < k or j == i or p[j] != i:
                raise ValueError(f"invalid partner array {p}")

    @property
    def k(self) -> int:
        return len(self.partner)

    @classmethod
    def from_blocks(cls, blocks, one_based: bool = True) -> "PairPartition":
        blocks = [tuple(b) for b in blocks]
        k = 2 * len(blocks)
        partner = [-1] * k
        off = 1 if one_based else 0
        for a, b in blocks:
            a, b = a - off, b - off
            if not (0 <= a < k and 0 <= b < k) or partner[a] != -1 or partner[b] != -1:
                raise ValueError(f"invalid blocks {blocks}")
            partner[a], partner[b] = b, a
        return cls(tuple(partner))

    def blocks(self) -> list[tuple[int, int]]:
        """Blocks as sorted 1-based pairs, ordered by their smaller element."""
        return [(i + 1, j + 1) for i, j in enumerate(self.partner) if i < j]

    def __str__(self) -> str:
        return "{" + ", ".join(f"{{{a},{b}}}" for a, b in self.blocks()) + "}"


@dataclass(frozen=True)
class AdoptedSequence:
    labels: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def node_count(self) -> int:
        return len(set(self.labels))


@dataclass(frozen=True)
class AdoptedGraph:
    node_count: int
    edges: frozenset

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.node_count)]
        for a, b in sorted(tuple(sorted(e)) for e in self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def is_tree(self) -> bool:
        if len(self.edges) != self.node_count - 1:
            return False
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            for v in adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.node_count


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("catalan index must be non-negative")
    if m > MAX_CATALAN:
        raise ValueError(f"catalan index {m} exceeds supported range {MAX_CATALAN}")
    return comb(2 * m, m) // (m + 1)


def _check_k(k: int, kmax: int = MAX_K) -> None:
    if k % 2 or not 2 <= k <= kmax:
        raise ValueError(f"k must be even with 2 <= k <= {kmax}, got {k}")


@lru_cache(maxsize=None)
def _nc_matchings(lo: int, hi: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    # all non-crossing perfect matchings of the index range [lo, hi)
    if lo >= hi:
        return ((),)
    out = []
    for j in range(lo + 1, hi, 2):
        for inner in _nc_matchings(lo + 1, j):
            for outer in _nc_matchings(j + 1, hi):
                out.append(((lo, j),) + inner + outer)
    return tuple(out)


def enumerate_nc_pair_partitions(k: int) -> list[PairPartition]:
    """All non-crossing pair partitions of {1..k}, sorted by partner array."""
    _check_k(k)
    result = []
    for matching in _nc_matchings(0, k):
        partner = [0] * k
        for a, b in matching:
            partner[a], partner[b] = b, a
        result.append(PairPartition(tuple(partner)))
    result.sort(key=lambda p: p.partner)
    return result


def enumerate_pair_partitions(k: int) -> list[PairPartition]:
    """All (k-1)!! pair partitions, crossing ones included. Test helper."""
    if k % 2 or k < 2:
        raise ValueError(f"k must be even and positive, got {k}")

    def rec(free):
        if not free:
            yield ()
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            rest = free[1:idx] + free[idx + 1:]
            for tail in rec(rest):
                yield ((a, b),) + tail

    out = []
    for matching in rec(tuple(range(k))):
        partner = [0] * k
        for a, b in matching:
            partner[a], partner[b] = b, a
        out.append(PairPartition(tuple(partner)))
    out.sort(key=lambda p: p.partner)
    return out


def is_noncrossing(pi: PairPartition) -> bool:
    blocks = [(i, j) for i, j in enumerate(pi.partner) if i < j]
    for (a, c), (b, d) in combinations(blocks, 2):
        if a < b < c < d or b < a < d < c:
            return False
    return True


def _require_nc(pi: PairPartition) -> None:
    if not is_noncrossing(pi):
        raise ValueError(f"partition {pi} is crossing")


def find_leaf_block(pi: PairPartition) -> int:
    """Smallest 1-based m with {m, m+1} a block; the wrap block {k, 1} is tried last."""
    _require_nc(pi)
    k = pi.k
    for m in range(k - 1):
        if pi.partner[m] == m + 1:
            return m + 1
    if pi.partner[k - 1] == 0:
        return k
    raise AssertionError("non-crossing pair partition without adjacent block")


def _remove_positions(partner: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    keep = [i for i in range(len(partner)) if i not in (a, b)]
    new_index = {old: new for new, old in enumerate(keep)}
    return tuple(new_index[partner[i]] for i in keep)


def canonical_labels(seq) -> tuple[int, ...]:
    """Relabel a sequence by order of first appearance."""
    mapping: dict = {}
    return tuple(mapping.setdefault(v, len(mapping)) for v in seq)


def _adopted_labels(partner: tuple[int, ...]) -> list[int]:
    k = len(partner)
    if k == 2:
        return [0, 1]
    m = next((i for i in range(k - 1) if partner[i] == i + 1), None)
    if m is None:
        # only the wrap block {k,1} is adjacent: the leaf sits at position 0
        reduced = _adopted_labels(_remove_positions(partner, k - 1, 0))
        new = max(reduced) + 1
        # g_k = g_2 and g_1 is the new leaf
        return [new] + reduced + [reduced[0]]
    reduced = _adopted_labels(_remove_positions(partner, m, m + 1))
    new = max(reduced) + 1
    # g_m = g_{m+2} (cyclic) and g_{m+1} is a fresh node
    anchor = reduced[m] if m < len(reduced) else reduced[0]
    return reduced[:m] + [anchor, new] + reduced[m:]


def build_adopted_sequence(pi: PairPartition) -> AdoptedSequence:
    _require_nc(pi)
    return AdoptedSequence(canonical_labels(_adopted_labels(pi.partner)))


@lru_cache(maxsize=200_000)
def _verify(partner: tuple[int, ...], labels: tuple[int, ...]) -> bool:
    k = len(partner)
    if len(labels) != k:
        return False
    if len(set(labels)) != k // 2 + 1:
        return False
    if k == 2:
        return labels[0] != labels[1]
    # every block {m, m+l}: g_m = g_{m+l+1} and g_{m+1} = g_{m+l} (indices cyclic)
    for m, j in enumerate(partner):
        if j <= m:
            continue
        if labels[m] != labels[(j + 1) % k] or labels[(m + 1) % k] != labels[j]:
            return False
    found = False
    for m in range(k):
        nxt = (m + 1) % k
        if partner[m] != nxt:
            continue
        found = True
        leaf = labels[nxt]
        if labels[m] != labels[(m + 2) % k]:
            return False
        if labels.count(leaf) != 1:
            return False
        reduced = tuple(v for i, v in enumerate(labels) if i not in (m, nxt))
        if not _verify(_remove_positions(partner, m, nxt), reduced):
            return False
    return found


def verify_adopted(pi: PairPartition, seq) -> bool:
    """Check the recursive adopted-sequence definition plus the per-block labeling rule."""
    labels = tuple(seq.labels if isinstance(seq, AdoptedSequence) else seq)
    if len(labels) != pi.k or not is_noncrossing(pi):
        return False
    return _verify(pi.partner, labels)


def adopted_graph(pi: PairPartition) -> AdoptedGraph:
    seq = build_adopted_sequence(pi).labels
    k = len(seq)
    edges = frozenset(frozenset((seq[m], seq[(m + 1) % k])) for m in range(k))
    return AdoptedGraph(node_count=k // 2 + 1, edges=edges)
