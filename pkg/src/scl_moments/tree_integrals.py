"""alpha**2-integrals over adopted trees and the limiting moments they sum to."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .partitions import (
    MAX_K,
    PairPartition,
    adopted_graph,
    catalan,
    enumerate_nc_pair_partitions,
    is_noncrossing,
)
from .weights import DEFAULT_GRID, PhiReport, WeightFn, is_phi_constant, kernel_matrix, phi0

BRUTE_MAX_K = 6
BRUTE_MAX_GRID = 64


def _require_nc(pi: PairPartition) -> None:
    if not is_noncrossing(pi):
        raise ValueError(f"partition {pi} is crossing")


def _rooted_children(adj, root):
    parent = {root: None}
    order = [root]
    for v in order:
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    children = {v: [] for v in order}
    for v in order[1:]:
        children[parent[v]].append(v)
    return children, order


def _shape(v, children, memo):
    # AHU code of the rooted subtree at v; equal codes give equal messages
    if v not in memo:
        memo[v] = "(" + "".join(sorted(_shape(c, children, memo) for c in children[v])) + ")"
    return memo[v]


def _tree_integral(adj, root, K, cache):
    n = K.shape[0]
    children, order = _rooted_children(adj, root)
    codes: dict = {}
    for v in order:
        _shape(v, children, codes)
    # cache maps subtree code -> message sent to the parent, a function of x_parent
    for v in reversed(order[1:]):
        code = codes[v]
        if code in cache:
            continue
        prod = np.ones(n)
        for c in children[v]:
            prod = prod * cache[codes[c]]
        cache[code] = K @ prod / n
    prod = np.ones(n)
    for c in children[root]:
        prod = prod * cache[codes[c]]
    return float(prod.mean())


def j_alpha(pi: PairPartition, w: WeightFn, grid_n: int = DEFAULT_GRID, *,
            root: int = 0, cache: dict | None = None) -> float:
    """Integral over [0,1]^(k/2+1) of the product of alpha**2 over adopted-tree edges.

    Leaves are folded into their parents one subtree at a time; each fold is
    a single kernel matvec, so the cost is O(k * grid_n**2).
    """
    _require_nc(pi)
    K = kernel_matrix(w, grid_n)
    graph = adopted_graph(pi)
    return _tree_integral(graph.adjacency(), root, K, {} if cache is None else cache)


def j_alpha_eliminate(pi: PairPartition, w: WeightFn, grid_n: int, leaf_order) -> float:
    """Same integral, folding leaves in the given order (node ids of the adopted tree)."""
    _require_nc(pi)
    K = kernel_matrix(w, grid_n)
    n = grid_n
    adj = {v: set(nb) for v, nb in enumerate(adopted_graph(pi).adjacency())}
    factor = {v: np.ones(n) for v in adj}
    for leaf in leaf_order:
        if len(adj) == 1:
            break
        if len(adj[leaf]) != 1:
            raise ValueError(f"node {leaf} is not a leaf at this point")
        (parent,) = adj.pop(leaf)
        adj[parent].discard(leaf)
        factor[parent] = factor[parent] * (K @ factor.pop(leaf)) / n
    if len(adj) != 1:
        raise ValueError("leaf order does not eliminate the whole tree")
    (last,) = adj
    return float(factor[last].mean())


def _brute_kernel(w: WeightFn, grid_n: int, sub: int) -> np.ndarray:
    # point evaluations of alpha**2 on a sub x sub midpoint lattice of each cell pair
    u = (np.arange(sub) + 0.5) / sub
    du = (u[:, None] - u[None, :]).ravel()
    d = np.arange(-(grid_n - 1), grid_n)
    t = np.clip(np.abs(d[:, None] + du[None, :]) / grid_n, 0.0, 1.0)
    prof = (np.asarray(w(t)) ** 2).mean(axis=1)
    idx = np.arange(grid_n)
    return prof[(idx[:, None] - idx[None, :]) + grid_n - 1]


def j_alpha_bruteforce(pi: PairPartition, w: WeightFn, grid_n: int = BRUTE_MAX_GRID,
                       sub: int = 32) -> float:
    """Direct nested sum over all k/2+1 node variables; a test oracle for j_alpha."""
    _require_nc(pi)
    if pi.k > BRUTE_MAX_K:
        raise ValueError(f"brute force limited to k <= {BRUTE_MAX_K}")
    if grid_n > BRUTE_MAX_GRID or grid_n < 1:
        raise ValueError(f"brute force limited to grid_n <= {BRUTE_MAX_GRID}")
    K = _brute_kernel(w, grid_n, sub)
    graph = adopted_graph(pi)
    V = graph.node_count
    edges = sorted(tuple(sorted(e)) for e in graph.edges)
    total = 0.0
    rest = V - 1
    for x0 in range(grid_n):
        tensor = np.ones((grid_n,) * rest)
        for a, b in edges:
            if a == 0:
                shape = [1] * rest
                shape[b - 1] = grid_n
                tensor = tensor * K[x0].reshape(shape)
            else:
                shape = [1] * rest
                shape[a - 1] = grid_n
                shape[b - 1] = grid_n
                tensor = tensor * K.reshape(shape)
        total += tensor.sum()
    return float(total / grid_n ** V)


def theoretical_moment(k: int, w: WeightFn, grid_n: int = DEFAULT_GRID,
                       normalized: bool = False, *, cache: dict | None = None) -> float:
    if k < 1:
        raise ValueError("moment order must be positive")
    if k % 2:
        return 0.0
    if k > MAX_K:
        raise ValueError(f"even moments supported up to k = {MAX_K}")
    cache = {} if cache is None else cache
    total = 0.0
    for pi in enumerate_nc_pair_partitions(k):
        total += j_alpha(pi, w, grid_n, cache=cache)
    if normalized:
        total /= phi0(w, grid_n) ** (k // 2)
    return total


@dataclass
class MomentTable:
    weight: WeightFn
    grid_n: int
    normalized: bool
    entries: dict[int, float] = field(default_factory=dict)

    def rows(self):
        for k, mu in sorted(self.entries.items()):
            cat = catalan(k // 2) if k % 2 == 0 else 0
            yield k, mu, cat, mu - cat


def moment_table(k_max: int, w: WeightFn, grid_n: int = DEFAULT_GRID,
                 normalized: bool = False) -> MomentTable:
    cache: dict = {}
    table = MomentTable(w, grid_n, normalized)
    for k in range(1, k_max + 1):
        table.entries[k] = theoretical_moment(k, w, grid_n, normalized, cache=cache)
    return table


@dataclass
class SCLVerdict:
    verdict: bool
    phi_report: PhiReport
    moment_gap: float


def scl_verdict(w: WeightFn, tol: float = 1e-3, grid_n: int = DEFAULT_GRID) -> SCLVerdict:
    """Semicircle law for the phi0-rescaled ensemble holds iff phi is constant.

    The normalized fourth moment exceeds 2 exactly when phi is not constant,
    so ``moment_gap`` is positive evidence of failure.
    """
    report = is_phi_constant(w, tol, grid_n)
    gap = theoretical_moment(4, w, grid_n, normalized=True) - 2.0
    return SCLVerdict(report.constant_verdict, report, gap)


def all_leaf_orders(pi: PairPartition, limit: int = 50):
    """Enumerate up to ``limit`` valid leaf-elimination orders of the adopted tree."""
    adj0 = {v: frozenset(nb) for v, nb in enumerate(adopted_graph(pi).adjacency())}
    out = []

    def rec(adj, prefix):
        if len(out) >= limit:
            return
        if len(adj) == 1:
            out.append(tuple(prefix))
            return
        for v in sorted(adj):
            if len(adj[v]) == 1:
                nxt = {u: nb - {v} for u, nb in adj.items() if u != v}
                rec(nxt, prefix + [v])

    rec(adj0, [])
    return out


__all__ = [
    "MomentTable", "SCLVerdict", "all_leaf_orders", "j_alpha", "j_alpha_bruteforce",
    "j_alpha_eliminate", "moment_table", "scl_verdict", "theoretical_moment",
]
