"""Equivalence relations on index pairs that couple matrix entries.

A relation on {1..N}^2 is stored as two N x N arrays: the class id of each
pair and a +-1 sign. Entries whose pairs share a class are built from the
same primitive random value multiplied by the pair's sign.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_COUNT_N = 512


@dataclass(frozen=True, eq=False)
class EquivalenceRelation:
    class_ids: np.ndarray
    signs: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        ids = np.asarray(self.class_ids, dtype=np.int64)
        sg = np.asarray(self.signs, dtype=np.int8)
        if ids.ndim != 2 or ids.shape[0] != ids.shape[1] or sg.shape != ids.shape:
            raise ValueError("class_ids and signs must be square arrays of equal shape")
        if not np.array_equal(ids, ids.T):
            raise ValueError("relation must satisfy (p,q) ~ (q,p)")
        if not np.array_equal(sg, sg.T):
            raise ValueError("signs must be symmetric")
        if not np.all(np.abs(sg) == 1):
            raise ValueError("signs must be +1 or -1")
        ids.setflags(write=False)
        sg.setflags(write=False)
        object.__setattr__(self, "class_ids", ids)
        object.__setattr__(self, "signs", sg)

    @property
    def n(self) -> int:
        return self.class_ids.shape[0]

    def class_of(self, p: int, q: int) -> tuple[int, int]:
        """(class id, sign) of the 1-based pair (p, q)."""
        if not (1 <= p <= self.n and 1 <= q <= self.n):
            raise IndexError(f"pair ({p},{q}) outside 1..{self.n}")
        return int(self.class_ids[p - 1, q - 1]), int(self.signs[p - 1, q - 1])

    def related(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        return self.class_of(*a)[0] == self.class_of(*b)[0]


def wigner_relation(n: int) -> EquivalenceRelation:
    if n < 1:
        raise ValueError("N must be positive")
    i = np.arange(n)
    lo = np.minimum(i[:, None], i[None, :])
    hi = np.maximum(i[:, None], i[None, :])
    return EquivalenceRelation(lo * n + hi, np.ones((n, n), dtype=np.int8), "wigner")


def block_relation(n: int, minus: bool = False) -> EquivalenceRelation:
    """Relation of the 2N x 2N matrix [[A, B], [B^T, +-A]] with A symmetric."""
    if n < 1:
        raise ValueError("N must be positive")
    size = 2 * n
    i = np.arange(size)
    r, c = i[:, None], i[None, :]
    rb, cb = r // n, c // n
    rm, cm = r % n, c % n
    a_ids = np.minimum(rm, cm) * n + np.maximum(rm, cm)
    # B[i, j] sits at (i, j + N) and mirrors to (j + N, i)
    b_row = np.where(rb == 0, rm, cm)
    b_col = np.where(rb == 0, cm, rm)
    b_ids = n * n + b_row * n + b_col
    ids = np.where(rb == cb, a_ids, b_ids)
    signs = np.ones((size, size), dtype=np.int8)
    if minus:
        signs[(rb == 1) & (cb == 1)] = -1
    return EquivalenceRelation(ids, signs, "block-minus" if minus else "block")


def read_relation_table(path) -> EquivalenceRelation:
    """Read lines ``p q class_id sign`` (1-based); every pair must be listed."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            parts = line.replace(",", " ").split()
            if len(parts) != 4:
                raise ValueError(f"relation table line needs 'p q class_id sign': {line!r}")
            rows.append([int(x) for x in parts])
    if not rows:
        raise ValueError(f"empty relation table {path}")
    arr = np.array(rows, dtype=np.int64)
    n = int(arr[:, :2].max())
    if arr[:, :2].min() < 1:
        raise ValueError("relation table indices are 1-based")
    ids = np.full((n, n), -1, dtype=np.int64)
    signs = np.zeros((n, n), dtype=np.int64)
    ids[arr[:, 0] - 1, arr[:, 1] - 1] = arr[:, 2]
    signs[arr[:, 0] - 1, arr[:, 1] - 1] = arr[:, 3]
    if np.any(signs == 0):
        raise ValueError(f"relation table {path} does not cover all {n}x{n} pairs")
    return EquivalenceRelation(ids, signs, f"table:{path}")


def write_relation_table(rel: EquivalenceRelation, path) -> None:
    with open(path, "w") as fh:
        for p in range(rel.n):
            for q in range(rel.n):
                fh.write(f"{p + 1} {q + 1} {rel.class_ids[p, q]} {rel.signs[p, q]}\n")


def parse_relation(spec: str, n: int) -> EquivalenceRelation:
    """``wigner``, ``block``, ``block-minus`` (total size n, even) or ``table:<path>``."""
    s = spec.strip().lower()
    if s == "wigner":
        return wigner_relation(n)
    if s in ("block", "block-plus", "block-minus"):
        if n % 2:
            raise ValueError("block relations need an even total dimension")
        return block_relation(n // 2, minus=s == "block-minus")
    if spec.startswith("table:"):
        rel = read_relation_table(spec[len("table:"):])
        if rel.n != n:
            raise ValueError(f"relation table has size {rel.n}, expected {n}")
        return rel
    raise ValueError(f"unknown relation {spec!r}")


@dataclass
class ConditionReport:
    n: int
    c1_max: int
    c2_max: int
    c3_count: int
    band_b: int | None = None

    @property
    def scale(self) -> float:
        return float(self.band_b if self.band_b is not None else self.n) ** 2

    @property
    def c1_ratio(self) -> float:
        return self.c1_max / self.scale

    @property
    def c3_ratio(self) -> float:
        return self.c3_count / self.scale


def condition_counts(rel: EquivalenceRelation, band_b: int | None = None) -> ConditionReport:
    """Exact dependence counts, grouped by class (O(N^2 log N), no quadruple scan).

    c1 = max_p #{(q,r,s): (p,q) ~ (r,s)}
    c2 = max_{p,q,r} #{s: (p,q) ~ (r,s)}
    c3 = #{(p,q,r): (p,q) ~ (q,r), r != p}
    """
    n = rel.n
    if n > MAX_COUNT_N:
        raise ValueError(f"condition counting limited to N <= {MAX_COUNT_N}")
    if band_b is not None and band_b < 1:
        raise ValueError("band width must be positive")
    ids = rel.class_ids
    _, inverse, sizes = np.unique(ids.ravel(), return_inverse=True, return_counts=True)
    inverse = inverse.reshape(n, n)
    c1 = int(sizes[inverse].sum(axis=1).max())

    # members of each class per row
    rows = np.broadcast_to(np.arange(n)[:, None], (n, n))
    key = inverse.astype(np.int64) * n + rows
    keys, row_counts = np.unique(key.ravel(), return_counts=True)
    c2 = int(row_counts.max())

    # for each (p, q): members of class(p, q) lying in row q, minus the mirror (q, p)
    lookup_key = inverse.astype(np.int64) * n + np.arange(n)[None, :]
    pos = np.searchsorted(keys, lookup_key.ravel())
    in_row_q = row_counts[pos].reshape(n, n)
    c3 = int((in_row_q - 1).sum())
    return ConditionReport(n, c1, c2, c3, band_b)


@dataclass
class GrowthRow:
    n: int
    c1_ratio: float
    c3_ratio: float
    report: ConditionReport


@dataclass
class GrowthReport:
    rows: list[GrowthRow]

    @property
    def c1_decreasing(self) -> bool:
        r = [row.c1_ratio for row in self.rows]
        return all(b < a for a, b in zip(r, r[1:]))

    @property
    def c3_decreasing(self) -> bool:
        r = [row.c3_ratio for row in self.rows]
        return all(b <= a for a, b in zip(r, r[1:]))

    @property
    def monotone_decreasing(self) -> bool:
        return self.c1_decreasing and self.c3_decreasing


def growth_report(rel_builder, ns, band_of=None) -> GrowthReport:
    """Finite-N ratios for a family ``rel_builder(N)``; ``band_of(N)`` switches to b_N^2 scaling."""
    rows = []
    for n in ns:
        rel = rel_builder(n)
        rep = condition_counts(rel, band_of(n) if band_of else None)
        rows.append(GrowthRow(n, rep.c1_ratio, rep.c3_ratio, rep))
    return GrowthReport(rows)
