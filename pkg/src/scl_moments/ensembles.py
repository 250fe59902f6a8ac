"""Seeded sampling of weighted, band and block random matrices with coupled entries."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

from .relations import EquivalenceRelation, block_relation, parse_relation, wigner_relation
from .weights import WeightFn, band, constant, parse_weight, periodic_band, phi0

KINDS = ("weighted", "periodic_band", "band", "slow_band")
BLOCK_MODES = ("none", "plus", "minus")
DISTS = ("rademacher", "gaussian")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str = "weighted"
    n: int = 256
    weight: str = "constant:1"
    rho: float | None = None
    beta: float | None = None
    block_mode: str = "none"
    dist: str = "rademacher"
    seed: int = 0
    relation: str = "auto"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.block_mode not in BLOCK_MODES:
            raise ValueError(f"unknown block mode {self.block_mode!r}")
        if self.dist not in DISTS:
            raise ValueError(f"unknown entry distribution {self.dist!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"matrix dimension must be an integer >= 2, got {self.n}")
        if self.block_mode != "none" and self.n % 2:
            raise ValueError("block ensembles need an even total dimension")
        if self.kind in ("periodic_band", "band"):
            if self.rho is None or not 0.0 <= self.rho <= 1.0:
                raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.kind == "slow_band":
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.kind == "weighted":
            parse_weight(self.weight)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def band_width(self) -> int | None:
        if self.kind != "slow_band":
            return None
        # guard against N**beta landing just below an integer
        return max(1, math.floor(self.n ** self.beta + 1e-9))

    def limit_weight(self) -> WeightFn:
        """The weight whose tree integrals give this ensemble's limiting moments."""
        if self.kind == "weighted":
            return parse_weight(self.weight)
        if self.kind == "periodic_band":
            return periodic_band(self.rho)
        if self.kind == "band":
            return band(self.rho)
        return constant(1.0)

    def phi0(self, grid_n: int = 2048) -> float:
        if self.kind == "slow_band":
            return 1.0
        return phi0(self.limit_weight(), grid_n)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown ensemble keys {sorted(extra)}")
        return cls(**d)

    def with_(self, **changes) -> "EnsembleSpec":
        return replace(self, **changes)


def parse_ensemble(text: str, **overrides) -> EnsembleSpec:
    """Build a spec from JSON (inline or a ``.json`` path) or shorthand.

    Shorthand: ``wigner``, ``weighted:<weight-spec>``, ``periodic:<rho>``,
    ``band:<rho>``, ``slow:<beta>``, ``block``/``block-plus``/``block-minus``
    optionally followed by ``:<weight-spec>``.
    """
    text = text.strip()
    fields = {k: v for k, v in overrides.items() if v is not None}
    if text.startswith("{") or text.endswith(".json"):
        if text.startswith("{"):
            d = json.loads(text)
        else:
            with open(text) as fh:
                d = json.load(fh)
        if not isinstance(d, dict):
            raise ValueError("ensemble JSON must be an object")
        d.update(fields)
        return EnsembleSpec.from_dict(d)
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "wigner":
        if rest:
            raise ValueError("wigner takes no parameters")
        return EnsembleSpec(kind="weighted", weight="constant:1", **fields)
    if head == "weighted":
        return EnsembleSpec(kind="weighted", weight=rest, **fields)
    if head in ("periodic", "periodic_band"):
        return EnsembleSpec(kind="periodic_band", rho=float(rest), **fields)
    if head == "band":
        return EnsembleSpec(kind="band", rho=float(rest), **fields)
    if head in ("slow", "slow_band"):
        return EnsembleSpec(kind="slow_band", beta=float(rest), **fields)
    if head in ("block", "block-plus", "block-minus"):
        mode = "minus" if head == "block-minus" else "plus"
        return EnsembleSpec(kind="weighted", weight=rest or "constant:1", block_mode=mode, **fields)
    raise ValueError(f"unknown ensemble shorthand {text!r}")


def relation_for(spec: EnsembleSpec) -> EquivalenceRelation:
    if spec.relation != "auto":
        return parse_relation(spec.relation, spec.n)
    if spec.block_mode == "none":
        return wigner_relation(spec.n)
    return block_relation(spec.n // 2, minus=spec.block_mode == "minus")


def weight_factor(spec: EnsembleSpec) -> np.ndarray:
    n = spec.n
    i = np.arange(n)
    d = np.abs(i[:, None] - i[None, :])
    if spec.kind == "weighted":
        return np.asarray(parse_weight(spec.weight)(d / n), dtype=float)
    if spec.kind == "periodic_band":
        return (np.minimum(d, n - d) <= spec.rho * n).astype(float)
    if spec.kind == "band":
        return (d <= spec.rho * n).astype(float)
    return (d <= spec.band_width).astype(float)


def normalization(spec: EnsembleSpec) -> float:
    if spec.kind == "slow_band":
        return 1.0 / math.sqrt(2 * spec.band_width)
    return 1.0 / math.sqrt(spec.n)


@dataclass(frozen=True, eq=False)
class _Plan:
    scale: np.ndarray
    class_index: np.ndarray
    n_classes: int


@lru_cache(maxsize=4)
def _plan(spec: EnsembleSpec) -> _Plan:
    rel = relation_for(spec)
    if rel.n != spec.n:
        raise ValueError(f"relation size {rel.n} does not match n={spec.n}")
    _, inverse, _ = np.unique(rel.class_ids.ravel(), return_inverse=True, return_counts=True)
    scale = normalization(spec) * weight_factor(spec) * rel.signs
    scale.setflags(write=False)
    inverse = inverse.reshape(spec.n, spec.n)
    inverse.setflags(write=False)
    return _Plan(scale, inverse, int(inverse.max()) + 1)


def _stream(key) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def draw_entries(dist: str, rng: np.random.Generator, size: int) -> np.ndarray:
    """Mean-zero, unit-variance draws; gaussian uses Box-Muller on two uniforms."""
    if dist == "rademacher":
        return np.where(rng.random(size) < 0.5, -1.0, 1.0)
    if dist == "gaussian":
        u = rng.random((2, size))
        return np.sqrt(-2.0 * np.log1p(-u[0])) * np.cos(2.0 * np.pi * u[1])
    raise ValueError(f"unknown entry distribution {dist!r}")


def sample_entry_value(dist: str, stream_key) -> float:
    return float(draw_entries(dist, _stream(stream_key), 1)[0])


@dataclass(frozen=True, eq=False)
class MatrixSample:
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def sample_matrix(spec: EnsembleSpec, trial: int = 0) -> MatrixSample:
    """One symmetric draw; the class-c primitive value is the c-th draw of the (seed, trial) stream."""
    plan = _plan(spec)
    values = draw_entries(spec.dist, _stream([int(spec.seed), int(trial)]), plan.n_classes)
    return MatrixSample(plan.scale * values[plan.class_index])
