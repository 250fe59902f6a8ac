"""Weight functions on [0, 1], the profile phi(x) and the constancy test.

Every built-in weight is piecewise constant, so the squared weight is
integrated exactly over each cell of the equidistant grid. For grid cells
I_a, I_b of width h the kernel entry is

    K[a, b] = h**-2 * int_{I_a} int_{I_b} alpha(|x - y|)**2 dy dx

which depends on a - b only (a triangle-weighted average of alpha**2).
The grid nodes are the cell midpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

DEFAULT_GRID = 2048
MIN_GRID = 64


@dataclass(frozen=True)
class WeightFn:
    """Piecewise-constant weight alpha on [0, 1].

    ``kind`` is one of ``constant``, ``band``, ``periodic_band`` or
    ``piecewise_constant``. ``breakpoints`` (length m+1, starting at 0 and
    ending at 1) and ``values`` (length m) describe alpha; evaluation is
    right-continuous at interior breakpoints, while band indicators are
    closed on the right so that ``band(rho)(rho) == 1``.
    """

    kind: str
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    param: float | None = field(default=None, compare=False)

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) != len(vals) + 1 or len(vals) == 0:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if bp[0] != 0.0 or bp[-1] != 1.0 or any(b >= a for a, b in zip(bp[1:], bp[:-1])):
            raise ValueError(f"breakpoints must increase from 0 to 1, got {bp}")
        if not all(np.isfinite(vals)):
            raise ValueError("weight values must be finite")

    @property
    def bound(self) -> float:
        return max(abs(v) for v in self.values)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("weight argument outside [0, 1]")
        bp = np.asarray(self.breakpoints)
        vals = np.asarray(self.values)
        if self.kind == "band":
            return np.where(t <= self.param, 1.0, 0.0)
        if self.kind == "periodic_band":
            return np.where((t <= self.param) | (t >= 1.0 - self.param), 1.0, 0.0)
        idx = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, len(vals) - 1)
        return vals[idx]

    def label(self) -> str:
        if self.kind == "constant":
            return f"constant:{self.values[0]:g}"
        if self.kind == "band":
            return f"band:{self.param:g}"
        if self.kind == "periodic_band":
            return f"periodic:{self.param:g}"
        return "table"


def constant(c: float = 1.0) -> WeightFn:
    return WeightFn("constant", (0.0, 1.0), (c,))


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return rho


def band(rho: float) -> WeightFn:
    rho = _check_rho(rho)
    if rho == 0.0:
        return WeightFn("band", (0.0, 1.0), (0.0,), param=rho)
    if rho == 1.0:
        return WeightFn("band", (0.0, 1.0), (1.0,), param=rho)
    return WeightFn("band", (0.0, rho, 1.0), (1.0, 0.0), param=rho)


def periodic_band(rho: float) -> WeightFn:
    rho = _check_rho(rho)
    if rho >= 0.5:
        return WeightFn("periodic_band", (0.0, 1.0), (1.0,), param=rho)
    if rho == 0.0:
        return WeightFn("periodic_band", (0.0, 1.0), (0.0,), param=rho)
    return WeightFn("periodic_band", (0.0, rho, 1.0 - rho, 1.0), (1.0, 0.0, 1.0), param=rho)


def piecewise_constant(breakpoints, values) -> WeightFn:
    return WeightFn("piecewise_constant", tuple(breakpoints), tuple(values))


def read_weight_table(path) -> WeightFn:
    """Read lines ``left value``; each value holds from its left edge to the next one."""
    lefts, vals = [], []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"weight table line needs 'left value': {line!r}")
        lefts.append(float(parts[0]))
        vals.append(float(parts[1]))
    if not lefts:
        raise ValueError(f"empty weight table {path}")
    return piecewise_constant(lefts + [1.0], vals)


def parse_weight(spec: str) -> WeightFn:
    """Parse ``constant:1.0``, ``band:0.25``, ``periodic:0.25`` or ``table:<path>``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "constant":
            return constant(float(arg) if arg else 1.0)
        if kind == "band":
            return band(float(arg))
        if kind in ("periodic", "periodic_band"):
            return periodic_band(float(arg))
        if kind == "table":
            return read_weight_table(arg)
    except (TypeError, ValueError, OSError) as exc:
        raise ValueError(f"bad weight spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown weight kind in {spec!r}")


def _tri_cdf(t, center, h):
    # CDF of the unit-mass triangle density on [center - h, center + h]
    z = np.clip((t - center) / h, -1.0, 1.0)
    return np.where(z < 0, 0.5 * (1 + z) ** 2, 1 - 0.5 * (1 - z) ** 2)


def _squared_pieces(w: WeightFn):
    # alpha(|t|)**2 on [-1, 1] as mirrored pieces
    bp = np.asarray(w.breakpoints)
    sq = np.asarray(w.values) ** 2
    lo = np.concatenate([-bp[1:][::-1], bp[:-1]])
    hi = np.concatenate([-bp[:-1][::-1], bp[1:]])
    val = np.concatenate([sq[::-1], sq])
    return lo, hi, val


@lru_cache(maxsize=32)
def _offset_profile(w: WeightFn, n: int) -> np.ndarray:
    d = np.arange(-(n - 1), n) / n
    lo, hi, val = _squared_pieces(w)
    h = 1.0 / n
    mass = _tri_cdf(hi[:, None], d[None, :], h) - _tri_cdf(lo[:, None], d[None, :], h)
    prof = val @ mass
    prof.setflags(write=False)
    return prof


@lru_cache(maxsize=8)
def kernel_matrix(w: WeightFn, grid_n: int) -> np.ndarray:
    """Cell-averaged alpha**2(|x - y|) on an n-cell grid; read-only and cached."""
    _check_grid(grid_n)
    prof = _offset_profile(w, grid_n)
    idx = np.arange(grid_n)
    K = prof[(idx[:, None] - idx[None, :]) + grid_n - 1]
    K.setflags(write=False)
    return K


def midpoints(grid_n: int) -> np.ndarray:
    return (np.arange(grid_n) + 0.5) / grid_n


def _check_grid(grid_n: int) -> None:
    if int(grid_n) != grid_n or grid_n < MIN_GRID:
        raise ValueError(f"grid_n must be an integer >= {MIN_GRID}, got {grid_n}")


def phi(w: WeightFn, x: float, grid_n: int = DEFAULT_GRID) -> float:
    """int_0^1 alpha(|x - y|)**2 dy summed over n cells in y."""
    _check_grid(grid_n)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    edges = np.arange(grid_n + 1) / grid_n
    lo, hi, val = _squared_pieces(w)
    # y in [a, b] maps to t = x - y in [x - b, x - a]
    t_lo = x - edges[1:]
    t_hi = x - edges[:-1]
    overlap = np.clip(np.minimum(hi[:, None], t_hi) - np.maximum(lo[:, None], t_lo), 0.0, None)
    return float(np.sum(val @ overlap))


def phi_grid(w: WeightFn, grid_n: int = DEFAULT_GRID) -> np.ndarray:
    """phi averaged over each x-cell of the grid."""
    return kernel_matrix(w, grid_n).mean(axis=1)


def phi0(w: WeightFn, grid_n: int = DEFAULT_GRID) -> float:
    return float(phi_grid(w, grid_n).mean())


@dataclass
class PhiReport:
    grid_n: int
    phi_values: np.ndarray
    phi0: float
    max_deviation: float
    constant_verdict: bool
    tol: float

    @property
    def x(self) -> np.ndarray:
        return midpoints(self.grid_n)


def is_phi_constant(w: WeightFn, tol: float = 1e-3, grid_n: int = DEFAULT_GRID) -> PhiReport:
    if not tol > 0:
        raise ValueError("tol must be positive")
    values = phi_grid(w, grid_n)
    p0 = float(values.mean())
    dev = float(np.max(np.abs(values - p0)))
    return PhiReport(grid_n, np.array(values), p0, dev, dev <= tol, tol)


BUILTIN_WEIGHTS = {
    "constant": constant,
    "band": band,
    "periodic_band": periodic_band,
}
