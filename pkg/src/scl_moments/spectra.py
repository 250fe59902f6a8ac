"""Empirical spectral statistics: trace moments, eigenvalues, semicircle comparisons."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, MatrixSample, sample_matrix
from .partitions import MAX_K, catalan
from .tree_integrals import theoretical_moment

WORKERS_ENV = "SCL_WORKERS"


class ConvergenceError(RuntimeError):
    def __init__(self, sweeps: int, residual: float):
        super().__init__(f"Jacobi did not converge in {sweeps} sweeps (residual {residual:.3e})")
        self.sweeps = sweeps
        self.residual = residual


def _as_array(M) -> np.ndarray:
    return M.entries if isinstance(M, MatrixSample) else np.asarray(M, dtype=float)


def trace_power_moment(M, k: int) -> float:
    """(1/N) tr(M^k) by k-1 successive multiplications."""
    A = _as_array(M)
    if k < 1:
        raise ValueError("k must be >= 1")
    P = A
    for _ in range(k - 1):
        P = P @ A
    return float(np.trace(P) / A.shape[0])


def trace_power_moments(M, k_max: int) -> np.ndarray:
    """(1/N) tr(M^k) for k = 1..k_max using tr(M^(a+b)) = <M^a, M^b> for symmetric M."""
    A = _as_array(M)
    n = A.shape[0]
    half = (k_max + 1) // 2
    powers = [np.eye(n), A]
    for _ in range(half - 1):
        powers.append(powers[-1] @ A)
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        a = k // 2
        b = k - a
        out[k - 1] = np.trace(A) if k == 1 else np.vdot(powers[a], powers[b])
    return out / n


@dataclass
class SpectralSample:
    eigenvalues: np.ndarray
    sweeps: int = 0
    residual: float = 0.0

    def __len__(self):
        return len(self.eigenvalues)


def _round_robin(m: int):
    # Each round pairs all m (even) indices into m/2 disjoint pairs; m-1 rounds cover every pair once.
    players = list(range(m))
    for _ in range(m - 1):
        yield players[: m // 2], players[m // 2:][::-1]
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigenvalues(M, tol: float = 1e-12, max_sweeps: int = 60) -> SpectralSample:
    """Cyclic Jacobi with parallel (tournament) ordering of disjoint rotations."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = np.array(_as_array(M), dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix must be square and symmetric")
    A = 0.5 * (A + A.T)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        return SpectralSample(np.sort(np.diag(A)))
    m = n + (n % 2)
    rounds = []
    for top, bottom in _round_robin(m):
        pairs = [(min(a, b), max(a, b)) for a, b in zip(top, bottom) if a < n and b < n]
        if pairs:
            arr = np.array(pairs)
            rounds.append((arr[:, 0], arr[:, 1]))

    def off_norm():
        return float(np.linalg.norm(A - np.diag(np.diag(A))))

    residual = off_norm()
    sweeps = 0
    while residual > tol * norm:
        if sweeps >= max_sweeps:
            raise ConvergenceError(sweeps, residual / norm)
        for P, Q in rounds:
            apq = A[P, Q]
            app = A[P, P]
            aqq = A[Q, Q]
            active = np.abs(apq) > 1e-300
            safe = np.where(active, apq, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta ** 2))
            t = np.where(theta == 0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t ** 2)
            s = t * c
            rp, rq = A[P, :].copy(), A[Q, :]
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P].copy(), A[:, Q]
            A[:, P] = cp * c[None, :] - cq * s[None, :]
            A[:, Q] = cp * s[None, :] + cq * c[None, :]
        sweeps += 1
        residual = off_norm()
    return SpectralSample(np.sort(np.diag(A)), sweeps, residual / norm)


def eigenvalues(M, tol: float = 1e-12, max_sweeps: int = 60, method: str = "jacobi") -> SpectralSample:
    """Sorted eigenvalues; ``method="lapack"`` delegates to numpy for large matrices."""
    if method == "jacobi":
        return jacobi_eigenvalues(M, tol, max_sweeps)
    if method == "lapack":
        return SpectralSample(np.linalg.eigvalsh(_as_array(M)))
    raise ValueError(f"unknown eigenvalue method {method!r}")


def semicircle_density(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 2.0
    return np.where(inside, np.sqrt(np.clip(4.0 - x ** 2, 0.0, None)) / (2.0 * np.pi), 0.0)


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    val = 0.5 + x * np.sqrt(4.0 - x ** 2) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi
    return np.clip(val, 0.0, 1.0)


def semicircle_quantile(p):
    p = np.asarray(p, dtype=float)
    lo = np.full(p.shape, -2.0)
    hi = np.full(p.shape, 2.0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _pooled(eigs) -> np.ndarray:
    if isinstance(eigs, SpectralSample):
        vals = eigs.eigenvalues
    elif isinstance(eigs, (list, tuple)) and eigs and isinstance(eigs[0], SpectralSample):
        vals = np.concatenate([e.eigenvalues for e in eigs])
    else:
        vals = np.asarray(eigs, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("empty eigenvalue sample")
    return np.sort(vals)


@dataclass
class Histogram:
    bin_left: np.ndarray
    bin_right: np.ndarray
    empirical_density: np.ndarray
    semicircle_density: np.ndarray


def histogram(eigs, bins: int = 40, range: tuple[float, float] = (-2.5, 2.5)) -> Histogram:
    """Density-normalized histogram; the reference column is the bin-averaged semicircle density."""
    if bins < 8:
        raise ValueError("need at least 8 bins")
    vals = _pooled(eigs)
    counts, edges = np.histogram(vals, bins=bins, range=range)
    width = np.diff(edges)
    emp = counts / (vals.size * width)
    ref = (semicircle_cdf(edges[1:]) - semicircle_cdf(edges[:-1])) / width
    return Histogram(edges[:-1], edges[1:], emp, ref)


def ks_distance(eigs) -> float:
    vals = _pooled(eigs)
    n = vals.size
    F = semicircle_cdf(vals)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(threads))


def _map_trials(fn, trials: int, threads: int | None):
    workers = worker_count(threads)
    if workers == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


@dataclass
class MomentRow:
    k: int
    mean: float
    var: float
    trials: int
    theory: float | None = None

    @property
    def abs_err(self) -> float | None:
        return None if self.theory is None else abs(self.mean - self.theory)

    @property
    def stderr(self) -> float:
        return math.sqrt(self.var / self.trials)


@dataclass
class MomentReport:
    spec: EnsembleSpec
    normalized: bool
    rows: list[MomentRow] = field(default_factory=list)
    samples: np.ndarray | None = None

    def row(self, k: int) -> MomentRow:
        return self.rows[k - 1]


def theory_for(spec: EnsembleSpec, k: int, normalized: bool, grid_n: int = 2048) -> float | None:
    if k % 2:
        return 0.0
    if spec.kind == "slow_band":
        return float(catalan(k // 2))
    if k > MAX_K:
        return None
    return theoretical_moment(k, spec.limit_weight(), grid_n, normalized)


def empirical_moments(spec: EnsembleSpec, k_max: int, trials: int, normalized: bool = False,
                      threads: int | None = None, with_theory: bool = True) -> MomentReport:
    """Y_N^(k) = (1/N) tr(M^k) across trials: mean and unbiased variance per k.

    ``normalized`` rescales the matrix by 1/sqrt(phi0) of the ensemble's weight.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    scale = 1.0 / math.sqrt(spec.phi0()) if normalized else 1.0

    def one(trial):
        return trace_power_moments(sample_matrix(spec, trial).entries * scale, k_max)

    samples = np.array(_map_trials(one, trials, threads))
    report = MomentReport(spec, normalized, samples=samples)
    for k in range(1, k_max + 1):
        col = samples[:, k - 1]
        theory = theory_for(spec, k, normalized) if with_theory else None
        report.rows.append(MomentRow(k, float(col.mean()), float(col.var(ddof=1)), trials, theory))
    return report


def sample_spectra(spec: EnsembleSpec, trials: int, method: str = "lapack",
                   normalized: bool = False, threads: int | None = None) -> list[SpectralSample]:
    scale = 1.0 / math.sqrt(spec.phi0()) if normalized else 1.0
    return _map_trials(lambda t: eigenvalues(sample_matrix(spec, t).entries * scale, method=method),
                       trials, threads)


@dataclass
class VarianceDecay:
    slope: float
    xs: list[float]
    variances: list[float]
    axis: str


def variance_decay(family, ns, k: int = 4, trials: int = 64, threads: int | None = None) -> VarianceDecay:
    """Least-squares slope of log Var(Y_N^(k)) against log N, or log b_N for slow bands."""
    ns = list(ns)
    if len(ns) < 3:
        raise ValueError("need at least 3 sizes")
    if trials < 16:
        raise ValueError("need at least 16 trials per size")
    xs, variances = [], []
    axis = "N"
    for n in ns:
        spec = family(n)
        rep = empirical_moments(spec, k, trials, threads=threads, with_theory=False)
        if spec.kind == "slow_band":
            axis = "b_N"
            xs.append(float(spec.band_width))
        else:
            xs.append(float(n))
        variances.append(rep.row(k).var)
    v = np.asarray(variances)
    if np.any(v <= 0):
        return VarianceDecay(-math.inf, xs, variances, axis)
    slope = float(np.polyfit(np.log(xs), np.log(v), 1)[0])
    return VarianceDecay(slope, xs, variances, axis)
