"""Ensemble execution, moment estimates and two-sample distribution distances."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .grid import StateField
from .integrator import EvolveConfig, Trajectory, TrajectoryBatch, evolve_batch
from .observables import wilson_interval

Z95 = 1.959963984540054

#: a functional maps a batch of trajectories to one value per path
Functional = Callable[[TrajectoryBatch], np.ndarray]


class EnsembleFailure(RuntimeError):
    """Every path of an ensemble was flagged."""


def per_path(fn: Callable[[Trajectory], float]) -> Functional:
    """Lift a single-trajectory functional to a batch functional."""
    def batch(b: TrajectoryBatch) -> np.ndarray:
        return np.array([fn(b.trajectory(i)) for i in range(len(b))], dtype=float)
    batch.__name__ = getattr(fn, "__name__", "functional")
    return batch


# built-in functionals ------------------------------------------------------

def final_l2(b: TrajectoryBatch) -> np.ndarray:
    return b.obs["l2"][:, -1].copy()


def final_h1(b: TrajectoryBatch) -> np.ndarray:
    return b.obs["h1"][:, -1].copy()


def final_h1_survivors(b: TrajectoryBatch) -> np.ndarray:
    """``||u(T) 1_{no flag before T}||_{H^1}``: zero for flagged paths."""
    return np.where(b.blowup_index >= 0, 0.0, b.obs["h1"][:, -1])


def mid_h1_survivors(b: TrajectoryBatch) -> np.ndarray:
    mid = (b.obs["h1"].shape[1] - 1) // 2
    flagged = (b.blowup_index >= 0) & (b.blowup_index <= mid)
    return np.where(flagged, 0.0, b.obs["h1"][:, mid])


def sup_h1_survivors(b: TrajectoryBatch) -> np.ndarray:
    """Path-space functional ``sup_t ||u(t)||_{H^1}``, zero for flagged paths."""
    return np.where(b.blowup_index >= 0, 0.0, np.nanmax(b.obs["h1"], axis=1))


def final_l4(b: TrajectoryBatch) -> np.ndarray:
    dx = b.cfg.grid.dx
    out = (np.sum(np.abs(b.final) ** 4, axis=-1) * dx) ** 0.25
    return np.where(b.blowup_index >= 0, 0.0, out)


def window_projection(center: float = 0.0, width: float = 1.0) -> Functional:
    """``Re int u(T) conj(phi) dx`` for the fixed window ``phi = exp(-((x - c)/w)^2)``."""
    def proj(b: TrajectoryBatch) -> np.ndarray:
        g = b.cfg.grid
        phi = np.exp(-(((g.x - center) / width) ** 2))
        out = np.real(b.final @ phi) * g.dx
        return np.where(b.blowup_index >= 0, 0.0, out)
    proj.__name__ = "window_projection"
    return proj


def final_dispersion(b: TrajectoryBatch) -> np.ndarray:
    return np.atleast_2d(b.path.values)[:, -1].copy()


def running_l5l10(b: TrajectoryBatch) -> np.ndarray:
    return b.obs["running_l5l10"][:, -1].copy()


BUILTIN: dict[str, Functional] = {
    "final_l2": final_l2,
    "final_h1": final_h1,
    "final_h1_survivors": final_h1_survivors,
    "mid_h1_survivors": mid_h1_survivors,
    "sup_h1_survivors": sup_h1_survivors,
    "final_l4": final_l4,
    "window_projection": window_projection(),
    "final_dispersion": final_dispersion,
    "running_l5l10": running_l5l10,
}


# estimates -----------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_lo: float
    ci_hi: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "ci_lo": self.ci_lo, "ci_hi": self.ci_hi}


def _mean(x: np.ndarray) -> float:
    # shifting by the first sample makes constant inputs come back exactly
    return float(x[0] + np.mean(x - x[0]))


def moment(samples, k: int, confidence_z: float = Z95) -> Estimate:
    """Sample ``E[X^k]`` with a normal-approximation CI on the k-th powers."""
    if k not in (1, 2, 4):
        raise ValueError(f"moment order must be 1, 2 or 4, got {k}")
    x = np.asarray(samples, dtype=float) ** k
    if x.size == 0:
        raise ValueError("no samples")
    m = _mean(x)
    half = confidence_z * float(np.std(x, ddof=1)) / math.sqrt(x.size) if x.size > 1 else math.inf
    return Estimate(m, m - half, m + half)


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|`` over pooled points."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_distance needs two nonempty samples")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_interval(d: float, n: int, m: int, alpha: float = 0.05) -> tuple[float, float]:
    """Dvoretzky-Kiefer-Wolfowitz band for the population KS distance."""
    half = math.sqrt(math.log(2.0 / alpha) * (n + m) / (2.0 * n * m))
    return max(0.0, d - half), min(1.0, d + half)


def ks_critical(n: int, m: int, c_alpha: float = 1.63) -> float:
    """Asymptotic critical value ``c(alpha) sqrt((n + m) / (n m))`` (1.63 for 1%)."""
    return c_alpha * math.sqrt((n + m) / (n * m))


# ensembles -----------------------------------------------------------------

@dataclass
class EnsembleStats:
    n_paths: int
    root_seed: int
    config_digest: str
    samples: dict = field(default_factory=dict)
    estimates: dict = field(default_factory=dict)
    failed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    failure: Optional[Estimate] = None

    @property
    def n_failed(self) -> int:
        return int(self.failed.size)

    def summary(self, experiment: str, params: Mapping) -> dict:
        est = {k: v.to_dict() for k, v in self.estimates.items()}
        if self.failure is not None:
            est["p_flag"] = self.failure.to_dict()
        return {"experiment": experiment, "params": dict(params), "n_paths": self.n_paths,
                "estimates": est, "seed": self.root_seed}


def config_digest(cfg: EvolveConfig, u0=None) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True, default=str).encode()
    h = hashlib.sha256(blob)
    if u0 is not None:
        v = u0.physical().values if isinstance(u0, StateField) else np.asarray(u0)
        h.update(np.ascontiguousarray(v, dtype=complex).tobytes())
    return h.hexdigest()[:16]


def _resolve(functionals) -> dict[str, Functional]:
    if isinstance(functionals, Mapping):
        return dict(functionals)
    out = {}
    for f in functionals:
        if isinstance(f, str):
            if f not in BUILTIN:
                raise ValueError(f"unknown functional {f!r}; known: {sorted(BUILTIN)}")
            out[f] = BUILTIN[f]
        else:
            out[getattr(f, "__name__", f"f{len(out)}")] = f
    return out


def run_batches(cfg: EvolveConfig, u0, n_paths: int, root_seed: int,
                fn: Callable[[TrajectoryBatch], dict], *, threads: int = 1,
                batch_size: int = 250) -> dict:
    """Evaluate ``fn`` on batches of paths and concatenate per-path arrays in index order."""
    chunks = [range(i, min(i + batch_size, n_paths)) for i in range(0, n_paths, batch_size)]

    def work(idx):
        b = evolve_batch(cfg, u0, cfg.sample_paths(root_seed, idx))
        return fn(b)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def run_ensemble(cfg: EvolveConfig, n_paths: int, root_seed: int, functionals,
                 u0: StateField, *, threads: int = 1, batch_size: int = 250,
                 keep_failed: bool = False, moments=(1,)) -> EnsembleStats:
    """Monte-Carlo estimates of path functionals.

    Path ``i`` draws its dispersion from a generator seeded with
    ``root_seed ^ i``; batches are reassembled in index order, so the result
    does not depend on ``threads`` or ``batch_size``.  Paths with a blow-up
    flag are reported in ``failed`` and excluded from the samples unless
    ``keep_failed`` is set.
    """
    if n_paths < 2:
        raise ValueError("an ensemble needs at least two paths")
    funcs = _resolve(functionals)

    def evaluate(b: TrajectoryBatch) -> dict:
        out = {name: np.asarray(f(b), dtype=float) for name, f in funcs.items()}
        out["__flag__"] = (b.blowup_index >= 0)
        return out

    res = run_batches(cfg, u0, n_paths, root_seed, evaluate, threads=threads,
                      batch_size=batch_size)
    flagged = res.pop("__flag__")
    failed = np.nonzero(flagged)[0]
    if failed.size == n_paths and not keep_failed:
        raise EnsembleFailure(f"all {n_paths} paths flagged")
    keep = np.ones(n_paths, bool) if keep_failed else ~flagged
    stats = EnsembleStats(n_paths, root_seed, config_digest(cfg, u0), failed=failed)
    for name, vals in res.items():
        s = vals[keep]
        stats.samples[name] = s
        for k in moments:
            key = name if k == 1 else f"{name}^{k}"
            stats.estimates[key] = moment(s, k)
    lo, hi = wilson_interval(failed.size, n_paths)
    stats.failure = Estimate(failed.size / n_paths, lo, hi)
    return stats
