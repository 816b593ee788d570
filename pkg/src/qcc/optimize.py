"""Multi-restart derivative-free local search shared by the optimising measures."""

from __future__ import annotations

import dataclasses
import os
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for every multi-restart search.

    ``max_iters`` caps objective evaluations per restart. A restart also stops
    once its best value improved by less than ``tolerance`` over the last
    ``stall_iters`` iterations. When ``target`` is set, remaining restarts are
    skipped as soon as one reaches it.
    """

    restarts: int = 8
    max_iters: int = 2000
    penalty_weight: float = 10.0
    seed: int = 0
    tolerance: float = 1e-10
    stall_iters: int = 50
    method: str = "Powell"
    target: float | None = None
    require_convergence: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def replace(self, **changes) -> "OptimizerConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class OptimizerReport:
    values: list[float] = field(default_factory=list)
    traces: list[list[float]] = field(default_factory=list)
    converged: list[bool] = field(default_factory=list)
    n_evaluations: int = 0
    best_restart: int = -1

    @property
    def best_value(self) -> float:
        return min(self.values) if self.values else float("inf")

    @property
    def restarts_used(self) -> int:
        return len(self.values)

    @property
    def any_converged(self) -> bool:
        return any(self.converged)

    def merge(self, other: "OptimizerReport") -> None:
        offset = len(self.values)
        self.values += other.values
        self.traces += other.traces
        self.converged += other.converged
        self.n_evaluations += other.n_evaluations
        if other.best_restart >= 0 and (self.best_restart < 0 or other.best_value < self.values[self.best_restart]):
            self.best_restart = offset + other.best_restart

    def as_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "restarts_used": self.restarts_used,
            "values": list(self.values),
            "converged": list(self.converged),
            "n_evaluations": self.n_evaluations,
        }


def thread_count(config: OptimizerConfig) -> int:
    if config.threads is not None:
        return max(1, int(config.threads))
    try:
        return max(1, int(os.environ.get("QCC_THREADS", "1")))
    except ValueError:
        return 1


class _Budget(Exception):
    pass


def _local_search(fun: Callable[[np.ndarray], float], x0: np.ndarray, config: OptimizerConfig):
    best = [np.inf]
    best_x = [np.array(x0, dtype=float)]
    n_eval = [0]
    per_iter: list[float] = []

    def wrapped(x):
        if n_eval[0] >= config.max_iters:
            raise _Budget
        n_eval[0] += 1
        try:
            v = float(fun(x))
        except (np.linalg.LinAlgError, ValueError, FloatingPointError):
            v = np.inf
        if not np.isfinite(v):
            v = 1e300
        if v < best[0]:
            best[0] = v
            best_x[0] = np.array(x, dtype=float)
        return v

    def callback(*_args, **_kw):
        per_iter.append(best[0])
        if config.target is not None and best[0] <= config.target:
            raise StopIteration
        k = config.stall_iters
        if len(per_iter) > k and per_iter[-k - 1] - per_iter[-1] < config.tolerance:
            raise StopIteration

    converged = False
    x0 = np.asarray(x0, dtype=float)
    if x0.size == 0:
        wrapped(x0)
        return best_x[0], best[0], True, per_iter or [best[0]], n_eval[0]
    opts = {"maxfev": config.max_iters}
    if config.method == "Nelder-Mead":
        opts.update(xatol=1e-12, fatol=config.tolerance, adaptive=x0.size > 8)
    elif config.method == "Powell":
        opts.update(xtol=1e-10, ftol=config.tolerance)
    try:
        res = minimize(wrapped, x0, method=config.method, callback=callback, options=opts)
        converged = bool(res.success) or (len(per_iter) > config.stall_iters)
        if config.target is not None and best[0] <= config.target:
            converged = True
    except _Budget:
        converged = False
    except StopIteration:
        converged = True
    return best_x[0], best[0], converged, per_iter or [best[0]], n_eval[0]


def multistart_minimize(
    fun: Callable[[np.ndarray], float],
    starts: Sequence[np.ndarray],
    config: OptimizerConfig,
    random_start: Callable[[int], np.ndarray] | None = None,
    n_restarts: int | None = None,
) -> tuple[np.ndarray, OptimizerReport]:
    """Run a local search from each start and keep the best point.

    ``starts`` are tried first; further restarts up to ``n_restarts``
    (default ``config.restarts``) draw their initial point from
    ``random_start(i)``. The result depends only on the inputs: with several
    threads, restarts finishing after the first one that hit ``target`` are
    discarded so the reduction matches sequential order.
    """
    total = config.restarts if n_restarts is None else n_restarts
    total = max(total, len(starts)) if random_start is None else total
    x0s = list(starts)[:total]

    def start(i):
        return x0s[i] if i < len(x0s) else random_start(i)

    count = len(x0s) if random_start is None else total
    threads = thread_count(config)
    results = []
    i = 0
    while i < count:
        batch = list(range(i, min(count, i + threads)))
        if threads > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                out = list(pool.map(lambda j: _local_search(fun, start(j), config), batch))
        else:
            out = [_local_search(fun, start(j), config) for j in batch]
        hit = False
        for r in out:
            results.append(r)
            if config.target is not None and r[1] <= config.target:
                hit = True
                break
        if hit:
            break
        i += len(batch)

    report = OptimizerReport()
    best_i = int(np.argmin([r[1] for r in results]))
    for x, v, conv, trace, n in results:
        report.values.append(v)
        report.traces.append(trace)
        report.converged.append(conv)
        report.n_evaluations += n
    report.best_restart = best_i
    return results[best_i][0], report


# --------------------------------------------------------------------------- #
#                        unitary / isometry parameterisations                  #
# --------------------------------------------------------------------------- #

def n_generator_params(d: int) -> int:
    return d * d


@lru_cache(maxsize=None)
def _generator_layout(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # flat positions of the diagonal, the upper triangle and its mirror image
    iu = np.triu_indices(d, 1)
    return np.arange(d) * (d + 1), iu[0] * d + iu[1], iu[1] * d + iu[0]


def anti_hermitian(params: np.ndarray, d: int) -> np.ndarray:
    """Anti-Hermitian ``d x d`` matrix from ``d*d`` real parameters."""
    diag, upper, lower = _generator_layout(d)
    m = len(upper)
    k = np.zeros(d * d, dtype=complex)
    k[diag] = 1j * params[:d]
    off = params[d: d + m] + 1j * params[d + m: d + 2 * m]
    k[upper] = off
    k[lower] = -off.conj()
    return k.reshape(d, d)


def unitary_from_params(params: np.ndarray, d: int) -> np.ndarray:
    if d == 1:
        return np.exp(1j * params[:1]).reshape(1, 1)
    return expm(anti_hermitian(params, d))


def isometry_from_params(params: np.ndarray, n: int, r: int) -> np.ndarray:
    """``n x r`` isometry as the polar factor of an unconstrained complex matrix."""
    m = (params[: n * r] + 1j * params[n * r: 2 * n * r]).reshape(n, r)
    u, _, vh = np.linalg.svd(m, full_matrices=False)
    return u @ vh


def isometry_params(w: np.ndarray) -> np.ndarray:
    return np.concatenate([w.real.reshape(-1), w.imag.reshape(-1)])
