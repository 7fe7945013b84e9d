"""Monte Carlo sweeps over the total support fraction ``(|T| + |Omega|) / N``.

Each grid point runs ``trials_per_point`` independent trials. Trial ``j`` at
grid index ``i`` uses the seed ``base_seed ^ (i << 32) ^ j``, so the records
do not depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from typing import List, Optional, Tuple

import numpy as np

from .. import __version__
from ..dictionary import make_dictionary
from ..l1 import (GramSingularError, SolverConfig, basis_pursuit, certificate_valid,
                  min_energy_dual, recovery_success)
from ..sampling import (CoefficientModel, SamplingParams, SupportPair, sample_coefficients,
                        sample_support_exact, sample_support_pair,
                        sample_support_random_split)
from ..spectral import qrup_check

log = logging.getLogger(__name__)

__all__ = [
    "MODES",
    "SweepConfig",
    "TrialRecord",
    "SweepRow",
    "SweepResult",
    "default_fractions",
    "parse_fractions",
    "trial_seed",
    "run_sweep",
    "run_recovery_sweep",
    "run_certificate_sweep",
    "run_qrup_sweep",
]

MODES = ("recovery", "certificate", "qrup")
SPLITS = ("even", "random")
_MASK64 = (1 << 64) - 1


def default_fractions() -> List[float]:
    return [round(0.05 * k, 10) for k in range(1, 20)]


def parse_fractions(spec: str) -> List[float]:
    """Parse ``'a:b:step'`` (inclusive of ``b``) or a comma-separated list."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"fraction range must be a:b:step, got {spec!r}")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise ValueError(f"bad fraction range {spec!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 10) for i in range(count)]
    return [float(p) for p in spec.split(",") if p.strip()]


def trial_seed(base_seed: int, fraction_index: int, trial_index: int) -> int:
    return (int(base_seed) ^ (int(fraction_index) << 32) ^ int(trial_index)) & _MASK64


@dataclass(frozen=True)
class SweepConfig:
    n: int = 256
    dictionary_kind: str = "spike_fourier"
    fractions: Tuple[float, ...] = tuple(default_fractions())
    trials_per_point: int = 100
    beta: float = 1.0
    base_seed: int = 0
    mode: str = "recovery"
    split: str = "even"
    dictionary_seed: Optional[int] = None
    rel_tol: float = 1e-3
    workers: int = 1
    inject_comb: bool = False
    max_iterations: int = 20000

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(float(x) for x in self.fractions))
        object.__setattr__(self, "dictionary_kind", self.dictionary_kind.replace("-", "_"))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if list(self.fractions) != sorted(self.fractions):
            raise ValueError("fractions must be sorted ascending")
        if any(not 0.0 < x <= 1.0 for x in self.fractions):
            raise ValueError("fractions must lie in (0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["fractions"] = list(self.fractions)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        return cls(**data)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial.

    ``status`` separates solver trouble (``max_iters``, ``gram_singular``)
    from genuine failures (``ok`` with ``outcome`` false).
    """

    fraction_index: int
    trial_index: int
    seed: int
    support_sizes: Tuple[int, int]
    outcome: bool
    status: str = "ok"
    solver_iterations: int = 0
    residual: float = 0.0
    op_norm_sq: Optional[float] = None
    off_support_max: Optional[float] = None


@dataclass(frozen=True)
class SweepRow:
    n: int
    dictionary_kind: str
    mode: str
    fraction: float
    t_size_mean: float
    omega_size_mean: float
    trials: int
    successes: int
    success_rate: float
    mean_iterations: float
    mean_residual: float
    base_seed: int
    solver_failures: int = 0


CSV_COLUMNS = (
    "n", "dictionary_kind", "mode", "fraction", "t_size_mean", "omega_size_mean",
    "trials", "successes", "success_rate", "mean_iterations", "mean_residual", "base_seed",
)


@dataclass
class SweepResult:
    config: SweepConfig
    rows: List[SweepRow]
    records: List[TrialRecord] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": [asdict(r) for r in self.rows],
            "records": [asdict(r) for r in self.records],
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepResult":
        records = []
        for r in data.get("records", []):
            r = dict(r)
            r["support_sizes"] = tuple(r["support_sizes"])
            records.append(TrialRecord(**r))
        return cls(
            SweepConfig.from_dict(data["config"]),
            [SweepRow(**r) for r in data["rows"]],
            records,
            dict(data.get("provenance", {})),
        )


# -- trial execution ---------------------------------------------------------

_CONTEXT = {}


def _init_worker(cfg: SweepConfig):
    _CONTEXT["cfg"] = cfg
    seed = cfg.base_seed if cfg.dictionary_seed is None else cfg.dictionary_seed
    _CONTEXT["dict"] = make_dictionary(
        cfg.n, cfg.dictionary_kind, seed if cfg.dictionary_kind == "spike_random" else None
    )
    _CONTEXT["solver"] = SolverConfig(max_iterations=cfg.max_iterations)


def _exact_support(cfg, fraction, seed):
    k = int(round(fraction * cfg.n))
    if cfg.split == "random":
        return sample_support_random_split(cfg.n, k, seed)
    k1 = k // 2
    return sample_support_exact(cfg.n, k1, k - k1, seed)


def _comb_support(n):
    root = math.isqrt(n)
    if root * root != n:
        raise ValueError(f"Dirac comb needs a square n, got {n}")
    comb = np.arange(0, n, root)
    return SupportPair(comb, comb, n)


def _recovery_trial(cfg, d, fi, ti, fraction, seed):
    support = _exact_support(cfg, fraction, seed)
    alpha = sample_coefficients(support, CoefficientModel(), seed)
    res = basis_pursuit(d, d.synthesize(alpha), _CONTEXT["solver"])
    status = "ok" if res.status == "optimal" else res.status
    ok = status == "ok" and recovery_success(res.alpha_hat, alpha, cfg.rel_tol)
    return TrialRecord(fi, ti, seed, (support.t_set.size, support.omega_set.size), bool(ok),
                       status, res.iterations, float(res.feasibility_residual))


def _certificate_trial(cfg, d, fi, ti, fraction, seed):
    support = _exact_support(cfg, fraction, seed)
    alpha = sample_coefficients(support, CoefficientModel(), seed)
    sizes = (support.t_set.size, support.omega_set.size)
    try:
        cert = min_energy_dual(d, alpha.support, alpha.sign()[alpha.support])
    except GramSingularError:
        return TrialRecord(fi, ti, seed, sizes, False, "gram_singular")
    return TrialRecord(fi, ti, seed, sizes, certificate_valid(cert), "ok", 0,
                       float(cert.on_support_residual), None, float(cert.off_support_max))


def _qrup_trial(cfg, d, fi, ti, fraction, seed):
    if ti >= cfg.trials_per_point:
        support = _comb_support(cfg.n)
    else:
        p = min(fraction / 2.0, 1.0)
        support = sample_support_pair(SamplingParams(cfg.n, p, p, cfg.beta), seed)
    passed, report = qrup_check(d, support)
    return TrialRecord(fi, ti, seed, (support.t_set.size, support.omega_set.size),
                       bool(passed), "ok", 0, 0.0, float(report.op_norm_sq))


_TRIALS = {
    "recovery": _recovery_trial,
    "certificate": _certificate_trial,
    "qrup": _qrup_trial,
}


def _run_task(task):
    fi, ti, fraction, seed = task
    cfg = _CONTEXT["cfg"]
    t0 = time.perf_counter()
    rec = _TRIALS[cfg.mode](cfg, _CONTEXT["dict"], fi, ti, fraction, seed)
    return rec, time.perf_counter() - t0


def _tasks(cfg):
    extra = 1 if (cfg.mode == "qrup" and cfg.inject_comb) else 0
    for fi, fraction in enumerate(cfg.fractions):
        for ti in range(cfg.trials_per_point + extra):
            yield fi, ti, fraction, trial_seed(cfg.base_seed, fi, ti)


def _aggregate(cfg, fi, fraction, records):
    trials = len(records)
    successes = sum(r.outcome for r in records)
    residuals = [r.residual for r in records if r.status == "ok"]
    return SweepRow(
        n=cfg.n,
        dictionary_kind=cfg.dictionary_kind,
        mode=cfg.mode,
        fraction=fraction,
        t_size_mean=float(np.mean([r.support_sizes[0] for r in records])),
        omega_size_mean=float(np.mean([r.support_sizes[1] for r in records])),
        trials=trials,
        successes=int(successes),
        success_rate=successes / trials,
        mean_iterations=float(np.mean([r.solver_iterations for r in records])),
        mean_residual=float(np.mean(residuals)) if residuals else 0.0,
        base_seed=cfg.base_seed,
        solver_failures=sum(r.status != "ok" for r in records),
    )


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run every trial of ``cfg`` and aggregate one row per fraction."""
    tasks = list(_tasks(cfg))
    log.info("running %d %s trials with %d worker(s)", len(tasks), cfg.mode, cfg.workers)
    if cfg.workers == 1:
        _init_worker(cfg)
        out = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as ex:
            out = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    pairs = sorted(out, key=lambda p: (p[0].fraction_index, p[0].trial_index))
    records = [p[0] for p in pairs]
    rows, wall = [], []
    for fi, fraction in enumerate(cfg.fractions):
        group = [r for r in records if r.fraction_index == fi]
        rows.append(_aggregate(cfg, fi, fraction, group))
        wall.append(sum(t for r, t in pairs if r.fraction_index == fi))
    provenance = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time": wall,
    }
    return SweepResult(cfg, rows, records, provenance)


def _with_mode(cfg, mode):
    return cfg if cfg.mode == mode else replace(cfg, mode=mode)


def run_recovery_sweep(cfg: SweepConfig) -> SweepResult:
    """Sample supports and Gaussian coefficients, solve basis pursuit, score recovery."""
    return run_sweep(_with_mode(cfg, "recovery"))


def run_certificate_sweep(cfg: SweepConfig) -> SweepResult:
    """Score the minimum-energy dual certificate; no l1 solves."""
    return run_sweep(_with_mode(cfg, "certificate"))


def run_qrup_sweep(cfg: SweepConfig) -> SweepResult:
    """Bernoulli supports with ``E|T| + E|Omega| = fraction * n``, scored by ``qrup_check``."""
    return run_sweep(_with_mode(cfg, "qrup"))
