"""Trial sweeps: dataset, sampling, initialization, descent, scoring.

Each trial's randomness derives solely from (base_seed, trial index), so a
sweep produces identical records whether run serially or across processes.
"""

import functools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datasets import (
    ingest_pdb,
    ingest_xyz,
    random_gaussian_points,
    sphere_points,
    swiss_roll_points,
)
from .dualbasis import all_pairs, num_pairs
from .geometry import (
    center_points,
    gram_from_points,
    procrustes_align,
    relative_gram_error,
)
from .initialization import ResampleConfig, init_one_step, init_resampled
from .sampling import StructuredSpec, sample_structured, sample_uniform_replacement
from .solvers import Measurement, SolverConfig, run_to_points, solve

GENERATED_DATASETS = ("sphere", "swiss_roll", "random_gaussian")
FILE_DATASETS = ("cow", "cities", "xyz", "pdb")

_TRIAL_TAG = 0x45444754
_DATASET_TAG = 0x45444744

_CSV_HEADER = "trial,seed,rel_gram_error,rmse,iterations,status,wall_ms"


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one sweep; identical specs give identical records."""

    dataset: str
    n: int
    ambient_dim: int
    solver: SolverConfig
    sampling: object
    init: ResampleConfig = None
    trials: int = 1
    base_seed: int = 0
    path: str = None

    def __post_init__(self):
        if self.dataset not in GENERATED_DATASETS + FILE_DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if self.dataset in FILE_DATASETS and self.path is None:
            raise ValueError(f"dataset {self.dataset!r} needs a coordinate file path")
        if self.dataset in ("sphere", "swiss_roll") and self.ambient_dim != 3:
            raise ValueError("sphere and swiss_roll are three-dimensional")
        if self.dataset in GENERATED_DATASETS and self.n < 2:
            raise ValueError("need at least two points")
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not isinstance(self.sampling, StructuredSpec):
            gamma = float(self.sampling)
            if not 0.0 < gamma <= 1.0:
                raise ValueError("sampling rate must lie in (0, 1]")
        if self.init is not None and not isinstance(self.init, ResampleConfig):
            raise ValueError("init must be None (one-step) or a ResampleConfig")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    rel_gram_error: float
    rmse: float
    iterations: int
    status: str
    wall_ms: int


def trial_seed(base_seed, trial):
    """Stable per-trial seed; independent of execution order."""
    ss = np.random.SeedSequence((base_seed, _TRIAL_TAG, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _dataset_seed(base_seed):
    ss = np.random.SeedSequence((base_seed, _DATASET_TAG))
    return int(ss.generate_state(1, np.uint64)[0])


@functools.lru_cache(maxsize=4)
def _truth(dataset, n, ambient_dim, base_seed, path):
    if dataset == "sphere":
        points = center_points(sphere_points(n))
    elif dataset == "swiss_roll":
        points = center_points(swiss_roll_points(n, _dataset_seed(base_seed)))
    elif dataset == "random_gaussian":
        points = center_points(
            random_gaussian_points(n, ambient_dim, _dataset_seed(base_seed))
        )
    elif dataset == "pdb":
        points = ingest_pdb(path)
    else:
        points = ingest_xyz(path)
    return points, gram_from_points(points)


def generate_dataset(spec):
    """Centered truth configuration for the spec (file-backed sets ignore n)."""
    points, _ = _truth(
        spec.dataset, spec.n, spec.ambient_dim, spec.base_seed, spec.path
    )
    return points


def sample_for(spec, n, seed):
    """Observation multiset for one trial of the spec."""
    if isinstance(spec.sampling, StructuredSpec):
        return sample_structured(n, spec.sampling, seed)
    rate = float(spec.sampling)
    if rate == 1.0:
        # Full observation: drawing with replacement at rate 1 would
        # still miss ~37% of the pairs.
        return all_pairs(n)
    m = max(int(rate * num_pairs(n)), 1)
    return sample_uniform_replacement(n, m, seed)


def run_trial(spec, trial, timing=False):
    """One seeded sample-initialize-solve-score cycle."""
    points, gram = _truth(
        spec.dataset, spec.n, spec.ambient_dim, spec.base_seed, spec.path
    )
    n = gram.shape[0]
    seed = trial_seed(spec.base_seed, trial)
    start = time.perf_counter()
    omega = sample_for(spec, n, seed)
    measured = Measurement.from_gram(gram, omega)
    if spec.init is None:
        x0 = init_one_step(measured, n, spec.solver.rank)
    else:
        x0 = init_resampled(measured, n, spec.init)
    factor, report = solve(measured, spec.solver, x0)
    recovered = run_to_points(factor, spec.ambient_dim)
    _, err = procrustes_align(recovered, points)
    wall_ms = int(round((time.perf_counter() - start) * 1000)) if timing else 0
    return TrialRecord(
        trial=trial,
        seed=seed,
        rel_gram_error=relative_gram_error(factor.densify(), gram),
        rmse=err,
        iterations=report.iterations,
        status=report.status.value,
        wall_ms=wall_ms,
    )


def _worker(args):
    spec, trial, timing = args
    return run_trial(spec, trial, timing)


def run_experiment(spec, workers=None, timing=False):
    """All trial records for the sweep, in trial order.

    With workers > 1 trials run in separate processes; each process
    rebuilds the truth once from the spec, so records match serial runs.
    """
    trials = range(spec.trials)
    if workers is None or workers <= 1:
        return [run_trial(spec, t, timing) for t in trials]
    tasks = [(spec, t, timing) for t in trials]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, tasks))


def _sig(value):
    return f"{value:.6g}"


def write_csv(records, path):
    """Per-trial rows plus a trailing mean row, 6 significant digits, LF."""
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="\n") as fh:
        fh.write(_CSV_HEADER + "\n")
        for rec in records:
            fh.write(
                f"{rec.trial},{rec.seed},{_sig(rec.rel_gram_error)},"
                f"{_sig(rec.rmse)},{rec.iterations},{rec.status},{rec.wall_ms}\n"
            )
        fh.write(
            "mean,,{},{},{},,{}\n".format(
                _sig(np.mean([r.rel_gram_error for r in records])),
                _sig(np.mean([r.rmse for r in records])),
                _sig(np.mean([r.iterations for r in records])),
                _sig(np.mean([r.wall_ms for r in records])),
            )
        )
