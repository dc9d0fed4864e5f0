"""Command line front end: trial sweeps, property checks, diagnostics.

``edg run`` executes a seeded sweep and writes a CSV, ``edg verify`` runs a
small built-in property suite, ``edg diag`` prints measurement diagnostics
for a dataset and sampling pattern. All flags of a subcommand can also be
given through ``--config FILE`` holding flat ``key=value`` lines; explicit
command line flags win over the file.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .datasets import random_gaussian_points
from .diagnostics import diagnose, coherence_nu, rip_deviation
from .dualbasis import all_pairs, f_omega, r_omega, v_basis, w_basis
from .experiments import (
    ExperimentSpec,
    generate_dataset,
    run_experiment,
    sample_for,
    trial_seed,
    write_csv,
)
from .geometry import (
    center_points,
    classical_mds,
    dist_from_gram,
    double_center,
    gram_from_points,
    procrustes_align,
)
from .initialization import ResampleConfig
from .manifold import LowRankFactor, hard_threshold
from .sampling import sample_uniform_replacement, StructuredSpec
from .solvers import FRAME, PSEUDO, SolverConfig

_DATASETS = ("sphere", "swiss_roll", "random_gaussian", "cow", "cities", "xyz", "pdb")


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(sub):
    sub.add_argument("--config", metavar="FILE", help="flat key=value defaults")
    sub.add_argument("--dataset", required=True, choices=_DATASETS)
    sub.add_argument("--path", help="coordinate file for file-backed datasets")
    sub.add_argument(
        "--n",
        type=int,
        default=100,
        help="points in generated datasets; file-backed sets size from the file",
    )
    sub.add_argument("--ambient-dim", type=int, default=3)
    sub.add_argument("--rank", type=int, default=3)
    sub.add_argument(
        "--gamma",
        type=float,
        default=0.1,
        help="uniform sampling rate in (0, 1]; 1.0 observes every pair once",
    )
    sub.add_argument(
        "--structured",
        action="store_true",
        help="anchor-network sampling instead of uniform",
    )
    sub.add_argument("--anchors", type=int, default=20)
    sub.add_argument("--e-rate", type=float, default=0.3)
    sub.add_argument("--k", type=int, default=6)
    sub.add_argument("--central", type=int, default=None)
    sub.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(
        prog="edg",
        description="point recovery from partially observed pairwise distances",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="execute a sweep and write a CSV")
    _add_common(run)
    run.add_argument("--alg", choices=("frame", "pseudo"), default="frame")
    run.add_argument("--init", choices=("onestep", "resample"), default="onestep")
    run.add_argument("--partitions", type=int, default=2)
    run.add_argument("--nu", type=float, default=2.0)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--rel-tol", type=float, default=1e-5)
    run.add_argument(
        "--max-iters",
        type=int,
        default=None,
        help="default 1000, or 10000 under structured sampling",
    )
    run.add_argument("--out", default="results.csv")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument(
        "--timing",
        action="store_true",
        help="record wall time per trial (breaks byte reproducibility)",
    )

    diag = subs.add_parser(
        "diag", help="print diagnostics for a dataset and sampling pattern"
    )
    _add_common(diag)
    diag.add_argument("--power-iters", type=int, default=100)

    subs.add_parser("verify", help="run the built-in property checks")
    return parser, {"run": run, "diag": diag}


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from None
    overrides = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{num}: expected key=value")
        key, value = line.split("=", 1)
        overrides[key.strip().replace("-", "_")] = value.strip()
    return overrides


def _apply_config(sub, overrides):
    """Install file values as subparser defaults; explicit flags still win."""
    actions = {a.dest: a for a in sub._actions}
    converted = {}
    for key, value in overrides.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise ValueError(f"unknown config key {key!r}")
        if action.nargs == 0 and action.const is True:
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"config flag {key!r} must be boolean, got {value!r}")
            converted[key] = low in ("true", "1", "yes")
            continue
        if action.type is not None:
            try:
                value = action.type(value)
            except (TypeError, ValueError):
                raise ValueError(f"bad config value for {key!r}: {value!r}") from None
        if action.choices is not None and value not in action.choices:
            raise ValueError(
                f"config value for {key!r} must be one of {tuple(action.choices)}"
            )
        converted[key] = value
    sub.set_defaults(**converted)


def _sampling(args):
    if args.structured:
        return StructuredSpec(
            anchors=args.anchors, e_rate=args.e_rate, k=args.k, central=args.central
        )
    return args.gamma


def _spec(args, solver, init=None, trials=1):
    return ExperimentSpec(
        dataset=args.dataset,
        n=args.n,
        ambient_dim=args.ambient_dim,
        solver=solver,
        sampling=_sampling(args),
        init=init,
        trials=trials,
        base_seed=args.seed,
        path=args.path,
    )


def cmd_run(args):
    max_iters = args.max_iters
    if max_iters is None:
        max_iters = 10000 if args.structured else 1000
    solver = SolverConfig(
        rank=args.rank,
        variant=FRAME if args.alg == "frame" else PSEUDO,
        rel_tol=args.rel_tol,
        max_iters=max_iters,
    )
    init = None
    if args.init == "resample":
        init = ResampleConfig(args.partitions, args.nu, args.rank)
    spec = _spec(args, solver, init=init, trials=args.trials)
    records = run_experiment(spec, workers=args.workers, timing=args.timing)
    write_csv(records, args.out)
    mean_err = np.mean([r.rel_gram_error for r in records])
    mean_rmse = np.mean([r.rmse for r in records])
    print(
        f"wrote {args.out}: {len(records)} trials, "
        f"mean rel_gram_error {mean_err:.6g}, mean rmse {mean_rmse:.6g}"
    )
    return 0


def cmd_diag(args):
    solver = SolverConfig(rank=args.rank, variant=FRAME, rel_tol=1e-5, max_iters=1)
    spec = _spec(args, solver)
    points = generate_dataset(spec)
    x = gram_from_points(points)
    factor = hard_threshold(x, args.rank)
    omega = sample_for(spec, x.shape[0], trial_seed(args.seed, 0))
    report = diagnose(x, factor, omega, power_iters=args.power_iters)
    for key in ("nu_hat", "mu1_hat", "kappa", "rip_deviation"):
        print(f"{key}={getattr(report, key):.6g}")
    print(f"rip_samples={report.rip_samples}")
    print(f"power_iters={report.power_iters}")
    return 0


def _check_biorthogonality():
    n = 6
    omega = all_pairs(n)
    pairs = list(zip(omega.rows.tolist(), omega.cols.tolist()))
    for a, pair_a in enumerate(pairs):
        w = w_basis(pair_a, n)
        for b, pair_b in enumerate(pairs):
            want = 1.0 if a == b else 0.0
            got = float(np.sum(w * v_basis(pair_b, n)))
            if abs(got - want) > 1e-12:
                raise AssertionError(f"<w,v> = {got:.3e} for {pair_a}, {pair_b}")


def _check_sampling_expansion():
    n, m = 8, 40
    rng = np.random.default_rng(0)
    s = rng.standard_normal((n, n))
    x = s + s.T
    omega = sample_uniform_replacement(n, m, 123)
    explicit = np.zeros((n, n))
    for pair in zip(omega.rows.tolist(), omega.cols.tolist()):
        explicit += float(np.sum(x * w_basis(pair, n))) * v_basis(pair, n)
    dev = np.abs(r_omega(x, omega) - explicit).max()
    if dev > 1e-10:
        raise AssertionError(f"max deviation {dev:.3e}")


def _check_full_sampling_centers():
    n = 10
    rng = np.random.default_rng(1)
    s = rng.standard_normal((n, n))
    x = s + s.T
    dev = np.abs(r_omega(x, all_pairs(n)) - double_center(x)).max()
    if dev > 1e-10:
        raise AssertionError(f"max deviation {dev:.3e}")


def _check_frame_self_adjoint():
    n, m = 8, 30
    rng = np.random.default_rng(2)
    sx = rng.standard_normal((n, n))
    sy = rng.standard_normal((n, n))
    x, y = sx + sx.T, sy + sy.T
    omega = sample_uniform_replacement(n, m, 7)
    lhs = float(np.sum(f_omega(x, omega) * y))
    rhs = float(np.sum(x * f_omega(y, omega)))
    if abs(lhs - rhs) > 1e-10 * max(abs(lhs), 1.0):
        raise AssertionError(f"<Fx,y>={lhs:.6e} vs <x,Fy>={rhs:.6e}")


def _check_mds_round_trip():
    pts = center_points(random_gaussian_points(20, 3, seed=5))
    rec = classical_mds(dist_from_gram(gram_from_points(pts)), 3)
    _, err = procrustes_align(rec, pts)
    if err > 1e-8:
        raise AssertionError(f"rmse {err:.3e}")


def _check_spike_coherence():
    n, r = 32, 2
    basis = np.zeros((n, r))
    basis[0, 0] = 1.0
    basis[1, 1] = 1.0
    got = coherence_nu(LowRankFactor(basis, np.array([2.0, 1.0])))
    want = 128.0 * n / r
    if abs(got - want) > 1e-9 * want:
        raise AssertionError(f"nu {got:.6f}, closed form {want:.6f}")


def _check_full_rip():
    n = 16
    pts = random_gaussian_points(n, 3, seed=9)
    factor = hard_threshold(gram_from_points(center_points(pts)), 3)
    dev = rip_deviation(factor, all_pairs(n))
    if dev > 1e-8:
        raise AssertionError(f"deviation {dev:.3e}")


_CHECKS = (
    ("dual basis bi-orthogonality (n=6, exhaustive)", _check_biorthogonality),
    ("sampling operator matches explicit expansion", _check_sampling_expansion),
    ("full sampling reproduces double centering", _check_full_sampling_centers),
    ("frame operator is self-adjoint", _check_frame_self_adjoint),
    ("classical scaling round trip", _check_mds_round_trip),
    ("coherence closed form on a coordinate spike", _check_spike_coherence),
    ("isometry deviation vanishes under full sampling", _check_full_rip),
)


def cmd_verify(args):
    failures = 0
    for name, check in _CHECKS:
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok {name}")
    if failures:
        print(f"{failures} of {len(_CHECKS)} checks failed")
        return 1
    print(f"all {len(_CHECKS)} checks passed")
    return 0


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        command = next((a for a in argv if not a.startswith("-")), None)
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config is not None:
            if command not in subs:
                raise ValueError("--config requires the run or diag subcommand")
            _apply_config(subs[command], _load_config(known.config))
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "diag":
            return cmd_diag(args)
        return cmd_verify(args)
    except (ValueError, OSError) as exc:
        print(f"edg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
