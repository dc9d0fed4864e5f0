"""Reconstruction of point configurations from partially observed pairwise
squared distances via Riemannian optimization over rank-r Gram matrices."""

__version__ = "0.1.0"

from .geometry import (
    NonEuclideanWarning,
    center_points,
    classical_mds,
    dist_from_gram,
    gram_from_dist,
    gram_from_points,
    procrustes_align,
    relative_gram_error,
)
from .dualbasis import (
    SampleSet,
    all_pairs,
    f_omega,
    load_sample_set,
    num_pairs,
    r_omega,
    r_omega_star,
    save_sample_set,
)
from .manifold import (
    LowRankFactor,
    TangentVector,
    condition_number,
    hard_threshold,
    project_tangent,
    retract_structured,
)
from .sampling import (
    StructuredSpec,
    anchor_indices,
    make_rng,
    measure,
    sample_structured,
    sample_uniform_replacement,
)
from .solvers import (
    FRAME,
    PSEUDO,
    Measurement,
    SolverConfig,
    SolverReport,
    SolverStatus,
    frame_descent,
    pseudo_gradient,
    run_to_points,
    solve,
)
from .initialization import (
    ResampleConfig,
    init_one_step,
    init_resampled,
    partition_sample_set,
    trim,
)
from .diagnostics import (
    DiagnosticsReport,
    coherence_nu,
    diagnose,
    mu1,
    rip_deviation,
)
from .datasets import (
    ingest_pdb,
    ingest_xyz,
    random_gaussian_points,
    sphere_points,
    swiss_roll_points,
    write_xyz,
)
from .experiments import (
    ExperimentSpec,
    TrialRecord,
    generate_dataset,
    run_experiment,
    run_trial,
    write_csv,
)
from .estimator import EDGCompletion

__all__ = [
    "NonEuclideanWarning",
    "center_points",
    "classical_mds",
    "dist_from_gram",
    "gram_from_dist",
    "gram_from_points",
    "procrustes_align",
    "relative_gram_error",
    "SampleSet",
    "all_pairs",
    "f_omega",
    "load_sample_set",
    "num_pairs",
    "r_omega",
    "r_omega_star",
    "save_sample_set",
    "LowRankFactor",
    "TangentVector",
    "condition_number",
    "hard_threshold",
    "project_tangent",
    "retract_structured",
    "StructuredSpec",
    "anchor_indices",
    "make_rng",
    "measure",
    "sample_structured",
    "sample_uniform_replacement",
    "FRAME",
    "PSEUDO",
    "Measurement",
    "SolverConfig",
    "SolverReport",
    "SolverStatus",
    "frame_descent",
    "pseudo_gradient",
    "run_to_points",
    "solve",
    "ResampleConfig",
    "init_one_step",
    "init_resampled",
    "partition_sample_set",
    "trim",
    "DiagnosticsReport",
    "coherence_nu",
    "diagnose",
    "mu1",
    "rip_deviation",
    "ingest_pdb",
    "ingest_xyz",
    "random_gaussian_points",
    "sphere_points",
    "swiss_roll_points",
    "write_xyz",
    "ExperimentSpec",
    "TrialRecord",
    "generate_dataset",
    "run_experiment",
    "run_trial",
    "write_csv",
    "EDGCompletion",
    "__version__",
]
