from .datasets import DataError, Dataset, load_libsvm, minmax_scale, parse_libsvm, to_libsvm
from .objectives import (
    LAD,
    SVM,
    Linear,
    Objective,
    ProblemError,
    Quadratic,
    SumObjective,
    SyntheticL1,
    SyntheticMax,
    analytic_subgradient,
    estimate_M2,
    lad_value,
    svm_value,
)
from .saddle import BilinearSaddle, SaddleSpec, sampled_duality_gap
from .synthetic import make_a9a_like, make_abalone_like, make_regression

__all__ = [
    "BilinearSaddle", "DataError", "Dataset", "LAD", "Linear", "Objective", "ProblemError",
    "Quadratic", "SVM", "SaddleSpec", "SumObjective", "SyntheticL1", "SyntheticMax",
    "analytic_subgradient", "estimate_M2", "lad_value", "load_libsvm", "make_a9a_like",
    "make_abalone_like", "make_regression", "minmax_scale", "parse_libsvm",
    "sampled_duality_gap", "svm_value", "to_libsvm",
]
