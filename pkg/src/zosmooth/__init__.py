"""Gradient-free convex optimization by randomized smoothing."""

from .estimators import EstimatorConfig, GradientEstimate, Scheme, batched_gradient
from .geometry import Box, EuclideanBall, NormSetup, UnboundedSpace, project
from .oracles import ZeroOrderOracle, function_oracle, vectorized_oracle
from .randomness import SampleStream
from .smoothing import SmoothingPlan, make_plan

__version__ = "0.1.0"

__all__ = [
    "Box", "EstimatorConfig", "EuclideanBall", "GradientEstimate", "NormSetup", "SampleStream",
    "Scheme", "SmoothingPlan", "UnboundedSpace", "ZeroOrderOracle", "batched_gradient",
    "function_oracle", "make_plan", "project", "vectorized_oracle",
]
