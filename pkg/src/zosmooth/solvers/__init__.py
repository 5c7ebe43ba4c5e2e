from .adam import adam_zo
from .agd import agd_batched, configure_estimator
from .extragradient import extragradient_saddle
from .record import RunRecord, SolverError, concat_records
from .restart import restart_agd, restart_schedule
from .subgradient import subgradient_baseline

__all__ = [
    "RunRecord", "SolverError", "adam_zo", "agd_batched", "concat_records",
    "configure_estimator", "extragradient_saddle", "restart_agd", "restart_schedule",
    "subgradient_baseline",
]
