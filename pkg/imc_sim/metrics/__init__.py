from imc_sim.metrics.qor import (
    ARE_EPSILON,
    Metric,
    QorValue,
    agreement,
    are,
    beyond_threshold,
    degradation,
    evaluate,
    perfect,
    precision_recall,
    rmse,
)

__all__ = [
    "ARE_EPSILON",
    "Metric",
    "QorValue",
    "agreement",
    "are",
    "beyond_threshold",
    "degradation",
    "evaluate",
    "perfect",
    "precision_recall",
    "rmse",
]
