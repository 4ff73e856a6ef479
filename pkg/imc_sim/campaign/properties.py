"""
Paired one-sided tests over run records, used to check QoR trends across cells.
"""
import math
from collections.abc import Iterable, Sequence

import numpy as np
from scipy.stats import ttest_rel

from imc_sim.campaign.records import RunRecord
from imc_sim.errors import EmptyInput, LengthMismatch
from imc_sim.metrics.qor import degradation

APPROXIMATE_QLS = ("Q1", "Q2", "Q3", "Q4")


def degradations(records: Iterable[RunRecord], benchmark: str, mcu: str, ql: str) -> np.ndarray:
    """Per-run degradation of one cell, ordered by run index."""
    cell = sorted(
        (r for r in records if (r.benchmark, r.mcu, r.ql) == (benchmark, mcu, ql)),
        key=lambda r: r.run,
    )
    values = [degradation(r.qor) for r in cell if r.qor is not None]
    if not values:
        raise EmptyInput(f"no QoR records for {benchmark}/{mcu}/{ql}")
    return np.asarray(values, dtype=np.float64)


def _rejects(pvalue: float, alpha: float) -> bool:
    # NaN p-values come from all-zero differences: nothing to reject
    return not math.isnan(pvalue) and pvalue < alpha


def paired_not_worse(a: Sequence[float], b: Sequence[float], alpha: float = 0.01) -> bool:
    """
    False only when degradations `a` are significantly greater than the paired `b`.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.size} vs {b.size} paired samples")
    if a.size < 2:
        raise EmptyInput("a paired test needs at least two samples")
    result = ttest_rel(a, b, alternative="greater")
    return not _rejects(float(result.pvalue), alpha)


def degradation_not_decreasing(
    records: Iterable[RunRecord],
    benchmark: str,
    mcu: str,
    alpha: float = 0.01,
    qls: Sequence[str] = APPROXIMATE_QLS,
) -> bool:
    """
    Check that mean degradation does not drop from each QL to the next one.

    For each consecutive pair the one-sided paired test asks whether the higher
    QL degrades significantly less; monotonicity holds unless some pair rejects.
    """
    records = list(records)
    for lower, higher in zip(qls, qls[1:]):
        d_lo = degradations(records, benchmark, mcu, lower)
        d_hi = degradations(records, benchmark, mcu, higher)
        if d_lo.shape != d_hi.shape:
            raise LengthMismatch(f"{lower} has {d_lo.size} runs, {higher} has {d_hi.size}")
        if np.array_equal(d_lo, d_hi):
            continue
        result = ttest_rel(d_hi, d_lo, alternative="less")
        if _rejects(float(result.pvalue), alpha):
            return False
    return True
