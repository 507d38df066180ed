"""Construction of the identified objects from the truncated-normal model or from samples."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from scipy.special import ndtr, ndtri

from quantile_independence.exceptions import DegeneracyError, InputFormatError, OutOfRangeError
from quantile_independence.models.curve import MonotoneCurve
from quantile_independence.models.observed import ObservedJoint, TruncNormDgp

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from quantile_independence.types import Arm, FloatArray

logger = logging.getLogger(__name__)

MIN_KNOTS = 64

# Half the standard normal mass inside the symmetric truncation interval.
_HALF_MASS = 0.5 - float(ndtr(TruncNormDgp.TRUNCATION[0]))


def truncnorm_cdf(z: FloatArray) -> FloatArray:
    """Cdf of the standard normal truncated to ``[-4, 4]``; exactly 0.5 at 0."""
    lo, hi = TruncNormDgp.TRUNCATION
    z = np.clip(z, lo, hi)
    return np.clip((ndtr(z) - 0.5 + _HALF_MASS) / (2.0 * _HALF_MASS), 0.0, 1.0)


def truncnorm_ppf(tau: FloatArray) -> FloatArray:
    """Inverse of :func:`truncnorm_cdf`."""
    lo, hi = TruncNormDgp.TRUNCATION
    return np.clip(ndtri(0.5 - _HALF_MASS + 2.0 * _HALF_MASS * np.asarray(tau)), lo, hi)


def dgp_to_observed(dgp: TruncNormDgp, n_knots: int = 4096) -> ObservedJoint:
    """Tabulate the conditional cdfs and quantile functions of the truncated-normal model.

    Knots combine an evenly spaced grid in ``y`` (accurate where the density is flat) with
    an evenly spaced grid in probability (accurate in the tails of the quantile function).
    """
    if n_knots < MIN_KNOTS:
        raise OutOfRangeError(f"n_knots must be at least {MIN_KNOTS}", n_knots=n_knots)
    lo, hi = TruncNormDgp.TRUNCATION
    z = np.unique(
        np.concatenate(
            (np.linspace(lo, hi, n_knots), truncnorm_ppf(np.linspace(0.0, 1.0, n_knots)), [0.0])
        )
    )
    tau = truncnorm_cdf(z)

    cdfs: dict[int, MonotoneCurve] = {}
    quantiles: dict[int, MonotoneCurve] = {}
    arm: Arm
    for arm in (0, 1):
        y = dgp.location(arm) + dgp.scale(arm) * z
        cdfs[arm] = MonotoneCurve(xs=y, ys=tau, is_cdf=True)
        quantiles[arm] = MonotoneCurve(xs=tau, ys=y)
    logger.debug("Tabulated %s with %d knots per arm", dgp, len(z))
    return ObservedJoint(
        p1=dgp.p1,
        f_y_given_x0=cdfs[0],
        f_y_given_x1=cdfs[1],
        q_y_given_x0=quantiles[0],
        q_y_given_x1=quantiles[1],
        support_x0=dgp.support(0),
        support_x1=dgp.support(1),
    )


def sample_dgp(dgp: TruncNormDgp, n: int, seed: int | None = None) -> FloatArray:
    """Draw ``n`` rows ``(y, x)`` from the model by inverse-cdf sampling."""
    rng = np.random.default_rng(seed)
    x = (rng.random(n) < dgp.p1).astype(np.float64)
    z = truncnorm_ppf(rng.random(n))
    y = dgp.pi * x + (1.0 + dgp.gamma * x) * z
    return np.column_stack((y, x))


def ingest_samples(rows: Iterable[tuple[float, float]] | FloatArray) -> ObservedJoint:
    """Build an :class:`ObservedJoint` from ``(y, x)`` rows.

    Each arm's cdf interpolates linearly between its distinct sample values, taking the
    midpoint of the empirical cdf's jump at interior values and 0 and 1 at the extremes.
    The result is strictly increasing on the sample range.

    Raises
    ------
    DegeneracyError
        When an arm is missing or has fewer than two distinct outcomes.
    InputFormatError
        When a treatment indicator is not 0 or 1 or an outcome is not finite.
    """
    data = np.asarray(rows if isinstance(rows, np.ndarray) else list(rows), dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] == 0:
        raise InputFormatError("Samples must be a non-empty list of (y, x) rows")
    y, x = data[:, 0], data[:, 1]
    if not np.all(np.isin(x, (0.0, 1.0))):
        raise InputFormatError("Treatment indicator must be 0 or 1")
    if not np.all(np.isfinite(y)):
        raise InputFormatError("Outcomes must be finite")

    cdfs: dict[int, MonotoneCurve] = {}
    for arm in (0, 1):
        values, counts = np.unique(y[x == arm], return_counts=True)
        if len(values) < 2:
            raise DegeneracyError(
                "Each arm needs at least two distinct outcomes", arm=arm, n_distinct=len(values)
            )
        shares = np.cumsum(counts) / counts.sum()
        levels = np.concatenate(([0.0], (shares[:-2] + shares[1:-1]) / 2.0, [1.0]))
        cdfs[arm] = MonotoneCurve(xs=values, ys=levels, is_cdf=True)

    return ObservedJoint(
        p1=float(x.mean()),
        f_y_given_x0=cdfs[0],
        f_y_given_x1=cdfs[1],
        q_y_given_x0=MonotoneCurve(xs=cdfs[0].ys, ys=cdfs[0].xs),
        q_y_given_x1=MonotoneCurve(xs=cdfs[1].ys, ys=cdfs[1].xs),
    )


def read_samples_csv(path: str | Path) -> ObservedJoint:
    """Read ``y,x`` rows from a UTF-8 CSV file and ingest them.

    Raises
    ------
    InputFormatError
        On a missing column or an unparsable record; ``line`` is the file line number.
        Blank lines count as unparsable records.
    """
    try:
        frame = pd.read_csv(
            path, dtype=str, encoding="utf-8", skipinitialspace=True, skip_blank_lines=False
        )
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputFormatError(f"Cannot read samples from {path}: {e}") from e
    if list(frame.columns) != ["y", "x"]:
        raise InputFormatError("Expected header 'y,x'", line=1, header=list(frame.columns))

    parsed = frame.apply(pd.to_numeric, errors="coerce")
    bad = parsed.isna().any(axis=1) | ~parsed["x"].isin((0, 1))
    if bad.any():
        row = int(np.argmax(bad.to_numpy()))
        if frame.iloc[row].isna().all():
            raise InputFormatError("Blank line among sample records", line=row + 2)
        raise InputFormatError(
            "Unparsable sample record", line=row + 2, record=frame.iloc[row].tolist()
        )
    logger.debug("Read %d samples from %s", len(parsed), path)
    return ingest_samples(parsed[["y", "x"]].to_numpy(dtype=np.float64))
