"""LOESS smoothing of snapshot time series."""

from __future__ import annotations

import numpy as np
from statsmodels.nonparametric.smoothers_lowess import lowess


def loess(x, y, span: float = 0.3) -> np.ndarray:
    """Locally weighted regression of y on x with the given span.

    ``span`` is the fraction of points in each local window, in (0, 1].
    The effective window is floored at three points so very short series
    stay well-defined; series shorter than that are returned unchanged.
    """
    if not 0.0 < span <= 1.0:
        raise ValueError(f"span must be in (0, 1], got {span}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        return y.copy()
    frac = min(1.0, max(span, 3.0 / len(x)))
    return lowess(y, x, frac=frac, return_sorted=False)
