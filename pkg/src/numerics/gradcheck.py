"""Central-difference gradient oracle used to verify backpropagation."""

from typing import Callable

import numpy as np

from ..config import Config
from ..errors import NumericError


def finite_diff_grad(
    loss_fn: Callable[[np.ndarray], float],
    param: np.ndarray,
    eps: float = Config.FINITE_DIFF_EPS,
) -> np.ndarray:
    """Estimate d loss / d param entry by entry.

    ``param`` is perturbed in place and restored, so ``loss_fn`` may read it
    through a model that holds a reference to the same array.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    grad = np.zeros_like(param, dtype=np.float64)
    flat = param.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        upper = float(loss_fn(param))
        flat[i] = original - eps
        lower = float(loss_fn(param))
        flat[i] = original
        if not (np.isfinite(upper) and np.isfinite(lower)):
            raise NumericError(f"non-finite loss while probing entry {i}")
        grad.reshape(-1)[i] = (upper - lower) / (2.0 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / (||a|| + ||n||), zero when both vanish"""
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)
