"""Photon-number moments of a joint two-mode distribution.

Tables are indexed ``p[..., n_a, n_b]``; any leading axes are treated as a
batch (e.g. a time grid).  Quantities that need a nonzero mean are undefined
when it vanishes: a single table gives ``None``, a batch gives a masked array.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegrityError

__all__ = [
    "validate_distribution",
    "mean_occupations",
    "cross_correlation",
    "mandel_parameter",
    "mode_statistics",
    "static_row",
]

# means below this count as zero (a Fock vacuum in that mode)
ZERO_MEAN = 1e-14


def validate_distribution(table, atol: float = 1e-10) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if table.ndim < 2:
        raise ValueError("joint distribution must have at least two axes (n_a, n_b)")
    if np.any(table < -atol):
        raise IntegrityError("joint distribution has negative entries")
    total = table.sum(axis=(-2, -1))
    if np.any(np.abs(total - 1.0) > atol):
        raise IntegrityError(f"joint distribution not normalised (total {np.max(np.abs(total - 1)):.3g} off)")
    return table


def _number_grids(table):
    na = np.arange(table.shape[-2], dtype=float)
    nb = np.arange(table.shape[-1], dtype=float)
    return na, nb


def _marginals(table):
    return table.sum(axis=-1), table.sum(axis=-2)


def _undefined(values, mask):
    if np.ndim(values) == 0:
        return None if bool(mask) else float(values)
    return np.ma.masked_array(values, mask=mask)


def mean_occupations(table):
    """``(<n_a>, <n_b>)`` by direct summation."""
    table = np.asarray(table, dtype=float)
    na, nb = _number_grids(table)
    p_a, p_b = _marginals(table)
    mean_a = p_a @ na
    mean_b = p_b @ nb
    if np.ndim(mean_a) == 0:
        return float(mean_a), float(mean_b)
    return mean_a, mean_b


def cross_correlation(table):
    """``g2 = <n_a n_b> / (<n_a><n_b>)``; undefined if either mean vanishes."""
    table = np.asarray(table, dtype=float)
    na, nb = _number_grids(table)
    mean_a, mean_b = mean_occupations(table)
    joint = np.einsum("...ij,i,j->...", table, na, nb)
    mask = (np.asarray(mean_a) <= ZERO_MEAN) | (np.asarray(mean_b) <= ZERO_MEAN)
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.where(mask, 0.0, joint / (np.asarray(mean_a) * np.asarray(mean_b)))
    return _undefined(g2, mask)


def _marginal_mandel(p, n):
    mean = p @ n
    second = p @ (n * n)
    mask = mean <= ZERO_MEAN
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(mask, 0.0, (second - mean * mean - mean) / mean)
    return q, mask


def mandel_parameter(table, mode: str):
    """Mandel ``Q = (var - mean) / mean`` of the chosen marginal."""
    table = np.asarray(table, dtype=float)
    na, nb = _number_grids(table)
    p_a, p_b = _marginals(table)
    if mode == "a":
        q, mask = _marginal_mandel(p_a, na)
    elif mode == "b":
        q, mask = _marginal_mandel(p_b, nb)
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    return _undefined(q, mask)


def mode_statistics(table, mode: str) -> dict:
    """Mean, variance and Mandel parameter of one mode of a single table."""
    table = np.asarray(table, dtype=float)
    if table.ndim != 2:
        raise ValueError("mode_statistics takes a single 2-D table")
    na, nb = _number_grids(table)
    p_a, p_b = _marginals(table)
    p, n = (p_a, na) if mode == "a" else (p_b, nb)
    mean = float(p @ n)
    var = max(float(p @ (n * n)) - mean * mean, 0.0)
    return {"mean": mean, "variance": var, "mandel_q": mandel_parameter(table, mode)}


def static_row(table) -> tuple:
    """``(mean_a, mean_b, g2, q_a, q_b)`` for one table, after validation."""
    table = validate_distribution(table)
    mean_a, mean_b = mean_occupations(table)
    return (
        mean_a,
        mean_b,
        cross_correlation(table),
        mandel_parameter(table, "a"),
        mandel_parameter(table, "b"),
    )
