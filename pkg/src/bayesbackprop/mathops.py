"""Scalar special functions shared by the posterior, prior, and likelihood code.

Everything is 64-bit floating point. All functions accept scalars or numpy
arrays and return the same kind.
"""

from __future__ import annotations

import numpy as np

LOG_TWO_PI = float(np.log(2.0 * np.pi))


def _match_input(out: np.ndarray, like) -> np.ndarray | float:
    if np.ndim(like) == 0:
        return float(out)
    return out


def softplus(rho):
    """log(1 + exp(rho)), overflow-safe for large |rho|; strictly positive."""
    r = np.asarray(rho, dtype=np.float64)
    out = np.maximum(r, 0.0) + np.log1p(np.exp(-np.abs(r)))
    return _match_input(out, rho)


def softplus_derivative(rho):
    """d/drho softplus(rho) = 1 / (1 + exp(-rho)), the logistic sigmoid."""
    r = np.asarray(rho, dtype=np.float64)
    e = np.exp(-np.abs(r))
    out = np.where(r >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return _match_input(out, rho)


# The sigmoid shows up on its own in the rho-gradient chain rule.
sigmoid = softplus_derivative


def gaussian_log_density(x, mu, sigma):
    """log N(x | mu, sigma^2). sigma must be strictly positive."""
    s = np.asarray(sigma, dtype=np.float64)
    if np.any(s <= 0.0):
        raise ValueError("sigma must be > 0")
    z = (np.asarray(x, dtype=np.float64) - np.asarray(mu, dtype=np.float64)) / s
    out = -np.log(s) - 0.5 * LOG_TWO_PI - 0.5 * z * z
    if np.ndim(x) == 0 and np.ndim(mu) == 0 and np.ndim(sigma) == 0:
        return float(out)
    return out
