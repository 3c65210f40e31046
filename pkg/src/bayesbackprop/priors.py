"""Fixed log-prior densities over the flat weight vector and their gradients.

Two prior families: an isotropic Gaussian and a two-component Gaussian scale
mixture (a wide component for heavy tails plus a narrow component that
concentrates weights near zero). Hyperparameters are fixed for the whole of
training; nothing here is ever updated from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathops import gaussian_log_density


@dataclass(frozen=True)
class GaussianPrior:
    """Isotropic zero-mean Gaussian prior with standard deviation sigma."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"Gaussian prior needs sigma > 0, got {self.sigma}")

    def log_prob(self, w: np.ndarray) -> float:
        return float(np.sum(gaussian_log_density(np.asarray(w, dtype=np.float64), 0.0, self.sigma)))

    def grad_log_prob(self, w: np.ndarray) -> np.ndarray:
        return -np.asarray(w, dtype=np.float64) / (self.sigma * self.sigma)


@dataclass(frozen=True)
class ScaleMixturePrior:
    """Per-weight mixture pi*N(0, sigma1^2) + (1-pi)*N(0, sigma2^2).

    Requires sigma1 > sigma2 > 0: the first component supplies the heavy
    tail, the second concentrates mass near zero. Densities are combined in
    log space (log-sum-exp) because sigma2 values like e^-8 underflow naive
    sums.
    """

    pi: float
    sigma1: float
    sigma2: float

    def __post_init__(self):
        if not 0.0 <= self.pi <= 1.0:
            raise ValueError(f"mixture weight must lie in [0, 1], got {self.pi}")
        if not (self.sigma1 > self.sigma2 > 0.0):
            raise ValueError(
                f"need sigma1 > sigma2 > 0, got sigma1={self.sigma1} sigma2={self.sigma2}"
            )

    @classmethod
    def from_neg_log_sigmas(cls, pi: float, neg_log_sigma1: float, neg_log_sigma2: float):
        """Build from the -log(sigma) convention used in sweep configs."""
        return cls(pi=pi, sigma1=math.exp(-neg_log_sigma1), sigma2=math.exp(-neg_log_sigma2))

    def _component_log_terms(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        log_pi1 = math.log(self.pi) if self.pi > 0.0 else -math.inf
        log_pi2 = math.log1p(-self.pi) if self.pi < 1.0 else -math.inf
        a = log_pi1 + gaussian_log_density(w, 0.0, self.sigma1)
        b = log_pi2 + gaussian_log_density(w, 0.0, self.sigma2)
        return a, b

    def log_prob(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=np.float64)
        a, b = self._component_log_terms(w)
        return float(np.sum(np.logaddexp(a, b)))

    def grad_log_prob(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        a, b = self._component_log_terms(w)
        # Responsibility of the wide component, computed stably in log space.
        r = np.exp(a - np.logaddexp(a, b))
        return r * (-w / self.sigma1**2) + (1.0 - r) * (-w / self.sigma2**2)


Prior = GaussianPrior | ScaleMixturePrior


def log_prior(prior: Prior, w: np.ndarray) -> float:
    """Log prior density of the full weight vector (sum over weights)."""
    return prior.log_prob(w)


def grad_log_prior(prior: Prior, w: np.ndarray) -> np.ndarray:
    """Elementwise d/dw_j of log_prior."""
    return prior.grad_log_prob(w)
