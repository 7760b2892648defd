"""Multivariate Gaussian CDF factors with exact mixed derivatives."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, UnsupportedReduction
from .base import CumulativeFunction
from .mvncdf import mvn_cdf, mvn_pdf

_MAX_ARITY = 5
_MAX_CONDITION = 1e12


class GaussianCdfFunction(CumulativeFunction):
    """phi(z) = Phi(z; mean, cov), all axes continuous.

    The mixed derivative w.r.t. a coordinate subset s factors into the
    marginal Gaussian density over s times the conditional Gaussian CDF over
    the remaining coordinates (Schur-complement conditioning).
    """

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        d = mean.shape[0]
        if d > _MAX_ARITY:
            raise DomainError(f"Gaussian CDF arity capped at {_MAX_ARITY}, got {d}")
        if cov.shape != (d, d):
            raise DomainError("covariance shape does not match mean length")
        if not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12):
            raise DomainError("covariance must be symmetric")
        eig = np.linalg.eigvalsh(cov)
        if eig[0] <= 0.0:
            raise DomainError("covariance must be positive-definite")
        if eig[-1] / eig[0] > _MAX_CONDITION:
            raise DomainError("covariance condition number exceeds 1e12")
        self.mean = mean
        self.cov = cov
        self.axis_levels = tuple([None] * d)

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        return np.clip(mvn_cdf(z, self.mean, self.cov), 0.0, 1.0)

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        z = np.asarray(z, dtype=float)
        s = list(positions)
        t = [i for i in range(self.arity) if i not in positions]
        mu_s, mu_t = self.mean[s], self.mean[t]
        S_s = self.cov[np.ix_(s, s)]
        dens = mvn_pdf(z[..., s], mu_s, S_s)
        if not t:
            return dens
        S_st = self.cov[np.ix_(s, t)]
        S_t = self.cov[np.ix_(t, t)]
        sol = np.linalg.solve(S_s, S_st)           # (|s|, |t|)
        cond_cov = S_t - S_st.T @ sol
        zs = z[..., s]
        finite = np.all(np.isfinite(zs), axis=-1)
        zs_safe = np.where(finite[..., None], zs, 0.0)
        cond_mean = mu_t + np.einsum("...i,ij->...j", zs_safe - mu_s, sol)
        phi = mvn_cdf(z[..., t] - cond_mean, np.zeros(len(t)), cond_cov)
        return np.where(finite, dens * phi, 0.0)

    def pin_to_sup(self, positions):
        positions = sorted(set(positions))
        keep = [i for i in range(self.arity) if i not in positions]
        if not keep:
            raise UnsupportedReduction("cannot pin every coordinate; use sup_value")
        return GaussianCdfFunction(self.mean[keep], self.cov[np.ix_(keep, keep)])

    def sup_value(self):
        return 1.0
