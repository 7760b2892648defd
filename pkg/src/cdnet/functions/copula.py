"""Smooth bivariate test family: Gumbel coupling over parametric marginals."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, UnsupportedReduction
from .base import CumulativeFunction
from .mvncdf import norm_cdf, norm_pdf

_EPS = 1e-300
_ONE = 1.0 - 1e-16


class SigmoidMarginal:
    """Location/scale logistic CDF."""

    name = "sigmoid"

    def __init__(self, loc=0.0, scale=1.0):
        if scale <= 0:
            raise DomainError("scale must be positive")
        self.loc = float(loc)
        self.scale = float(scale)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return 1.0 / (1.0 + np.exp(-(x - self.loc) / self.scale))

    def pdf(self, x):
        c = self.cdf(x)
        return c * (1.0 - c) / self.scale


class GaussianMarginal:
    name = "normal"

    def __init__(self, mean=0.0, std=1.0):
        if std <= 0:
            raise DomainError("std must be positive")
        self.mean = float(mean)
        self.std = float(std)

    def cdf(self, x):
        return norm_cdf((np.asarray(x, dtype=float) - self.mean) / self.std)

    def pdf(self, x):
        return norm_pdf((np.asarray(x, dtype=float) - self.mean) / self.std) / self.std


class MarginalCdfFunction(CumulativeFunction):
    """Univariate factor wrapping a marginal CDF (result of pinning a copula)."""

    axis_levels = (None,)

    def __init__(self, marginal):
        self.marginal = marginal

    def evaluate(self, z):
        return self.marginal.cdf(np.asarray(z, dtype=float)[..., 0])

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        return self.marginal.pdf(np.asarray(z, dtype=float)[..., 0])

    def sup_value(self):
        return 1.0


class BivariateCopulaFunction(CumulativeFunction):
    """C(G1(x), G2(y)) with C the Gumbel copula, coupling theta >= 1."""

    axis_levels = (None, None)

    def __init__(self, theta, marginal_x, marginal_y):
        if theta < 1.0:
            raise DomainError("Gumbel coupling requires theta >= 1")
        self.theta = float(theta)
        self.marginal_x = marginal_x
        self.marginal_y = marginal_y

    def _uv(self, z):
        z = np.asarray(z, dtype=float)
        return self.marginal_x.cdf(z[..., 0]), self.marginal_y.cdf(z[..., 1])

    @staticmethod
    def _copula(theta, u, v):
        u = np.clip(u, _EPS, 1.0)
        v = np.clip(v, _EPS, 1.0)
        a = -np.log(u)
        b = -np.log(v)
        s = a ** theta + b ** theta
        return np.exp(-s ** (1.0 / theta))

    def evaluate(self, z):
        u, v = self._uv(z)
        return self._copula(self.theta, u, v)

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        z = np.asarray(z, dtype=float)
        u, v = self._uv(z)
        th = self.theta
        u = np.clip(u, _EPS, _ONE)
        v = np.clip(v, _EPS, _ONE)
        a, b = -np.log(u), -np.log(v)
        s = a ** th + b ** th
        big_a = s ** (1.0 / th)
        c = np.exp(-big_a)
        if positions == (0, 1):
            core = c * (a * b) ** (th - 1.0) / (u * v)
            val = core * (big_a ** (2.0 - 2.0 * th) + (th - 1.0) * big_a ** (1.0 - 2.0 * th))
            return val * self.marginal_x.pdf(z[..., 0]) * self.marginal_y.pdf(z[..., 1])
        if positions == (0,):
            dcdu = c * big_a ** (1.0 - th) * a ** (th - 1.0) / u
            return dcdu * self.marginal_x.pdf(z[..., 0])
        dcdv = c * big_a ** (1.0 - th) * b ** (th - 1.0) / v
        return dcdv * self.marginal_y.pdf(z[..., 1])

    def pin_to_sup(self, positions):
        positions = sorted(set(positions))
        if positions == [0]:
            return MarginalCdfFunction(self.marginal_y)
        if positions == [1]:
            return MarginalCdfFunction(self.marginal_x)
        raise UnsupportedReduction("cannot pin both copula arguments; use sup_value")

    def sup_value(self):
        return 1.0
