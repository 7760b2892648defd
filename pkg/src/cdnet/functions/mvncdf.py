"""Deterministic multivariate normal CDF evaluation.

Dimension 1 goes through the error function, dimension 2 through Owen's T
(exact up to quadrature-free special-function accuracy), and dimensions 3-5
through nested Gauss-Legendre quadrature on the sequential conditioning form

    Phi_d(b; R) = int_{-inf}^{b_1} N(z; 0, 1) Phi_{d-1}(b' | z) dz.

All entry points are vectorized over leading batch axes.  Arguments may be
+inf (coordinate dropped) or -inf (probability zero).
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc, owens_t

# Integration cutoff in standard deviations; Phi(-8.5) ~ 1e-17.
_TAIL = 8.5
_GL_NODES = {3: 48, 4: 40, 5: 32}


def norm_cdf(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * erfc(-x / np.sqrt(2.0))


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    out[finite] = np.exp(-0.5 * x[finite] ** 2) / np.sqrt(2.0 * np.pi)
    return out


def bvn_cdf(h, k, rho):
    """Standard bivariate normal CDF P(X <= h, Y <= k), correlation rho.

    Uses the Owen's T decomposition, which stays accurate for |rho| -> 1.
    """
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    h, k = np.broadcast_arrays(h, k)
    rho = float(np.clip(rho, -1.0, 1.0))

    if rho == 1.0:
        return norm_cdf(np.minimum(h, k))
    if rho == -1.0:
        return np.maximum(0.0, norm_cdf(h) + norm_cdf(k) - 1.0)

    out = np.full(h.shape, np.nan)
    neg = (h == -np.inf) | (k == -np.inf)
    out[neg] = 0.0
    hpos = (h == np.inf) & ~neg
    out[hpos] = norm_cdf(k[hpos])
    kpos = (k == np.inf) & ~neg & ~hpos
    out[kpos] = norm_cdf(h[kpos])

    m = ~(neg | hpos | kpos)
    if np.any(m):
        hm, km = h[m], k[m]
        denom = np.sqrt(1.0 - rho * rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            ah = (km - rho * hm) / (hm * denom)
            ak = (hm - rho * km) / (km * denom)
            # Limits as an argument passes through zero: T(0, +-inf) = +-1/4.
            ah = np.where(hm == 0.0, np.sign(km) * np.inf, ah)
            ak = np.where(km == 0.0, np.sign(hm) * np.inf, ak)
        t1 = np.where(np.isnan(ah), 0.0, owens_t(hm, np.nan_to_num(ah, nan=0.0, posinf=np.inf, neginf=-np.inf)))
        t2 = np.where(np.isnan(ak), 0.0, owens_t(km, np.nan_to_num(ak, nan=0.0, posinf=np.inf, neginf=-np.inf)))
        hk = hm * km
        delta = np.where((hk > 0) | ((hk == 0) & (hm + km >= 0)), 0.0, 0.5)
        val = 0.5 * (norm_cdf(hm) + norm_cdf(km)) - t1 - t2 - delta
        both_zero = (hm == 0.0) & (km == 0.0)
        if np.any(both_zero):
            val = np.where(both_zero, 0.25 + np.arcsin(rho) / (2.0 * np.pi), val)
        out[m] = np.clip(val, 0.0, 1.0)
    return out


_GL_CACHE: dict = {}


def _leggauss_nodes(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _std_cdf_recursive(b, corr):
    """b: (B, d) standardized limits, corr: (d, d). Returns (B,)."""
    d = corr.shape[0]
    if d == 0:
        return np.ones(b.shape[0])
    if d == 1:
        return norm_cdf(b[:, 0])
    if d == 2:
        return bvn_cdf(b[:, 0], b[:, 1], corr[0, 1])

    # Drop +inf coordinates (shared pattern only; fall back per-row otherwise).
    finite_mask = np.isfinite(b) | (b == -np.inf)
    pos_inf = b == np.inf
    if np.any(pos_inf):
        if np.all(pos_inf == pos_inf[0:1, :]):
            keep = ~pos_inf[0]
            if not np.all(keep):
                return _std_cdf_recursive(b[:, keep], corr[np.ix_(keep, keep)])
        else:
            out = np.empty(b.shape[0])
            for i in range(b.shape[0]):
                keep = ~pos_inf[i]
                out[i] = _std_cdf_recursive(b[i: i + 1, keep], corr[np.ix_(keep, keep)])[0]
            return out
    del finite_mask

    out = np.zeros(b.shape[0])
    neg = np.any(b == -np.inf, axis=1)
    todo = ~neg
    if not np.any(todo):
        return out
    bt = b[todo]

    # Integrate over the axis with the smallest typical limit first.
    pivot = int(np.argmin(np.median(bt, axis=0)))
    order = [pivot] + [i for i in range(d) if i != pivot]
    bt = bt[:, order]
    R = corr[np.ix_(order, order)]

    r0 = R[0, 1:]
    s = np.sqrt(np.maximum(1e-14, 1.0 - r0 ** 2))
    cond = (R[1:, 1:] - np.outer(r0, r0)) / np.outer(s, s)
    cond = np.clip(cond, -1.0, 1.0)
    np.fill_diagonal(cond, 1.0)

    n = _GL_NODES.get(d, 32)
    xg, wg = _leggauss_nodes(n)
    hi = np.clip(bt[:, 0], -_TAIL, _TAIL)
    mid = 0.5 * (hi - _TAIL)
    half = 0.5 * (hi + _TAIL)
    z = mid[:, None] + half[:, None] * xg[None, :]          # (B, n)
    w = half[:, None] * wg[None, :]                          # (B, n)
    # Conditioned limits: (B, n, d-1), one recursive call for the whole batch.
    bc = (bt[:, None, 1:] - z[:, :, None] * r0[None, None, :]) / s[None, None, :]
    inner = _std_cdf_recursive(bc.reshape(-1, d - 1), cond).reshape(z.shape)
    vals = np.sum(w * norm_pdf(z) * inner, axis=1)
    out[todo] = np.clip(vals, 0.0, 1.0)
    return out


def mvn_cdf(x, mean, cov):
    """MVN CDF at thresholds x with given mean vector and covariance matrix.

    x: (..., d); returns (...,).  Dimension capped at 5.
    """
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    d = mean.shape[0]
    if d > 5:
        raise ValueError("mvn_cdf supports dimension <= 5")
    sd = np.sqrt(np.diag(cov))
    corr = cov / np.outer(sd, sd)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    with np.errstate(invalid="ignore"):
        b = (x - mean) / sd
    # +-inf thresholds survive standardization as +-inf.
    b = np.where(x == np.inf, np.inf, np.where(x == -np.inf, -np.inf, b))
    shape = b.shape[:-1]
    flat = b.reshape(-1, d)
    out = _std_cdf_recursive(flat, corr)
    return out.reshape(shape)


def mvn_pdf(x, mean, cov):
    """MVN density at x: (..., d) -> (...,). Zero at non-finite points."""
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    d = mean.shape[0]
    if d == 0:
        return np.ones(x.shape[:-1])
    sign, logdet = np.linalg.slogdet(cov)
    prec = np.linalg.inv(cov)
    diff = x - mean
    finite = np.all(np.isfinite(diff), axis=-1)
    diff = np.where(finite[..., None], diff, 0.0)
    q = np.einsum("...i,ij,...j->...", diff, prec, diff)
    val = np.exp(-0.5 * q - 0.5 * (d * np.log(2.0 * np.pi) + logdet))
    return np.where(finite, val, 0.0)
