"""Binomial probability kernels evaluated in log space.

All functions accept numpy arrays for ``k`` and ``p`` and broadcast them;
scalars in give floats out.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import DomainError

__all__ = ["log_choose", "log_pmf", "log_upper_tails", "pmf", "pmf_vector", "upper_tail"]


def _check_prob(p):
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any((p < 0.0) | (p > 1.0)):
        raise DomainError(f"probability outside [0, 1]: {p}")
    return p


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def log_choose(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    if int(n) != n or int(k) != k:
        raise DomainError("log_choose needs integer arguments")
    n, k = int(n), int(k)
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"log_choose undefined for n={n}, k={k}")
    if min(k, n - k) <= 1000:
        # exact integer arithmetic, then one rounding
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_pmf(k, n: int, p):
    """ln theta(k | n, p) with the 0^0 = 1 convention (-inf for impossible events)."""
    p = _check_prob(p)
    k = np.asarray(k)
    if np.any(k < 0) or np.any(k > n):
        raise DomainError(f"k must lie in [0, {n}]")
    k = k.astype(float)
    logc = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return logc + xlogy(k, p) + xlog1py(n - k, -p)


def pmf(k, n: int, p):
    """Binomial probability of exactly ``k`` successes in ``n`` trials."""
    return _scalar_or_array(np.exp(log_pmf(k, n, p)))


def pmf_vector(n: int, p):
    """All probabilities theta(0..n | n, p).

    For array ``p`` of shape ``s`` the result has shape ``s + (n + 1,)``.
    """
    p = _check_prob(p)
    k = np.arange(n + 1)
    return np.exp(log_pmf(k, n, p[..., None]))


def log_upper_tails(n: int, p):
    """ln H(k | n, p) for k = 0..n, accumulated from the top so it is monotone in k."""
    p = _check_prob(p)
    logs = log_pmf(np.arange(n + 1), n, p[..., None])
    return np.logaddexp.accumulate(logs[..., ::-1], axis=-1)[..., ::-1]


def upper_tail(k: int, n: int, p):
    """H(k | n, p): probability of at least ``k`` successes."""
    p = _check_prob(p)
    if k < 0 or k > n + 1:
        raise DomainError(f"k must lie in [0, {n + 1}]")
    if k == n + 1:
        return _scalar_or_array(np.zeros_like(p))
    return _scalar_or_array(np.exp(log_upper_tails(n, p)[..., k]))
