"""Small helpers for dense univariate polynomial coefficient lists.

Coefficient lists are indexed by power (index k holds the coefficient of
x**k).  The helpers are scalar-type agnostic: they work for floats and for
``fractions.Fraction`` alike, which the test oracles rely on.
"""

from __future__ import annotations


def padd(a, b):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = out[i] + c
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return out


def pscale(a, c):
    return [c * x for x in a]


def pmul(a, b, cap=None):
    """Product of two coefficient lists, optionally truncated at degree cap."""
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j, y in enumerate(b):
            if i + j >= n:
                break
            out[i + j] = out[i + j] + x * y
    return out


def pshift(a, k):
    """Multiply by x**k."""
    return [0] * k + list(a)


def ptrim(a, cap):
    """Keep coefficients 0..cap, padding with zeros if shorter."""
    out = list(a[: cap + 1])
    while len(out) < cap + 1:
        out.append(0)
    return out


def pder(a):
    return [k * c for k, c in enumerate(a)][1:] or [0]


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def precip(a, n):
    """Truncated reciprocal: first n+1 coefficients of 1/a, a[0] != 0."""
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, n + 1):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def pinv_t(t0, n):
    """Coefficients of 1/(t0 + x) up to degree n (geometric series)."""
    out = [1 / t0]
    for _ in range(n):
        out.append(-out[-1] / t0)
    return out
