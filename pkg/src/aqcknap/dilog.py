"""Real dilogarithm ``Li2(z) = sum_k z^k / k^2`` for real ``z <= 1``.

Evaluation reduces every argument to the power series on ``[0, 1/2]``:

* ``z < -1``: inversion, ``Li2(z) = -pi^2/6 - ln(-z)^2/2 - Li2(1/z)``
* ``-1 <= z < -1/2`` and ``1/2 < z < 1``: Landen,
  ``Li2(z) = -Li2(z/(z-1)) - ln(1-z)^2/2``
* ``-1/2 <= z <= 1/2``: direct series (ratio at most 1/2)

The reflection formula ``Li2(z) + Li2(1-z) = pi^2/6 - ln z ln(1-z)`` is
deliberately not used, so it remains an independent check.
"""

from __future__ import annotations

import math

PI2_6 = math.pi**2 / 6
PI2_12 = math.pi**2 / 12

_SERIES_TOL = 1e-18


def _series(z: float) -> float:
    # |z| <= 1/2: at most ~60 terms
    total = 0.0
    term = z
    k = 1
    while True:
        contrib = term / (k * k)
        total += contrib
        if abs(contrib) < _SERIES_TOL * max(abs(total), 1e-300) or k > 200:
            return total
        k += 1
        term *= z


def li2(z: float) -> float:
    z = float(z)
    if z > 1.0:
        raise ValueError(f"real Li2 is complex-valued for z={z} > 1")
    if z == 1.0:
        return PI2_6
    if z == -1.0:
        return -PI2_12
    if z < -1.0:
        return -PI2_6 - 0.5 * math.log(-z) ** 2 - li2(1.0 / z)
    if -0.5 <= z <= 0.5:
        return _series(z)
    # Landen; z/(z-1) lands in [1/3, 1/2] for z in [-1, -1/2) and below -1 for z > 1/2
    return -li2(z / (z - 1.0)) - 0.5 * math.log1p(-z) ** 2


def li2_neg_exp(a: float) -> float:
    """``Li2(-e^a)`` without forming ``e^a`` for large positive ``a``.

    For ``a <= 0`` the argument lies in ``[-1, 0)``; for ``a > 0`` the
    inversion identity gives ``Li2(-e^a) = -pi^2/6 - a^2/2 - Li2(-e^-a)``.
    """
    a = float(a)
    if not math.isfinite(a):
        if a == -math.inf:
            return 0.0
        raise ValueError(f"li2_neg_exp needs a finite argument, got {a}")
    if a > 0.0:
        return -PI2_6 - 0.5 * a * a - _li2_neg_exp_nonpos(-a)
    return _li2_neg_exp_nonpos(a)


def _li2_neg_exp_nonpos(a: float) -> float:
    t = math.exp(a)  # in (0, 1]
    if t <= 0.5:
        return _series(-t)
    if t == 1.0:
        return -PI2_12
    # Landen with z = -t: z/(z-1) = t/(1+t) = logistic(a), ln(1-z) = softplus(a)
    u = t / (1.0 + t)
    return -_series(u) - 0.5 * math.log1p(t) ** 2


def softplus(a: float) -> float:
    """``ln(1 + e^a)`` without overflow."""
    return max(a, 0.0) + math.log1p(math.exp(-abs(a)))


def logistic(t: float) -> float:
    """``1 / (1 + e^t)``, overflow safe (a Fermi function)."""
    if t >= 0.0:
        e = math.exp(-t)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(t))
