"""Easy/hard boundary of random subset sum: scaled energy ``x`` and critical ``kappa_c``.

Weights are drawn from ``{1..L}`` and ``alpha = beta/L`` is a scaled inverse
temperature. In the large-N limit

    x(alpha)       = int_0^1 y / (1 + e^{alpha y}) dy
    kappa_c(alpha) = (1/ln 2) int_0^1 [ln(1 + e^{-alpha y}) + alpha y / (1 + e^{alpha y})] dy

and with a fixed number of chosen elements (chemical potential ``mu``) the
Fermi factor becomes ``1 / (1 + e^{alpha y - mu})`` and a density ``rho``
appears. Each quantity has a dilogarithm closed form and an independent
adaptive-quadrature evaluation; quadrature is the reference wherever the
two disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .dilog import PI2_6, PI2_12, li2, li2_neg_exp, logistic, softplus
from .errors import QuadratureError, ValidityRangeError

LN2 = math.log(2.0)

SMALL_ALPHA = 1e-3
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    alpha: float
    mu: float
    x: float
    kappa_c: float
    rho: float | None = None
    deviation: float | None = None
    """Largest |closed - quadrature| over the reported fields, when computed."""


# --- unconstrained ---------------------------------------------------------

def _x_series(alpha):
    return 0.25 - alpha / 12.0 + alpha**3 / 240.0


def _kappa_series(alpha):
    return 1.0 - alpha**2 / (24.0 * LN2) + alpha**4 / (320.0 * LN2)


def x_closed(alpha: float) -> float:
    """Dilogarithm closed form of ``x(alpha)``.

    For ``alpha < 0`` this is the textbook expression
    ``-pi^2/(12 a^2) + 1/2 - ln(1+e^a)/a - Li2(-e^a)/a^2``; for ``alpha > 0``
    the inversion identity rewrites it as
    ``pi^2/(12 a^2) + Li2(-e^-a)/a^2 - ln(1+e^-a)/a``, which avoids the
    cancellation between the ``1/2`` and the ``ln(1+e^a)/a`` terms.
    """
    a = float(alpha)
    if abs(a) < SMALL_ALPHA:
        return _x_series(a)
    if a > 0:
        return PI2_12 / a**2 + li2_neg_exp(-a) / a**2 - softplus(-a) / a
    return -PI2_12 / a**2 + 0.5 - softplus(a) / a - li2_neg_exp(a) / a**2


def kappa_closed(alpha: float) -> float:
    """``-(1/ln2) [pi^2/(6a) + (2/a) Li2(-e^a) + ln(1+e^a)]``, evaluated at ``-|a|``.

    The expression is even in ``a``; evaluating on the negative side keeps
    every exponential below one.
    """
    a = float(alpha)
    if abs(a) < SMALL_ALPHA:
        return _kappa_series(a)
    a = -abs(a)
    return -(PI2_6 / a + 2.0 * li2_neg_exp(a) / a + softplus(a)) / LN2


def x_closed_via_reflection(alpha: float) -> float:
    """Alternative closed form of ``x`` through ``Li2`` on ``(0, 1)``.

    Substituting ``u = 1 + e^{alpha y}`` gives
    ``x = 1/2 - ln(1+e^a)^2/(2 a^2) - [Li2(1/(1+e^a)) - pi^2/12] / a^2``.
    """
    a = float(alpha)
    if abs(a) < SMALL_ALPHA:
        return _x_series(a)
    sp = softplus(a)
    return 0.5 - sp * sp / (2 * a * a) - (li2(math.exp(-sp)) - PI2_12) / (a * a)


def unconstrained_closed(alpha: float) -> PhasePoint:
    return PhasePoint(float(alpha), 0.0, x_closed(alpha), kappa_closed(alpha))


def _quad(f, label):
    val, err, info = integrate.quad(f, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200, full_output=True)[:3]
    if err > 10 * QUAD_TOL * max(1.0, abs(val)):
        raise QuadratureError("QUADRATURE_FAILED", f"{label}: estimated error {err:.3g}")
    return val


def unconstrained_quad(alpha: float) -> PhasePoint:
    """Defining integrals by adaptive Gauss-Kronrod quadrature."""
    a = float(alpha)
    x = _quad(lambda y: y * logistic(a * y), f"x({a})")
    k = _quad(lambda y: softplus(-a * y) + a * y * logistic(a * y), f"kappa({a})") / LN2
    return PhasePoint(a, 0.0, x, k)


# --- asymptotic relations along the x-kappa_c curve -----------------------

def near_one_expansion(kappa_c: float) -> tuple[float, float]:
    """Both branches ``(3 -/+ 2 sqrt(6 ln2) sqrt(1 - kappa_c)) / 12`` near ``x = 1/4``.

    The minus branch belongs to ``alpha > 0``, the plus branch to ``alpha < 0``.
    """
    if not 0.9 < kappa_c <= 1.0:
        raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"kappa_c={kappa_c} not in (0.9, 1]")
    d = 2.0 * math.sqrt(6.0 * LN2) * math.sqrt(1.0 - kappa_c)
    return (3.0 - d) / 12.0, (3.0 + d) / 12.0


def near_zero_relation(kappa_c: float) -> float:
    """``x = (12/49) ln(2)^2 kappa_c^2`` for ``kappa_c`` near zero."""
    if not 0.0 < kappa_c <= 0.05:
        raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"kappa_c={kappa_c} not in (0, 0.05]")
    return 12.0 / 49.0 * LN2**2 * kappa_c**2


def near_zero_asymptote(kappa_c: float) -> float:
    """Large-alpha limit ``x ~ 3 ln(2)^2 kappa_c^2 / pi^2`` from ``x ~ pi^2/(12 alpha^2)``."""
    return 3.0 * LN2**2 * kappa_c**2 / math.pi**2


def alpha_for_kappa(kappa_c: float, sign: int = 1) -> float:
    """Root of ``kappa_closed(alpha) = kappa_c`` on the requested side of zero."""
    if not 0.0 < kappa_c < 1.0:
        raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"kappa_c={kappa_c} not in (0, 1)")
    hi = 1.0
    while kappa_closed(hi) > kappa_c:
        hi *= 2.0
        if hi > 1e8:
            raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"kappa_c={kappa_c} too small")
    root = optimize.brentq(lambda a: kappa_closed(a) - kappa_c, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return sign * root


def x_for_kappa(kappa_c: float, sign: int = 1) -> float:
    """Exact ``x`` on the curve at the given ``kappa_c`` by numerical inversion."""
    return x_closed(alpha_for_kappa(kappa_c, sign))


def derivative_relation_check(alpha: float, step: float = 1e-5) -> dict[str, float]:
    """Central-difference check of ``alpha x'(alpha) = ln2 kappa_c'(alpha)``.

    Returns the residual, the finite-difference slope ``dx/dkappa_c`` and the
    predicted slope ``ln2/alpha``.
    """
    a = float(alpha)
    if abs(a) < 1e-2:
        raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"|alpha|={abs(a)} < 1e-2")
    dx = (x_closed(a + step) - x_closed(a - step)) / (2 * step)
    dk = (kappa_closed(a + step) - kappa_closed(a - step)) / (2 * step)
    return {
        "residual": abs(a * dx - LN2 * dk),
        "slope": dx / dk,
        "predicted_slope": LN2 / a,
    }


# --- special golden-ratio points ------------------------------------------

def special_point_check() -> list[dict[str, float]]:
    """Evaluate the golden-ratio special values both ways.

    ``alpha = ln(-+1 + sqrt5)/2`` is read literally and the claimed
    ``Li2(-e^alpha)`` value is compared with direct evaluation. The classical
    identities at ``-1/phi`` and ``-phi`` are reported alongside for context.
    Nothing here is asserted; the dictionaries carry both sides.
    """
    s5 = math.sqrt(5.0)
    phi = (1 + s5) / 2
    rows = []
    claims = {
        "alpha_minus": (0.5 * math.log(s5 - 1), -math.pi**2 / 15 + 0.5 * math.log((s5 - 1) / 2) ** 2),
        "alpha_plus": (0.5 * math.log(s5 + 1), -math.pi**2 / 10 + 0.5 * math.log((s5 + 1) / 2) ** 2),
    }
    for name, (a, claimed) in claims.items():
        direct = li2_neg_exp(a)
        rows.append({"name": name, "alpha": a, "claimed": claimed, "direct": direct, "difference": direct - claimed})
    classical = {
        "li2(-1/phi)": (li2(-1 / phi), -math.pi**2 / 15 + 0.5 * math.log(phi) ** 2),
        "li2(-phi)": (li2(-phi), -math.pi**2 / 10 - math.log(phi) ** 2),
    }
    for name, (direct, known) in classical.items():
        rows.append({"name": name, "alpha": float("nan"), "claimed": known, "direct": direct, "difference": direct - known})
    return rows


# --- constrained (fixed number of elements) -------------------------------

def constrained_quad(alpha: float, mu: float) -> PhasePoint:
    """``rho``, ``x`` and ``kappa_c`` at chemical potential ``mu`` by quadrature."""
    a, m = float(alpha), float(mu)
    rho = _quad(lambda y: logistic(a * y - m), f"rho({a},{m})")
    x = _quad(lambda y: y * logistic(a * y - m), f"x({a},{m})")
    k = _quad(
        lambda y: softplus(m - a * y) + (a * y - m) * logistic(a * y - m),
        f"kappa({a},{m})",
    ) / LN2
    return PhasePoint(a, m, x, k, rho=rho)


def _constrained_x(a, m):
    return 0.5 - softplus(a - m) / a + (li2_neg_exp(-m) - li2_neg_exp(a - m)) / a**2


def constrained_closed(alpha: float, mu: float, fidelity: str = "derived") -> PhasePoint:
    """Closed forms for the constrained problem.

    ``fidelity="paper"`` evaluates the alternative printed expressions:
    ``rho = 1 - ln((1+e^-mu)/(1+e^{a-mu}))/a`` and
    ``kappa_c = (1/ln2){-ln(1+e^{a-mu}) + (2/a)[Li2(-e^-mu) - Li2(-e^{a-mu})]}``.
    ``fidelity="derived"`` uses forms re-derived from the integrals:
    ``rho = 1 - ln((1+e^{a-mu})/(1+e^-mu))/a`` and
    ``kappa_c = (1/ln2){[Li2(-e^{mu-a}) - Li2(-e^mu)]/a + a x - mu rho}``.
    ``x`` is the same in both. The returned ``deviation`` is the largest
    absolute difference from :func:`constrained_quad`.
    """
    a, m = float(alpha), float(mu)
    if abs(a) < SMALL_ALPHA:
        raise ValidityRangeError("OUT_OF_VALIDITY_RANGE", f"|alpha|={abs(a)} < {SMALL_ALPHA}")
    x = _constrained_x(a, m)
    if fidelity == "paper":
        rho = 1.0 - (softplus(-m) - softplus(a - m)) / a
        kappa = (-softplus(a - m) + 2.0 / a * (li2_neg_exp(-m) - li2_neg_exp(a - m))) / LN2
    elif fidelity == "derived":
        rho = 1.0 - (softplus(a - m) - softplus(-m)) / a
        kappa = ((li2_neg_exp(m - a) - li2_neg_exp(m)) / a + a * x - m * rho) / LN2
    else:
        raise ValueError(f"unknown fidelity {fidelity!r}")
    ref = constrained_quad(a, m)
    dev = max(abs(rho - ref.rho), abs(x - ref.x), abs(kappa - ref.kappa_c))
    return PhasePoint(a, m, x, kappa, rho=rho, deviation=dev)


# --- tabulation -------------------------------------------------------------

PHASE_HEADER = ("alpha", "mu", "rho_quad", "x_quad", "kappa_quad", "x_closed", "kappa_closed", "deviation")


def tabulate(alphas, mus=None, fidelity: str = "derived") -> list[dict]:
    """One row per ``(alpha, mu)``; rows whose quadrature fails carry ``error``.

    Without ``mus`` only ``mu = 0`` is tabulated and the unconstrained closed
    forms (with their small-alpha series) supply the closed columns.
    Constrained rows with ``|alpha| < 1e-3`` have no closed form and report NaN.
    """
    constrained = mus is not None
    mus = [0.0] if mus is None else list(mus)
    rows = []
    for m in mus:
        for a in alphas:
            a, m = float(a), float(m)
            row = {"alpha": a, "mu": m}
            try:
                q = constrained_quad(a, m)
            except QuadratureError as exc:
                row.update({k: math.nan for k in PHASE_HEADER[2:]}, error=str(exc))
                rows.append(row)
                continue
            row.update(rho_quad=q.rho, x_quad=q.x, kappa_quad=q.kappa_c)
            if not constrained:
                xc, kc = x_closed(a), kappa_closed(a)
                dev = max(abs(xc - q.x), abs(kc - q.kappa_c))
            elif abs(a) >= SMALL_ALPHA:
                c = constrained_closed(a, m, fidelity)
                xc, kc, dev = c.x, c.kappa_c, c.deviation
            else:
                xc = kc = dev = math.nan
            row.update(x_closed=xc, kappa_closed=kc, deviation=dev)
            rows.append(row)
    return rows
