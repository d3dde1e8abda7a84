"""Normal-distribution primitives used throughout the package.

Univariate cdf/pdf/quantile, bivariate normal rectangle probabilities
(Genz's adaptation of the Drezner-Wesolowsky method), truncated-normal
tail moments and closed-form log-normal cross-sectional moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_TWO_PI = 2.0 * math.pi

# |rho| this close to 1 uses the degenerate one-dimensional formulas.
DEGENERATE_RHO_TOL = 1e-12


@dataclass(frozen=True)
class LogNormalVolModel:
    """log(sigma_i) ~ Normal(log_mean, log_sd)."""

    log_mean: float = -0.722
    log_sd: float = 0.306

    def __post_init__(self) -> None:
        if not (math.isfinite(self.log_mean) and math.isfinite(self.log_sd)):
            raise ValueError("log-normal parameters must be finite")
        if self.log_sd <= 0:
            raise ValueError(f"log_sd must be > 0, got {self.log_sd}")


@dataclass(frozen=True)
class UniverseStats:
    """Cross-sectional moments of specific volatility for an N-stock universe."""

    n: int
    e_inv_sigma: float
    e_sigma: float
    e_sigma_sq: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"universe needs n >= 2, got {self.n}")
        for name in ("e_inv_sigma", "e_sigma", "e_sigma_sq"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        # small slack for rounding in degenerate (constant-vol) universes
        if self.e_sigma_sq < self.e_sigma**2 * (1 - 1e-12):
            raise ValueError("e_sigma_sq must be >= e_sigma**2 (Jensen)")


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"expected a finite value, got {x}")
    return x


def _check_correlation(rho: float) -> float:
    rho = float(rho)
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    return rho


def std_normal_pdf(x: float) -> float:
    x = _check_finite(x)
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _phi(x: float) -> float:
    # cdf without input validation; accepts +-inf
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_cdf(x: float) -> float:
    """Standard normal cdf via the complementary error function.

    erfc keeps full relative precision in the lower tail, so the absolute
    error is at the level of double rounding everywhere.
    """
    return _phi(_check_finite(x))


# Acklam's rational approximation coefficients (relative error ~1.15e-9),
# polished afterwards with a Halley step.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return -num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal cdf, accurate to roughly machine precision."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    x = _acklam(p)
    # Halley refinement; the residual is taken on the smaller tail
    for _ in range(2):
        if x < 0:
            e = _phi(x) - p
        else:
            e = (1.0 - p) - _phi(-x)
        u =e * math.sqrt(_TWO_PI) * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@lru_cache(maxsize=None)
def _half_gauss_legendre(npoints: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    # negative half of an npoints-rule on [-1, 1]
    x, w = np.polynomial.legendre.leggauss(npoints)
    half = x < 0
    return tuple(x[half].tolist()), tuple(w[half].tolist())


def _bvn_upper(dh: float, dk: float, r: float) -> float:
    """P(X > dh, Y > dk) for a standard bivariate normal with correlation r.

    Finite dh, dk and |r| < 1 only. Follows Genz (2004), "Numerical
    computation of rectangular bivariate and trivariate normal and t
    probabilities", Statistics and Computing 14, 251-260.
    """
    ar = abs(r)
    if ar < 0.3:
        xs, ws = _half_gauss_legendre(6)
    elif ar < 0.75:
        xs, ws = _half_gauss_legendre(12)
    else:
        xs, ws = _half_gauss_legendre(20)

    h, k = dh, dk
    hk = h * k
    bvn = 0.0
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = math.asin(r)
        for x, w in zip(xs, ws):
            for sign in (1.0, -1.0):
                sn = math.sin(asr * (sign * x + 1.0) / 2.0)
                bvn += w * math.exp((sn * hk - hs) / (1.0 - sn * sn))
        return bvn * asr / (4.0 * math.pi) + _phi(-h) * _phi(-k)

    if r < 0:
        k = -k
        hk = -hk
    a2 = (1.0 - r) * (1.0 + r)
    a = math.sqrt(a2)
    bs = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 16.0
    bvn = a * math.exp(-(bs / a2 + hk) / 2.0) * (
        1.0 - c * (bs - a2) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a2 * a2 / 5.0
    )
    if hk > -160.0:
        b = math.sqrt(bs)
        bvn -= (
            math.exp(-hk / 2.0) * math.sqrt(_TWO_PI) * _phi(-b / a) * b
            * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
        )
    a /= 2.0
    for x, w in zip(xs, ws):
        for sign in (1.0, -1.0):
            xs2 = (a * (sign * x + 1.0)) ** 2
            rs = math.sqrt(1.0 - xs2)
            asr = -(bs / xs2 + hk) / 2.0
            if asr > -100.0:
                bvn += a * w * math.exp(asr) * (
                    math.exp(-hk * xs2 / (2.0 * (1.0 + rs) ** 2)) / rs
                    - (1.0 + c * xs2 * (1.0 + d * xs2))
                )
    bvn = -bvn / _TWO_PI
    if r > 0:
        return bvn + _phi(-max(h, k))
    bvn = -bvn
    if k > h:
        if h < 0:
            bvn += _phi(k) - _phi(h)
        else:
            bvn += _phi(-h) - _phi(-k)
    return bvn


def _bvn_lower(a: float, b: float, r: float) -> float:
    """P(X < a, Y < b); a and b may be infinite."""
    if a == -math.inf or b == -math.inf:
        return 0.0
    if a == math.inf:
        return _phi(b)
    if b == math.inf:
        return _phi(a)
    if r >= 1.0 - DEGENERATE_RHO_TOL:
        return _phi(min(a, b))
    if r <= -1.0 + DEGENERATE_RHO_TOL:
        # Y = -X: P(-b < X < a)
        return max(0.0, _phi(a) - _phi(-b))
    return _bvn_upper(-a, -b, r)


def _check_bounds(lo: float, up: float) -> tuple[float, float]:
    lo, up = float(lo), float(up)
    if math.isnan(lo) or math.isnan(up):
        raise ValueError("bounds must not be NaN")
    if not lo < up:
        raise ValueError(f"lower bound {lo} must be below upper bound {up}")
    return lo, up


def bvn_rect_prob(lo1: float, up1: float, lo2: float, up2: float, rho: float) -> float:
    """P(lo1 < X < up1, lo2 < Y < up2) for a standard bivariate normal.

    Bounds may be +-inf. Rectangles are assembled from lower-orthant
    probabilities by inclusion-exclusion; |rho| within 1e-12 of 1 is
    handled as perfectly (anti)dependent margins.
    """
    lo1, up1 = _check_bounds(lo1, up1)
    lo2, up2 = _check_bounds(lo2, up2)
    rho = _check_correlation(rho)

    if rho >= 1.0 - DEGENERATE_RHO_TOL:
        lo, up = max(lo1, lo2), min(up1, up2)
        return max(0.0, _phi(up) - _phi(lo)) if lo < up else 0.0
    if rho <= -1.0 + DEGENERATE_RHO_TOL:
        lo, up = max(lo1, -up2), min(up1, -lo2)
        return max(0.0, _phi(up) - _phi(lo)) if lo < up else 0.0

    p = (
        _bvn_lower(up1, up2, rho)
        - _bvn_lower(lo1, up2, rho)
        - _bvn_lower(up1, lo2, rho)
        + _bvn_lower(lo1, lo2, rho)
    )
    return min(1.0, max(0.0, p))


def truncated_tail_moments(p_cut: float) -> tuple[float, float]:
    """Mean and variance of Z | Z > Phi^-1(p_cut) for standard normal Z."""
    p_cut = float(p_cut)
    if not (0.0 < p_cut < 1.0):
        raise ValueError(f"p_cut must lie in (0, 1), got {p_cut}")
    a = std_normal_quantile(p_cut)
    h = std_normal_pdf(a) / (1.0 - p_cut)
    return h, 1.0 + a * h - h * h


def lognormal_universe_stats(model: LogNormalVolModel, n: int) -> UniverseStats:
    """Population moments of sigma, sigma^2 and 1/sigma under the log-normal model."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    m, s2 = model.log_mean, model.log_sd**2
    return UniverseStats(
        n=int(n),
        e_inv_sigma=math.exp(-m + 0.5 * s2),
        e_sigma=math.exp(m + 0.5 * s2),
        e_sigma_sq=math.exp(2.0 * m + 2.0 * s2),
    )
