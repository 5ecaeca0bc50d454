"""Per-subcarrier joint optimization of transmit power and AN split ratio.

Given the dual prices, each (IR, SC) pair contributes
``L(p, a) = w * secrecy_rate(p, a) + p * omega`` and the maximizer is found
among a finite candidate set built from stationarity polynomials plus
boundary points. Five scenarios arise from the sign of ``h2 - b2`` and the
position of the peak-power cap relative to the zero-rate threshold.

Stationarity polynomials are evaluated in normalized units (noise power 1,
gains replaced by sqrt(h2/b2) and its reciprocal) so that coefficients stay
near unity; raw evaluation underflows in double precision at realistic
parameter magnitudes (noise around 5e-12 W, gains spanning many decades).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import LN2, GAIN_RTOL, DomainError, rate_eve, rate_ir, secrecy_rate, threshold_x


class UnboundedSubproblemError(RuntimeError):
    """The per-SC Lagrangian grows without bound (infinite peak power, omega >= 0)."""


@dataclass(frozen=True)
class PerScContext:
    """Inputs of one (IR, SC) subproblem."""

    h2: float  # IR channel power gain
    b2: float  # worst-case eavesdropper power gain
    sigma2: float  # noise power, watts
    weight: float  # IR weight
    omega: float  # dual price term on transmit power
    p_peak: float  # per-SC power cap, may be math.inf

    def __post_init__(self):
        if self.h2 <= 0 or self.b2 <= 0 or self.sigma2 <= 0:
            raise DomainError("gains and noise power must be positive")
        if self.weight <= 0:
            raise DomainError("weight must be positive")
        if self.p_peak <= 0:
            raise DomainError("peak power must be positive")

    def gains_equal(self) -> bool:
        return math.isclose(self.h2, self.b2, rel_tol=GAIN_RTOL, abs_tol=0.0)


@dataclass
class CandidateSet:
    """Feasible (p, alpha) candidates and the scenario label they came from."""

    candidates: list[tuple[float, float]]
    scenario: str  # one of 'a'..'e'


def price_omega(lam: np.ndarray, gamma: float, zeta: np.ndarray,
                er_gains_on_sc: np.ndarray) -> float:
    """Dual price of transmit power on one SC: -gamma + sum_l lam_l zeta_l g_l."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return float(-gamma + (lam * np.asarray(zeta) * np.asarray(er_gains_on_sc)).sum())


def optimal_alpha_given_p(p: float, ctx: PerScContext) -> float:
    """Best split ratio at fixed power: [1/2 + (s/2p)(1/h2 - 1/b2)]^+, always < 1."""
    if p <= 0:
        raise DomainError("power must be positive")
    a = 0.5 + (ctx.sigma2 / (2.0 * p)) * (1.0 / ctx.h2 - 1.0 / ctx.b2)
    # below the zero-rate threshold the unclamped value can reach 1; such
    # candidates are filtered out by the threshold check downstream
    return min(max(a, 0.0), 1.0)


def lagrangian_value(p: float, alpha: float, ctx: PerScContext) -> float:
    """w * secrecy_rate + p * omega at one candidate."""
    if p == 0.0:
        return 0.0
    rs = secrecy_rate(p, alpha, ctx.h2, ctx.b2, ctx.sigma2)
    return ctx.weight * rs + p * ctx.omega


def lagrangian_dp(p: float, alpha: float, ctx: PerScContext) -> float:
    """Analytic d/dp of w*(rate_ir - rate_eve) + p*omega at fixed alpha."""
    h2, b2, s = ctx.h2, ctx.b2, ctx.sigma2
    term = ((1.0 - alpha) * h2 / (s + (1.0 - alpha) * h2 * p)
            - b2 / (s + b2 * p)
            + alpha * b2 / (s + alpha * b2 * p))
    return ctx.weight * term / LN2 + ctx.omega


def _normalized(ctx: PerScContext) -> tuple[PerScContext, float]:
    """Rescale power so noise is 1 and the two gains are reciprocal; return scale."""
    p0 = ctx.sigma2 / math.sqrt(ctx.h2 * ctx.b2)
    r = math.sqrt(ctx.h2 / ctx.b2)
    return PerScContext(h2=r, b2=1.0 / r, sigma2=1.0, weight=ctx.weight,
                        omega=ctx.omega * p0, p_peak=ctx.p_peak / p0), p0


def _cubic_coeffs(alpha: float, ctx: PerScContext) -> tuple[float, float, float, float]:
    """Coefficients of the fixed-alpha stationarity cubic in p (descending)."""
    H, B, s, w, om = ctx.h2, ctx.b2, ctx.sigma2, ctx.weight, ctx.omega
    a = alpha
    a1 = LN2 * H * B * B * om * a * (a - 1.0)
    b1 = B * (B * H * w * a * (a - 1.0) + LN2 * om * s * (H * a * a - B * a - H))
    c1 = (2.0 * B * H * w * s * a * (a - 1.0)
          - LN2 * om * s * s * (B * (1.0 + a) + H * (1.0 - a)))
    d1 = (a - 1.0) * (H - B) * w * s * s - LN2 * om * s ** 3
    return a1, b1, c1, d1


def _quadratic_coeffs(ctx: PerScContext) -> tuple[float, float, float]:
    """Coefficients of the stationarity quadratic with alpha eliminated."""
    H, B, s, w, om = ctx.h2, ctx.b2, ctx.sigma2, ctx.weight, ctx.omega
    a2 = LN2 * B * B * H * om
    b2 = B * (B * H * w + LN2 * om * s * (B + 2.0 * H))
    c2 = s * (B * w * (H - B) + LN2 * om * s * (B + H))
    return a2, b2, c2


def _real_positive_roots(coeffs) -> list[float]:
    """Real positive roots of a polynomial given in descending coefficients."""
    c = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return []
    c = c / scale
    c = np.trim_zeros(c, "f")
    # drop leading coefficients that are negligible against the rest
    while len(c) > 1 and abs(c[0]) < 1e-14 * np.max(np.abs(c)):
        c = c[1:]
    if len(c) <= 1:
        return []
    roots = np.roots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real)) and r.real > 0:
            out.append(float(r.real))
    return sorted(out)


def _newton_polish(p: float, deriv, lo: float, hi: float, iters: int = 4) -> float:
    """A few damped Newton steps on ``deriv`` with a finite-difference slope."""
    for _ in range(iters):
        g = deriv(p)
        eps = 1e-7 * p
        slope = (deriv(p + eps) - deriv(p - eps)) / (2.0 * eps)
        if slope == 0.0 or not math.isfinite(slope):
            break
        step = g / slope
        step = max(min(step, 0.5 * p), -0.5 * p)
        p_new = p - step
        if not (lo < p_new <= hi) or not math.isfinite(p_new):
            break
        p = p_new
        if abs(g) < 1e-15:
            break
    return p


def cubic_candidates(alpha: float, ctx: PerScContext) -> list[float]:
    """Stationary powers at fixed alpha within ([X(alpha)]^+, P_peak]."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("split ratio must lie in [0, 1]")
    nctx, p0 = _normalized(ctx)
    roots = _real_positive_roots(_cubic_coeffs(alpha, nctx))
    x_plus = max(threshold_x(alpha, nctx.h2, nctx.b2, nctx.sigma2), 0.0)
    hi = min(nctx.p_peak, math.inf)
    out = []
    for r in roots:
        r = _newton_polish(r, lambda p: lagrangian_dp(p, alpha, nctx),
                           lo=0.0, hi=hi if math.isfinite(hi) else 1e30)
        if x_plus < r <= nctx.p_peak:
            out.append(r * p0)
    return sorted(set(out))


def _alpha_clamp_point(ctx: PerScContext) -> float:
    """Power at which the unclamped optimal alpha hits zero (h2 > b2 only)."""
    return (1.0 / ctx.b2 - 1.0 / ctx.h2) * ctx.sigma2


def _envelope_dp(p: float, ctx: PerScContext) -> float:
    return lagrangian_dp(p, optimal_alpha_given_p(p, ctx), ctx)


def quadratic_candidates(ctx: PerScContext) -> list[tuple[float, float]]:
    """Joint (p, alpha*(p)) candidates from the alpha-eliminated stationarity.

    Includes the peak-power boundary pair when the cap is finite; with an
    infinite cap and a nonnegative power price the subproblem is unbounded.
    """
    if math.isinf(ctx.p_peak) and ctx.omega >= 0.0:
        raise UnboundedSubproblemError(
            "per-SC objective grows without bound at infinite peak power")
    nctx, p0 = _normalized(ctx)
    a2, b2, c2 = _quadratic_coeffs(nctx)
    roots = _real_positive_roots([a2, b2, c2])
    out: list[tuple[float, float]] = []
    for r in roots:
        r = _newton_polish(r, lambda p: _envelope_dp(p, nctx),
                           lo=0.0, hi=nctx.p_peak if math.isfinite(nctx.p_peak) else 1e30)
        a = optimal_alpha_given_p(r, nctx)
        x_plus = max(threshold_x(a, nctx.h2, nctx.b2, nctx.sigma2), 0.0)
        if x_plus < r <= nctx.p_peak:
            out.append((r * p0, a))
    if math.isfinite(ctx.p_peak):
        out.append((ctx.p_peak, optimal_alpha_given_p(ctx.p_peak, ctx)))
    return out


def feasible_set(ctx: PerScContext) -> CandidateSet:
    """Classify into scenario a-e and assemble the candidate set.

    Always contains the (0, 0) fallback so the assignment rule can compare
    against skipping the subcarrier.
    """
    cands: list[tuple[float, float]] = [(0.0, 0.0)]
    if ctx.gains_equal():
        scenario = "c"
        cands += quadratic_candidates(ctx)
    elif ctx.h2 < ctx.b2:
        x1 = threshold_x(1.0, ctx.h2, ctx.b2, ctx.sigma2)
        if ctx.p_peak > x1:
            scenario = "a"
            cands += quadratic_candidates(ctx)
            if math.isfinite(ctx.p_peak):
                cands.append((ctx.p_peak, 0.0))
        else:
            scenario = "b"
            cands.append((ctx.p_peak, 0.0))
    else:
        p_clamp = _alpha_clamp_point(ctx)
        if ctx.p_peak > p_clamp:
            scenario = "d"
            cands += quadratic_candidates(ctx)
            cands += [(p, 0.0) for p in cubic_candidates(0.0, ctx)]
            # the two-subregion split can have its maximum exactly where
            # alpha*(p) clamps to zero
            cands.append((p_clamp, 0.0))
        else:
            scenario = "e"
            cands += [(p, 0.0) for p in cubic_candidates(0.0, ctx)]
            # the stationary-root set alone misses maxima at the power cap
            # (objective increasing on the whole feasible interval)
            cands.append((ctx.p_peak, 0.0))
    cleaned = []
    for p, a in cands:
        if math.isfinite(p) and 0.0 <= p <= ctx.p_peak:
            cleaned.append((p, min(max(a, 0.0), 1.0)))
    return CandidateSet(candidates=cleaned, scenario=scenario)


def solve_per_sc(ctx: PerScContext) -> tuple[float, float, float]:
    """Maximize w*secrecy_rate + p*omega; returns (p*, alpha*, value)."""
    fs = feasible_set(ctx)
    best = (0.0, 0.0, 0.0)
    for p, a in fs.candidates:
        v = lagrangian_value(p, a, ctx)
        if v > best[2]:
            best = (p, a, v)
    return best
