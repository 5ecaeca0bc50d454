"""Vectorized per-subcarrier optimization over all (IR, SC) pairs at once.

The dual loop evaluates K1*N subproblems per iteration, so the scalar
reference path in :mod:`ofdma_swipt.persc` is too slow there. This module
computes the same candidate construction with array arithmetic (closed-form
quadratic/cubic roots plus a few damped Newton polish steps). Equivalence
with the scalar path is cross-checked in the test suite.

All computations run in normalized units per element: power scaled by
sigma^2/sqrt(h2*b2), so the effective gains are sqrt(h2/b2) and its inverse
and the noise power is one.
"""

from __future__ import annotations

import numpy as np

from .model import LN2, GAIN_RTOL

_TINY = 1e-300


def _alpha_star(p, h, b):
    """Clamped optimal split ratio at fixed power (normalized units)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        a = 0.5 + (0.5 / p) * (1.0 / h - 1.0 / b)
    return np.clip(a, 0.0, 1.0)


def _value(p, a, h, b, w, om):
    """w * secrecy_rate(p, a) + p * om with the zero-region enforced; NaN-safe."""
    p = np.where(np.isfinite(p) & (p > 0), p, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (1.0 / a) * (1.0 / h - 1.0 / b)
        x = np.where(a > 0, x, np.where(b >= h, np.inf, -np.inf))
        xp = np.maximum(x, 0.0)
        rs = (np.log2(1.0 + (1.0 - a) * h * p)
              - np.log2(1.0 + b * p) + np.log2(1.0 + a * b * p))
        rs = np.where(p > xp, np.maximum(rs, 0.0), 0.0)
        v = w * rs + p * om
    return np.where(np.isnan(p), -np.inf, v)


def _dLdp(p, a, h, b, w, om):
    """Analytic derivative of the per-SC objective in p at fixed alpha."""
    return (w / LN2) * ((1.0 - a) * h / (1.0 + (1.0 - a) * h * p)
                        - b / (1.0 + b * p)
                        + a * b / (1.0 + a * b * p)) + om


def _quad_roots(a2, b2, c2):
    """Real roots of a2 x^2 + b2 x + c2 elementwise; NaN where absent.

    Falls back to the linear root where the leading coefficient vanishes.
    Returns an array of shape (2,) + a2.shape.
    """
    a2, b2, c2 = np.broadcast_arrays(a2, b2, c2)
    scale = np.maximum(np.maximum(np.abs(a2), np.abs(b2)), np.abs(c2))
    lead_ok = np.abs(a2) > 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b2 * b2 - 4.0 * a2 * c2
        sq = np.sqrt(np.maximum(disc, 0.0))
        # numerically stable pairing: q = -(b + sign(b) sqrt(disc)) / 2
        q = -0.5 * (b2 + np.where(b2 >= 0, sq, -sq))
        r1 = q / np.where(np.abs(a2) > _TINY, a2, np.nan)
        r2 = c2 / np.where(np.abs(q) > _TINY, q, np.nan)
        lin = -c2 / np.where(np.abs(b2) > _TINY, b2, np.nan)
    r1 = np.where(lead_ok, np.where(disc >= 0, r1, np.nan), lin)
    r2 = np.where(lead_ok, np.where(disc >= 0, r2, np.nan), np.nan)
    return np.stack([r1, r2])


def _cubic_roots(a, b, c, d):
    """Real roots of a x^3 + b x^2 + c x + d elementwise; NaN-padded (3, ...)."""
    a, b, c, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c, d)))
    scale = np.max(np.stack([np.abs(a), np.abs(b), np.abs(c), np.abs(d)]), axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    cubic = np.abs(a) > 1e-14 * scale
    out = np.full((3,) + a.shape, np.nan)
    # quadratic/linear fallback
    qr = _quad_roots(b, c, d)
    out[0] = np.where(~cubic, qr[0], np.nan)
    out[1] = np.where(~cubic, qr[1], np.nan)
    # depressed cubic t^3 + pt + q with x = t - b/(3a)
    with np.errstate(divide="ignore", invalid="ignore"):
        an = np.where(cubic, a, 1.0)
        bb, cc, dd = b / an, c / an, d / an
        shift = bb / 3.0
        pp = cc - bb * bb / 3.0
        qq = 2.0 * bb ** 3 / 27.0 - bb * cc / 3.0 + dd
        disc = (qq / 2.0) ** 2 + (pp / 3.0) ** 3
        # one real root (disc > 0)
        sq = np.sqrt(np.maximum(disc, 0.0))
        u = np.cbrt(-qq / 2.0 + sq)
        v = np.cbrt(-qq / 2.0 - sq)
        t_single = u + v
        # three real roots (disc <= 0): trigonometric form
        m = np.sqrt(np.maximum(-pp / 3.0, 0.0))
        denom = np.where(m > _TINY, 2.0 * m ** 3, np.nan)
        cosarg = np.clip(np.where(np.isnan(denom), 0.0, -qq / (2.0 * np.where(m > _TINY, m ** 3, 1.0))), -1.0, 1.0)
        theta = np.arccos(cosarg) / 3.0
        t0 = 2.0 * m * np.cos(theta)
        t1 = 2.0 * m * np.cos(theta - 2.0 * np.pi / 3.0)
        t2 = 2.0 * m * np.cos(theta - 4.0 * np.pi / 3.0)
    three = cubic & (disc <= 0)
    single = cubic & (disc > 0)
    out[0] = np.where(three, t0 - shift, out[0])
    out[1] = np.where(three, t1 - shift, out[1])
    out[2] = np.where(three, t2 - shift, np.nan)
    out[0] = np.where(single, t_single - shift, out[0])
    return out


def _polish(p, a, h, b, w, om, p_hi, iters=3, envelope=False):
    """Damped Newton steps on dL/dp; alpha tracks alpha*(p) when envelope."""
    for _ in range(iters):
        aa = _alpha_star(p, h, b) if envelope else a
        g = _dLdp(p, aa, h, b, w, om)
        eps = 1e-7 * np.maximum(p, _TINY)
        a_p = _alpha_star(p + eps, h, b) if envelope else a
        a_m = _alpha_star(p - eps, h, b) if envelope else a
        slope = (_dLdp(p + eps, a_p, h, b, w, om)
                 - _dLdp(p - eps, a_m, h, b, w, om)) / (2.0 * eps)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = g / slope
        step = np.clip(step, -0.5 * p, 0.5 * p)
        p_new = p - step
        ok = np.isfinite(p_new) & (p_new > 0) & (p_new <= p_hi)
        p = np.where(ok, p_new, p)
    return p


def solve_all(H, B, sigma2, weights, omega, p_peak, alpha_fixed=None):
    """Optimal (p, alpha, value) for every (IR, SC) pair.

    H, B: (K1, N) IR and eavesdropper gains; weights: (K1,); omega: (N,)
    price vector; p_peak: scalar cap (must be finite here — the dual loop
    caps at min(P_peak, P_max), which the total-power constraint implies).
    With ``alpha_fixed`` the split ratio is pinned and only the power is
    optimized (fixed-alpha benchmark schemes).

    Returns arrays p (K1, N), alpha (K1, N), value (K1, N).
    """
    H = np.asarray(H, dtype=float)
    B = np.asarray(B, dtype=float)
    w = np.asarray(weights, dtype=float)[:, None]
    om_in = np.broadcast_to(np.asarray(omega, dtype=float), H.shape)
    if not np.isfinite(p_peak):
        raise ValueError("vectorized solver requires a finite power cap")

    # normalized units
    p0 = sigma2 / np.sqrt(H * B)
    h = np.sqrt(H / B)
    b = 1.0 / h
    om = om_in * p0
    pk = p_peak / p0

    eq = np.isclose(H, B, rtol=GAIN_RTOL, atol=0.0)
    hgb = (H > B) & ~eq  # scenario d/e side
    hlb = (H < B) & ~eq  # scenario a/b side

    cands_p = []
    cands_a = []

    if alpha_fixed is None:
        # subregion i: alpha-eliminated stationarity quadratic
        a2 = LN2 * b * b * h * om
        b2 = b * (b * h * w + LN2 * om * (b + 2.0 * h))
        c2 = b * w * (h - b) + LN2 * om * (b + h)
        qr = _quad_roots(a2, b2, c2)
        for r in qr:
            r = np.where(r > 0, r, np.nan)
            r = _polish(r, None, h, b, w, om, pk, envelope=True)
            cands_p.append(r)
            cands_a.append(_alpha_star(r, h, b))
        # peak boundary with its best split
        pk_arr = np.broadcast_to(pk, H.shape)
        cands_p.append(pk_arr)
        cands_a.append(_alpha_star(pk_arr, h, b))
        # subregion ii: fixed alpha=0 stationarity (h2 > b2 only)
        b1 = b * LN2 * om * (-h)
        c1 = -LN2 * om * (b + h)
        d1 = -w * (h - b) - LN2 * om
        qr0 = _quad_roots(b1, c1, d1)
        for r in qr0:
            r = np.where(hgb & (r > 0), r, np.nan)
            r = _polish(r, 0.0, h, b, w, om, pk)
            cands_p.append(r)
            cands_a.append(np.zeros_like(r))
        # clamp boundary of the two subregions
        p_clamp = np.where(hgb, 1.0 / b - 1.0 / h, np.nan)
        cands_p.append(np.where(p_clamp <= pk, p_clamp, np.nan))
        cands_a.append(np.zeros_like(p_clamp))
        # zero-rate region boundary candidate (h2 < b2)
        cands_p.append(np.where(hlb, pk, np.nan))
        cands_a.append(np.zeros_like(h))
    else:
        a0 = float(alpha_fixed)
        nctx_coeffs = _fixed_alpha_coeffs(a0, h, b, w, om)
        cr = _cubic_roots(*nctx_coeffs)
        for r in cr:
            r = np.where(r > 0, r, np.nan)
            r = _polish(r, a0, h, b, w, om, pk)
            cands_p.append(r)
            cands_a.append(np.full_like(r, a0))
        pk_arr = np.broadcast_to(pk, H.shape).copy()
        cands_p.append(pk_arr)
        cands_a.append(np.full_like(pk_arr, a0))

    P = np.stack(cands_p)
    A = np.stack(cands_a)
    P = np.where((P > 0) & (P <= pk), P, np.nan)
    V = _value(P, A, h, b, w, om)
    V = np.where(np.isfinite(V), V, -np.inf)
    best = np.argmax(V, axis=0)
    idx = np.indices(H.shape)
    p_best = P[best, idx[0], idx[1]]
    a_best = A[best, idx[0], idx[1]]
    v_best = V[best, idx[0], idx[1]]
    # the skip fallback (0, 0) has value 0
    skip = ~(v_best > 0.0)
    p_best = np.where(skip, 0.0, p_best) * p0
    a_best = np.where(skip, 0.0, a_best)
    v_best = np.where(skip, 0.0, v_best)
    return p_best, a_best, v_best


def _fixed_alpha_coeffs(a, h, b, w, om):
    """Stationarity cubic coefficients at fixed alpha (normalized units)."""
    a1 = LN2 * h * b * b * om * a * (a - 1.0)
    b1 = b * (b * h * w * a * (a - 1.0) + LN2 * om * (h * a * a - b * a - h))
    c1 = 2.0 * b * h * w * a * (a - 1.0) - LN2 * om * (b * (1.0 + a) + h * (1.0 - a))
    d1 = (a - 1.0) * (h - b) * w - LN2 * om
    return a1, b1, c1, d1
