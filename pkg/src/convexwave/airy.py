"""Airy-function machinery shared by every other module.

The whole laboratory is organized around the Airy function Ai, its two
complex-rotated companions, and the real-analytic phase that measures how
far the rotated pair has wound around the origin.  That phase drives the
resummation identity connecting a sum over reflected waves to a sum over
whispering-gallery eigenvalues, so the routines here are built once and
treated as trusted primitives everywhere else.

Functions
---------
ai, aip                 Ai and Ai' on real or complex input.
airy_rotated            The rotated pair A+ / A- and derivatives.
phase_L, phase_L_prime  Winding phase of the rotated pair and its derivative.
phase_L_second          Second derivative of the winding phase.
airy_zeros              Table of zeros of Ai(-w) with phase derivatives.
b_series                Large-argument correction series of the phase.
airy_sum_diagnostic     Bounded-growth diagnostics for truncated Airy sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy import special

_ROT = np.exp(-1j * np.pi / 3.0)

AI0 = 3.0 ** (-2.0 / 3.0) / special.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / special.gamma(1.0 / 3.0)


def ai(z):
    """Airy function Ai evaluated elementwise on real or complex input."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return special.airy(z)[0]
    return special.airy(z.astype(float))[0]


def aip(z):
    """Derivative Ai' evaluated elementwise on real or complex input."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return special.airy(z)[1]
    return special.airy(z.astype(float))[1]


def airy_rotated(z):
    """Rotated Airy solutions A+(z), A-(z) and their derivatives.

    A+-(z) = exp(-+ i pi/3) Ai(exp(-+ i pi/3) z).  They satisfy the same
    equation as Ai and the connection identity Ai(-z) = A+(z) + A-(z).
    Returns (aplus, aminus, daplus, daminus).
    """
    z = np.asarray(z, dtype=complex)
    up = _ROT * z
    um = np.conj(_ROT) * z
    aiu_p, daiu_p = special.airy(up)[0], special.airy(up)[1]
    aiu_m, daiu_m = special.airy(um)[0], special.airy(um)[1]
    aplus = _ROT * aiu_p
    aminus = np.conj(_ROT) * aiu_m
    daplus = _ROT ** 2 * daiu_p
    daminus = np.conj(_ROT) ** 2 * daiu_m
    return aplus, aminus, daplus, daminus


def _zero_guess(k):
    """Classical two-sided estimate for the k-th zero of Ai(-w)."""
    k = np.asarray(k, dtype=float)
    return (3.0 * np.pi * (4.0 * k - 1.0) / 8.0) ** (2.0 / 3.0)


# Dense reference branch of the phase on a bracket of the low range; used
# only to pick the right 4*pi sheet before snapping to the exact principal
# angle.  Computed lazily and cached.
_BRANCH_GRID: tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]] | None = None


def _branch_table():
    global _BRANCH_GRID
    if _BRANCH_GRID is None:
        w = np.linspace(-14.0, 4.0, 6001)
        aplus = airy_rotated(w)[0]
        ph = np.unwrap(np.angle(aplus))
        lv = np.pi + 2.0 * ph
        # anchor: L(0) = pi/3 exactly
        i0 = int(np.argmin(np.abs(w)))
        lv += np.pi / 3.0 - np.interp(0.0, w, lv)
        _BRANCH_GRID = (w, lv)
    return _BRANCH_GRID


def _phase_estimate(w):
    """Smooth estimate of the winding phase, accurate to well under 2 pi."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    lo = w < 3.0
    if np.any(lo):
        gw, gl = _branch_table()
        out[lo] = np.interp(w[lo], gw, gl)
    hi = ~lo
    if np.any(hi):
        u = w[hi] ** 1.5
        out[hi] = (4.0 / 3.0) * u + np.pi / 2.0 - (5.0 / 24.0) / u
    return out


def phase_L(w):
    """Winding phase L(w) of the rotated Airy pair, continuous branch.

    L(w) = pi + i log(A-(w)/A+(w)) for real w, fixed so that L -> 0 as
    w -> -inf, L(0) = pi/3, and L(w_k) = 2 pi k at the zeros w_k of
    Ai(-w).  For w >= 1 it behaves as (4/3) w^{3/2} minus a small
    correction series (see `b_series`).

    The value is obtained by snapping a smooth branch estimate to the
    exact principal argument of A+(w), so accuracy is limited only by the
    underlying Airy evaluation.
    """
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    aplus = airy_rotated(w)[0]
    principal = np.pi + 2.0 * np.angle(aplus)  # equals L modulo 4*pi
    est = _phase_estimate(w)
    sheets = np.round((est - principal) / (4.0 * np.pi))
    out = principal + 4.0 * np.pi * sheets
    return out[0] if scalar else out


def phase_L_prime(w):
    """Derivative of the winding phase: L'(w) = 1 / (2 pi A+(w) A-(w)).

    The product A+ A- is real and strictly positive on the real line, so
    L is strictly increasing; L'(w) ~ 2 sqrt(w) for large w and decays
    like a squared Airy tail as w -> -inf.
    """
    w = np.asarray(w, dtype=float)
    aplus, aminus, _, _ = airy_rotated(w)
    prod = (aplus * aminus).real
    return 1.0 / (2.0 * np.pi * prod)


def phase_L_second(w):
    """Second derivative of the winding phase, from the product rule on
    1 / (2 pi A+ A-) and the Airy equation."""
    w = np.asarray(w, dtype=float)
    aplus, aminus, daplus, daminus = airy_rotated(w)
    prod = (aplus * aminus).real
    dprod = (daplus * aminus + aplus * daminus).real
    return -dprod / (2.0 * np.pi * prod ** 2)


@dataclass(frozen=True)
class AiryZeroTable:
    """Zeros w_k of Ai(-w) together with phase-derivative weights.

    Attributes
    ----------
    omegas : increasing zeros, omegas[k-1] = w_k, so Ai(-w_k) = 0.
    lprimes : L'(w_k); also equal to 2 pi Ai'(-w_k)^2.
    kmax : number of stored zeros.
    """

    omegas: npt.NDArray[np.float64]
    lprimes: npt.NDArray[np.float64]
    kmax: int

    def __post_init__(self):
        if self.kmax != len(self.omegas) or self.kmax != len(self.lprimes):
            raise ValueError("table length mismatch")
        if self.kmax and (np.any(np.diff(self.omegas) <= 0) or self.omegas[0] <= 0):
            raise ValueError("zeros must be positive and increasing")


def airy_zeros(kmax: int) -> AiryZeroTable:
    """First `kmax` zeros of Ai(-w), found as phase crossings.

    Each zero solves L(w_k) = 2 pi k; Newton iteration on that equation,
    seeded with the classical estimate (3 pi (4k-1)/8)^{2/3}, converges
    in a few steps because L is strictly increasing and nearly affine on
    the scale of one step.
    """
    if kmax < 1:
        return AiryZeroTable(np.empty(0), np.empty(0), 0)
    k = np.arange(1, kmax + 1, dtype=float)
    w = _zero_guess(k)
    target = 2.0 * np.pi * k
    for _ in range(60):
        step = (phase_L(w) - target) / phase_L_prime(w)
        w = w - step
        if np.max(np.abs(step)) < 1e-13:
            break
    return AiryZeroTable(omegas=w, lprimes=phase_L_prime(w), kmax=kmax)


@dataclass(frozen=True)
class PhaseB:
    """Large-argument correction series of the winding phase.

    For u = w^{3/2} >= 1 the phase satisfies
        L(w) = (4/3) u + pi/2 - B(u)
    with B(u) ~ sum_k b[k] u^{-(k+1)}; b[0] = 5/24 is exact and the
    higher coefficients are fitted against the phase itself.  The
    constant pi/2 is kept outside the series so that B decays at
    infinity.  `eval`, `deriv` and `second` evaluate B, B', B'' for
    moderate-to-large u; below `u_switch` they fall back on exact phase
    evaluations.
    """

    coeffs: npt.NDArray[np.float64]
    u_switch: float = 8.0
    fit_residual: float = 0.0

    def eval(self, u):
        u = np.asarray(u, dtype=float)
        small = u < self.u_switch
        out = np.zeros_like(u)
        if np.any(small):
            us = u[small]
            out[small] = (4.0 / 3.0) * us + np.pi / 2.0 - phase_L(us ** (2.0 / 3.0))
        if np.any(~small):
            ub = u[~small]
            acc = np.zeros_like(ub)
            for j, b in enumerate(self.coeffs):
                acc += b * ub ** (-(j + 1.0))
            out[~small] = acc
        return out

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        small = u < self.u_switch
        out = np.zeros_like(u)
        if np.any(small):
            us = u[small]
            w = us ** (2.0 / 3.0)
            # dL/du = L'(w) (2/3) u^{-1/3}
            out[small] = (4.0 / 3.0) - phase_L_prime(w) * (2.0 / 3.0) * us ** (-1.0 / 3.0)
        if np.any(~small):
            ub = u[~small]
            acc = np.zeros_like(ub)
            for j, b in enumerate(self.coeffs):
                acc += -(j + 1.0) * b * ub ** (-(j + 2.0))
            out[~small] = acc
        return out

    def second(self, u):
        u = np.asarray(u, dtype=float)
        small = u < self.u_switch
        out = np.zeros_like(u)
        if np.any(small):
            us = u[small]
            w = us ** (2.0 / 3.0)
            dwdu = (2.0 / 3.0) * us ** (-1.0 / 3.0)
            d2wdu2 = -(2.0 / 9.0) * us ** (-4.0 / 3.0)
            out[small] = -(phase_L_second(w) * dwdu ** 2 + phase_L_prime(w) * d2wdu2)
        if np.any(~small):
            ub = u[~small]
            acc = np.zeros_like(ub)
            for j, b in enumerate(self.coeffs):
                acc += (j + 1.0) * (j + 2.0) * b * ub ** (-(j + 3.0))
            out[~small] = acc
        return out


def b_series(n_terms: int = 6, w_lo: float = 10.0, w_hi: float = 40.0,
             n_samples: int = 400) -> PhaseB:
    """Fit the correction series of the winding phase.

    The leading coefficient 5/24 is pinned; the remaining `n_terms - 1`
    coefficients are obtained by least squares on B(u) - (5/24)/u over
    w in [w_lo, w_hi].  The returned object also records the maximum
    absolute fit residual on the sample grid.
    """
    if n_terms < 1:
        raise ValueError("need at least the pinned leading coefficient")
    w = np.linspace(w_lo, w_hi, n_samples)
    u = w ** 1.5
    bval = (4.0 / 3.0) * u + np.pi / 2.0 - phase_L(w)
    resid = bval - (5.0 / 24.0) / u
    coeffs = np.zeros(n_terms)
    coeffs[0] = 5.0 / 24.0
    if n_terms > 1:
        cols = np.stack([u ** (-(j + 1.0)) for j in range(1, n_terms)], axis=1)
        sol, *_ = np.linalg.lstsq(cols, resid, rcond=None)
        coeffs[1:] = sol
        resid = resid - cols @ sol
    return PhaseB(coeffs=coeffs, fit_residual=float(np.max(np.abs(resid))))


@dataclass(frozen=True)
class AirySumDiagnostic:
    """Result of the truncated Airy-sum growth scans."""

    l_count: int
    shifts: npt.NDArray[np.float64]
    plain_sums: npt.NDArray[np.float64]
    deriv_sums_pos: float
    deriv_sums_neg: float
    plain_bound_ratio: float
    deriv_ratio_pos: float
    deriv_ratio_neg: float


def airy_sum_diagnostic(l_count: int, hvals_scale: float,
                        shifts: npt.NDArray[np.float64] | None = None,
                        table: AiryZeroTable | None = None) -> AirySumDiagnostic:
    """Scan truncated sums of shifted squared Airy values against their
    expected growth rates.

    plain(b)  = sum_{k<=L} k^{-1/3} Ai(b - w_k)^2                  -> O(L^{1/3})
    dpos(b)   = s^2 sum_{k<=L} k^{-1/3} Ai'(b - w_k)^2 at b >= 0   -> O(s^2 L)
    dneg(b)   = s^2 sum_{k<=L} k^{-1/3} Ai'(b - w_k)^2 at b <= 0   -> O(s L^{2/3})

    where s = hvals_scale^{1/3} plays the role of the (2/3)-power of a
    small parameter.  The ratios returned are sup over the scanned
    shifts of sum / growth-model; bounded ratios across L certify the
    expected growth.
    """
    if table is None or table.kmax < l_count:
        table = airy_zeros(l_count)
    om = table.omegas[:l_count]
    k = np.arange(1, l_count + 1, dtype=float)
    if shifts is None:
        shifts = np.concatenate([
            -np.geomspace(1e-2, om[-1] * 1.2, 40)[::-1],
            np.linspace(0.0, om[-1] * 1.2, 81),
        ])
    shifts = np.asarray(shifts, dtype=float)
    args = shifts[:, None] - om[None, :]
    aiv = ai(args)
    aipv = aip(args)
    kw = k[None, :] ** (-1.0 / 3.0)
    plain = np.sum(kw * aiv ** 2, axis=1)
    dsum = np.sum(kw * aipv ** 2, axis=1)
    s2 = float(hvals_scale) ** (2.0 / 3.0)
    pos = shifts >= 0.0
    dpos = float(np.max(s2 * dsum[pos])) if np.any(pos) else 0.0
    dneg = float(np.max(s2 * dsum[~pos])) if np.any(~pos) else 0.0
    return AirySumDiagnostic(
        l_count=l_count,
        shifts=shifts,
        plain_sums=plain,
        deriv_sums_pos=dpos,
        deriv_sums_neg=dneg,
        plain_bound_ratio=float(np.max(plain) / l_count ** (1.0 / 3.0)),
        deriv_ratio_pos=dpos / (s2 * l_count),
        deriv_ratio_neg=dneg / (s2 ** 0.5 * l_count ** (2.0 / 3.0)),
    )
