"""Half-wave field as a resummed superposition of reflected waves.

Each term V_N carries the winding phase of N boundary reflections
through a factor e^{-i N L(w)} inside a two-dimensional frequency
integral; summing over N and applying the Poisson-type identity

    sum_{N in Z} e^{-i N L(w)} = 2 pi sum_k delta(w - w_k) / L'(w_k)

collapses the integral onto the zeros of Ai(-w) and reproduces the
gallery-mode sum exactly.  The identity also fixes the normalization:

    V_N(t,x,y) = h^{-(d-1)-2/3} int dtheta dw
                 e^{i(y theta + t rho(h^{2/3} w, theta))/h} e^{-i N L(w)}
                 q(theta)^{1/3} psi(|theta|) chi(h^{2/3} w)
                 Ai(q^{1/3} h^{-2/3} x - w) Ai(q^{1/3} h^{-2/3} a - w).

Functions
---------
airy_poisson_check     Numerical check of the resummation identity.
v_n_field              Single reflected-wave term V_N on a grid.
images_green           Tapered sum over N, evaluated in one pass.
equivalence_check      Image sum versus gallery-mode sum on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .airy import AiryZeroTable, airy_zeros, phase_L, phase_L_prime
from .domain import (WaveParams, glancing_cutoff, q_eval, smooth_step, window,
                     zero_table_for)
from .spectral import AiryTable, ComplexField, Grid, panel_nodes, spectral_green


def flat_taper(u):
    """Flat-top taper: 1 for |u| <= 1/2, smooth to 0 at |u| = 1.

    Terms inside the flat region are untouched, so a tapered sum equals
    the plain sum whenever every non-negligible term sits at
    |u| <= 1/2."""
    u = np.asarray(u, dtype=float)
    return smooth_step(4.0 * (0.75 - np.abs(u)))


@dataclass(frozen=True)
class AiryPoissonReport:
    """Outcome of the resummation-identity check for one test function."""

    lhs: complex
    rhs: float
    n_max: int
    discrepancy: float
    term_tail: float


def airy_poisson_check(phi, support: tuple[float, float],
                       table: AiryZeroTable | None = None,
                       n_max: int | None = None,
                       tol: float = 1e-8) -> AiryPoissonReport:
    """Check the resummation identity against a smooth test function.

    phi : callable, smooth, compactly supported inside `support` with
        support[0] > 0.
    The left side sums tapered reflected-phase integrals over N; the
    right side is 2 pi sum_k phi(w_k) / L'(w_k).  Because L is strictly
    increasing the integrals decay faster than any power of N, so a
    modest adaptive n_max reaches round-off; the report records the
    largest magnitude among the first tapered-away terms as `term_tail`.
    """
    w_lo, w_hi = support
    if w_lo <= 0:
        raise ValueError("support must sit at positive w")
    if table is None or table.omegas[-1] < w_hi:
        k_need = int(np.ceil((w_hi ** 1.5 * 8 / (3 * np.pi) + 1) / 4)) + 3
        table = airy_zeros(k_need)
    inside = (table.omegas > w_lo) & (table.omegas < w_hi)
    rhs = float(2.0 * np.pi * np.sum(phi(table.omegas[inside])
                                     / table.lprimes[inside]))

    def term(n: int, rate: float) -> complex:
        nodes, wts = panel_nodes(w_lo, w_hi, rate)
        vals = phi(nodes) * np.exp(-1j * n * phase_L(nodes)) * wts
        return complex(np.sum(vals))

    lp_hi = float(phase_L_prime(np.array([w_hi]))[0])
    if n_max is None:
        n_max = 8
        while n_max < 256:
            tail = max(abs(term(n, n * lp_hi + 5.0))
                       for n in (n_max // 2 + 1, n_max // 2 + 2))
            if tail < tol:
                break
            n_max *= 2
    ns = np.arange(-n_max, n_max + 1)
    lhs = 0.0 + 0.0j
    tail_mag = 0.0
    for n in ns:
        tp = float(flat_taper(n / n_max))
        if tp == 0.0:
            continue
        c = term(int(n), abs(n) * lp_hi + 5.0)
        lhs += tp * c
        if abs(n) > n_max // 2:
            tail_mag = max(tail_mag, abs(c))
    disc = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return AiryPoissonReport(lhs=complex(lhs), rhs=rhs, n_max=int(n_max),
                             discrepancy=float(disc), term_tail=float(tail_mag))


def _omega_rule(params: WaveParams, t_max: float, n_rate: int,
                w_lo: float = -18.0):
    """Composite rule in w covering the Airy factors, the reflection
    phase and the time phase, split at w = 2 so the negative range is
    not oversampled."""
    h = params.h
    w_hi = params.alpha_hi / h ** (2.0 / 3.0)
    t_rate = t_max / (2.0 * (1.0 - params.window_delta) * h ** (1.0 / 3.0)) + 1.0

    def rate_at(w):
        lp = float(phase_L_prime(np.array([max(w, w_lo)]))[0])
        airy_rate = 2.0 * np.sqrt(max(w, 0.0) + 1.0)
        return n_rate * lp + airy_rate + t_rate

    seg = []
    if w_lo < 2.0:
        seg.append(panel_nodes(w_lo, min(2.0, w_hi), rate_at(2.0)))
    if w_hi > 2.0:
        seg.append(panel_nodes(2.0, w_hi, rate_at(w_hi)))
    nodes = np.concatenate([s[0] for s in seg])
    wts = np.concatenate([s[1] for s in seg])
    return nodes, wts


def _theta_rule_img(params: WaveParams, t_max: float, y_max: float):
    lo = 1.0 - params.window_delta
    hi = 1.0 + params.window_delta
    rate = (y_max + 2.0 * t_max + 1.0) / params.h
    npos, wpos = panel_nodes(lo, hi, rate)
    return (np.concatenate([-npos[::-1], npos]),
            np.concatenate([wpos[::-1], wpos]))


def _field_from_kernel(params: WaveParams, grid: Grid, kernel,
                       n_rate: int, method: str,
                       chunk: int = 512) -> ComplexField:
    """Shared evaluator for reflected-wave integrals.

    `kernel(w)` supplies the complex reflection factor, e.g.
    e^{-i N L(w)} for one term or a tapered geometric sum for the full
    field; `n_rate` bounds the w-oscillation rate of the kernel in
    units of L'."""
    if params.d != 2:
        raise NotImplementedError("image sum is implemented for d = 2")
    h = params.h
    t_max = float(np.max(np.abs(grid.t)))
    y_max = float(np.max(np.abs(grid.y)))
    theta, wq_t = _theta_rule_img(params, t_max, y_max)
    omg, wq_w = _omega_rule(params, t_max, n_rate)
    qv = q_eval(params.qmat, theta)
    scale = qv ** (1.0 / 3.0) / h ** (2.0 / 3.0)
    psi = window(theta, params) * qv ** (1.0 / 3.0) * wq_t
    kern = kernel(omg) * glancing_cutoff(h ** (2.0 / 3.0) * omg, params) * wq_w
    atab = AiryTable(u_min=-float(np.max(omg)) - 1.0)
    ey = np.exp(1j * np.outer(theta, grid.y) / h)
    nt, nx, ny = grid.shape
    acc = np.zeros((nt, nx, len(theta)), dtype=complex)
    for i0 in range(0, len(omg), chunk):
        om_c = omg[i0:i0 + chunk]
        kern_c = kern[i0:i0 + chunk]
        rho_c = np.sqrt(theta[None, :] ** 2
                        + h ** (2.0 / 3.0) * om_c[:, None] * qv[None, :] ** (2.0 / 3.0))
        ai_a = atab(params.a * scale[None, :] - om_c[:, None])
        base = kern_c[:, None] * ai_a                       # (C, J)
        ai_x = atab(grid.x[:, None, None] * scale[None, None, :]
                    - om_c[None, :, None])                  # (nx, C, J)
        for it, tv in enumerate(grid.t):
            ph = np.exp(1j * tv * rho_c / h) * base         # (C, J)
            acc[it] += np.einsum("xcj,cj->xj", ai_x, ph)
    pref = h ** (-(params.d - 1) - 2.0 / 3.0)
    vals = pref * (acc * psi[None, None, :]) @ ey
    return ComplexField(grid=grid, values=vals, params=params, method=method,
                        meta={"omega_nodes": int(len(omg)),
                              "theta_nodes": int(len(theta)),
                              "n_rate": int(n_rate)})


def v_n_field(params: WaveParams, grid: Grid, n: int) -> ComplexField:
    """Single reflected-wave term V_N on a grid (d = 2)."""
    return _field_from_kernel(
        params, grid,
        kernel=lambda w: np.exp(-1j * n * phase_L(w)),
        n_rate=abs(n), method=f"images:V_{n}")


def suggested_n_max(params: WaveParams, t_max: float) -> int:
    """Reflection count comfortably covering every wave contributing up
    to time t_max: successive reflections are separated by roughly
    4 sqrt(a) in time, and the taper is flat through n_max / 2."""
    if params.a <= 0:
        return 8
    n_contrib = int(np.ceil(t_max / (4.0 * np.sqrt(params.a)))) + 3
    return 2 * n_contrib


def images_green(params: WaveParams, grid: Grid,
                 n_max: int | None = None) -> ComplexField:
    """Tapered sum of reflected waves, evaluated in a single pass.

    The N-sum is folded into the w-kernel sum_N taper(N/n_max)
    e^{-i N L(w)} before quadrature, so the cost matches a single V_N.
    """
    if n_max is None:
        n_max = suggested_n_max(params, float(np.max(np.abs(grid.t))))

    def kernel(w):
        lw = phase_L(w)
        out = np.zeros(len(w), dtype=complex)
        for n in range(-n_max, n_max + 1):
            tp = float(flat_taper(n / n_max))
            if tp:
                out += tp * np.exp(-1j * n * lw)
        return out

    fld = _field_from_kernel(params, grid, kernel, n_rate=n_max,
                             method="images")
    fld.meta["n_max"] = int(n_max)
    return fld


@dataclass(frozen=True)
class EquivalenceReport:
    """Relative agreement of the two field constructions on a grid."""

    rel_linf: float
    sup_spectral: float
    sup_images: float
    n_max: int
    shape: tuple


def equivalence_check(params: WaveParams, grid: Grid,
                      n_max: int | None = None,
                      table: AiryZeroTable | None = None) -> EquivalenceReport:
    """Evaluate both constructions on `grid` and compare in relative
    sup norm (normalized by the spectral sup over the grid)."""
    if table is None:
        table = zero_table_for(params)
    f_spec = spectral_green(params, grid, table)
    f_img = images_green(params, grid, n_max=n_max)
    sup = f_spec.sup()
    rel = float(np.max(np.abs(f_spec.values - f_img.values)) / max(sup, 1e-300))
    return EquivalenceReport(rel_linf=rel, sup_spectral=sup,
                             sup_images=f_img.sup(),
                             n_max=int(f_img.meta["n_max"]),
                             shape=grid.shape)
