"""Model half-space domain with a strictly convex, possibly anisotropic
boundary, encoded through a tangential quadratic form.

The domain is {x >= 0} with a Laplacian whose normal Taylor expansion at
the boundary is  dxx + dyy + x * sum_jk Q[j,k] dy_j dy_k ; positive
definite Q makes every boundary point strictly convex (diffractive).
Plane waves tangential to the boundary separate into gallery modes built
from shifted Airy functions; this module provides the quadratic form,
the gallery-mode eigenvalues and eigenfunctions, the characteristic
speed symbol, and the smooth frequency windows used by the field
builders.

Functions
---------
q_eval, q_grad          Tangential quadratic form and gradient.
rho_symbol              Characteristic speed sqrt(|theta|^2 + alpha q^{2/3}).
lambda_k                Gallery-mode eigenvalue |eta|^2 + w_k q(eta)^{2/3}.
mode_eval               L2-normalized gallery eigenfunction.
mode_norm_check         Direct quadrature of mode inner products.
bump, smooth_step       Smooth compactly supported window profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .airy import AiryZeroTable, ai, airy_zeros


def _as_qmat(q, d: int) -> npt.NDArray[np.float64]:
    """Coerce a scalar / sequence into a (d-1)x(d-1) SPD matrix."""
    n = d - 1
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if q.shape == (1, 1) and n > 1:
        q = q[0, 0] * np.eye(n)
    if q.shape != (n, n):
        raise ValueError(f"quadratic form must be {n}x{n}, got {q.shape}")
    if not np.allclose(q, q.T):
        raise ValueError("quadratic form must be symmetric")
    if np.any(np.linalg.eigvalsh(q) <= 0):
        raise ValueError("quadratic form must be positive definite")
    return q


@dataclass(frozen=True)
class WaveParams:
    """Immutable bundle of physical and window parameters.

    Attributes
    ----------
    d : spatial dimension (2 fully supported, 3 best effort).
    h : semiclassical wavelength, 0 < h < 1.
    a : distance of the source from the boundary, a >= 0.
    window_delta : half-width of the annular frequency window around
        |theta| = 1; the window is identically zero outside
        [1 - window_delta, 1 + window_delta].
    qform : tangential quadratic form, scalar for d = 2.
    alpha_lo, alpha_hi : the glancing cutoff in the scaled normal
        frequency alpha = h^{2/3} w is identically 1 below alpha_lo and
        identically 0 above alpha_hi; modes whose alpha exceeds
        alpha_hi contribute exactly nothing.
    """

    d: int = 2
    h: float = 2.0 ** -8
    a: float = 0.25
    window_delta: float = 0.2
    qform: float | tuple = 1.0
    alpha_lo: float = 0.8
    alpha_hi: float = 1.2

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("d must be 2 or 3")
        if not 0.0 < self.h < 1.0:
            raise ValueError("h must lie in (0, 1)")
        if self.a < 0.0:
            raise ValueError("a must be nonnegative")
        if not 0.0 < self.window_delta < 1.0:
            raise ValueError("window_delta must lie in (0, 1)")
        if not 0.0 < self.alpha_lo < self.alpha_hi:
            raise ValueError("need 0 < alpha_lo < alpha_hi")
        _as_qmat(self.qform, self.d)

    @property
    def qmat(self) -> npt.NDArray[np.float64]:
        return _as_qmat(self.qform, self.d)

    def kmax(self, table_margin: int = 2) -> int:
        """Number of gallery modes that can meet the glancing cutoff.

        A mode with zero w_k contributes only where the cutoff factor in
        alpha = h^{2/3} w_k is nonzero, so every mode with
        alpha > alpha_hi is dropped exactly.
        """
        w_cap = self.alpha_hi / self.h ** (2.0 / 3.0)
        # invert the zero asymptotics w_k ~ (3 pi (4k-1)/8)^{2/3}
        k_est = (w_cap ** 1.5 * 8.0 / (3.0 * np.pi) + 1.0) / 4.0
        return int(np.ceil(k_est)) + table_margin


def q_eval(qmat, eta):
    """Evaluate the tangential quadratic form q(eta).

    `eta` is scalar-like for d = 2, or an array whose last axis has
    length d - 1 for d = 3.
    """
    qmat = np.atleast_2d(np.asarray(qmat, dtype=float))
    eta = np.asarray(eta, dtype=float)
    if qmat.shape == (1, 1):
        return qmat[0, 0] * eta ** 2
    return np.einsum("...i,ij,...j->...", eta, qmat, eta)


def q_grad(qmat, eta):
    """Gradient of the quadratic form, 2 Q eta."""
    qmat = np.atleast_2d(np.asarray(qmat, dtype=float))
    eta = np.asarray(eta, dtype=float)
    if qmat.shape == (1, 1):
        return 2.0 * qmat[0, 0] * eta
    return 2.0 * np.einsum("ij,...j->...i", qmat, eta)


def rho_symbol(alpha, theta, qmat=1.0):
    """Characteristic speed rho(alpha, theta) = sqrt(|theta|^2 + alpha
    q(theta)^{2/3}).

    Homogeneous of degree 1 under (alpha, theta) -> (s^{2/3} alpha,
    s theta); the time frequency of a gallery mode at tangential
    frequency theta/h is rho(h^{2/3} w_k, theta) / h.
    """
    theta = np.asarray(theta, dtype=float)
    qv = q_eval(qmat, theta)
    tn2 = theta ** 2 if theta.ndim == 0 or np.atleast_2d(np.asarray(qmat)).shape == (1, 1) \
        else np.sum(theta ** 2, axis=-1)
    val = tn2 + np.asarray(alpha) * qv ** (2.0 / 3.0)
    if np.any(val < 0):
        raise ValueError("rho argument outside the hyperbolic region")
    return np.sqrt(val)


def lambda_k(eta, omega, qmat=1.0):
    """Gallery-mode eigenvalue |eta|^2 + w q(eta)^{2/3}."""
    eta = np.asarray(eta, dtype=float)
    qv = q_eval(qmat, eta)
    en2 = eta ** 2 if eta.ndim == 0 or np.atleast_2d(np.asarray(qmat)).shape == (1, 1) \
        else np.sum(eta ** 2, axis=-1)
    return en2 + np.asarray(omega) * qv ** (2.0 / 3.0)


def mode_eval(x, eta, k: int, table: AiryZeroTable, qmat=1.0):
    """L2-normalized gallery eigenfunction on the half-line.

    e_k(x, eta) = q(eta)^{1/6} Ai(q(eta)^{1/3} x - w_k) / |Ai'(-w_k)|

    satisfies -e'' + x q(eta) e = w_k q(eta)^{2/3} e with Dirichlet at
    x = 0, and the family over k is orthonormal in L2(0, inf); the
    normalizer |Ai'(-w_k)| equals sqrt(L'(w_k) / (2 pi)).
    """
    if not 1 <= k <= table.kmax:
        raise ValueError("mode index outside the zero table")
    om = table.omegas[k - 1]
    norm = np.sqrt(table.lprimes[k - 1] / (2.0 * np.pi))
    qv = q_eval(qmat, np.asarray(eta, dtype=float))
    return qv ** (1.0 / 6.0) * ai(qv ** (1.0 / 3.0) * np.asarray(x) - om) / norm


def mode_norm_check(table: AiryZeroTable, k: int, j: int, eta=1.0, qmat=1.0,
                    x_max: float | None = None, n: int = 30001) -> float:
    """Inner product <e_k, e_j> by direct fine quadrature on [0, x_max]."""
    om = max(table.omegas[k - 1], table.omegas[j - 1])
    qv = float(q_eval(qmat, eta))
    if x_max is None:
        x_max = (om + 40.0) / qv ** (1.0 / 3.0)
    x = np.linspace(0.0, x_max, n)
    fk = mode_eval(x, eta, k, table, qmat)
    fj = mode_eval(x, eta, j, table, qmat)
    return float(np.trapezoid(fk * fj, x))


def bump(s):
    """C-infinity bump, exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si ** 2))
    return out


_STEP_GRID = np.linspace(-1.0, 1.0, 2001)
_STEP_CDF = np.concatenate([[0.0], np.cumsum(
    0.5 * (bump(_STEP_GRID[1:]) + bump(_STEP_GRID[:-1])) * np.diff(_STEP_GRID))])
_STEP_CDF /= _STEP_CDF[-1]


def smooth_step(s):
    """C-infinity monotone step: 0 for s <= -1, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    return np.interp(s, _STEP_GRID, _STEP_CDF)


def window(theta, params: WaveParams):
    """Annular frequency window psi(|theta|), a bump of half-width
    `window_delta` centered at |theta| = 1 with peak value 1."""
    theta = np.asarray(theta, dtype=float)
    if params.d == 2 or theta.ndim == 0:
        r = np.abs(theta)
    else:
        r = np.sqrt(np.sum(theta ** 2, axis=-1))
    return bump((r - 1.0) / params.window_delta)


def glancing_cutoff(alpha, params: WaveParams):
    """Smooth cutoff in the scaled normal frequency alpha = h^{2/3} w:
    identically 1 for alpha <= alpha_lo, identically 0 for
    alpha >= alpha_hi."""
    alpha = np.asarray(alpha, dtype=float)
    s = (params.alpha_hi + params.alpha_lo - 2.0 * alpha) / (params.alpha_hi - params.alpha_lo)
    return smooth_step(s)


def zero_table_for(params: WaveParams, extra: int = 0) -> AiryZeroTable:
    """Zero table large enough to cover every mode the cutoff admits."""
    return airy_zeros(params.kmax() + extra)
