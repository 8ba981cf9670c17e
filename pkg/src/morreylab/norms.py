"""Discrete Morrey, uniform-Lebesgue, and measure-norm estimators.

The sup over ball centers and radii is discretized by a geometric
radius ladder and strided centers, so every estimator here is a lower
bound of the true sup.  Ball integrals for all centers at once are
circular convolutions with a ball indicator, done with FFTs; the torus
wrap distance is used throughout so semigroup output can be normed
directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grids import AtomicMeasure, GridFunction, wrap_offsets

__all__ = [
    "RadiusLadder",
    "lp_ball_norm",
    "morrey_norm",
    "uniform_norm",
    "MeasureNorm",
    "measure_morrey_norm",
    "translation_modulus",
    "HolderCheck",
    "holder_product_check",
]

_BALL_FFT_CACHE: dict = {}
_CACHE_LIMIT = 256


@dataclass(frozen=True)
class RadiusLadder:
    """Geometric radius sequence R_min..R_max plus a center stride.

    R = 1 is spliced in when it falls inside the range so that the
    embedding into the uniform space is exact at the estimator level.
    """

    radii: tuple
    stride: int

    @classmethod
    def for_grid(cls, g: GridFunction, ratio: float = math.sqrt(2.0), stride: int = 4,
                 r_min: float | None = None, r_max: float | None = None) -> "RadiusLadder":
        r_min = 2.0 * g.h if r_min is None else r_min
        r_max = g.L if r_max is None else r_max
        if r_min < 2.0 * g.h - 1e-12:
            raise ValueError("R_min below 2h is under-resolved")
        if r_max > g.L + 1e-12:
            raise ValueError("R_max beyond the box half-width")
        if ratio <= 1.0:
            raise ValueError("ladder ratio must exceed 1")
        radii = [r_min]
        while radii[-1] * ratio < r_max * (1.0 - 1e-12):
            radii.append(radii[-1] * ratio)
        if radii[-1] < r_max:
            radii.append(r_max)
        if r_min <= 1.0 <= r_max and not any(abs(r - 1.0) < 1e-12 for r in radii):
            radii.append(1.0)
        return cls(tuple(sorted(radii)), int(stride))


def _ball_mask(g: GridFunction, radius: float) -> np.ndarray:
    """Indicator of the wrap-distance ball of the given radius around the origin."""
    return g.radii() <= radius + 1e-12 * max(1.0, radius)


def _ball_indicator_fft(g: GridFunction, radius: float) -> np.ndarray:
    key = (g.N, g.n, round(g.L, 12), round(radius, 12))
    hit = _BALL_FFT_CACHE.get(key)
    if hit is not None:
        return hit
    mask = _ball_mask(g, radius).astype(float)
    # convolving with an origin-centered symmetric indicator needs the
    # kernel indexed by offsets, i.e. rolled so offset 0 is at index 0
    kernel = np.roll(mask, (-(g.n // 2),) * g.N, axis=tuple(range(g.N)))
    out = np.fft.rfftn(kernel)
    if len(_BALL_FFT_CACHE) >= _CACHE_LIMIT:
        _BALL_FFT_CACHE.clear()
    _BALL_FFT_CACHE[key] = out
    return out


def _ball_sums(g: GridFunction, weights: np.ndarray, radius: float) -> np.ndarray:
    """Circular convolution: sum of `weights` over the ball around every center."""
    axes = tuple(range(weights.ndim))
    conv = np.fft.irfftn(np.fft.rfftn(weights) * _ball_indicator_fft(g, radius),
                         s=weights.shape, axes=axes)
    return np.maximum(conv, 0.0)


def _center_index(g: GridFunction, x0) -> tuple:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.size != g.N:
        raise ValueError(f"center has dimension {x0.size}, expected {g.N}")
    idx = np.round((wrap_offsets(x0, g.L) + g.L) / g.h).astype(int) % g.n
    return tuple(int(i) for i in idx)


def lp_ball_norm(phi: GridFunction, x0, R: float, p: float) -> float:
    """Riemann-sum L^p norm of phi over the wrap-distance ball B(x0, R)."""
    if R < 2.0 * phi.h - 1e-12:
        raise ValueError(f"ball radius {R} under-resolved (need >= 2h = {2 * phi.h:g})")
    if R > phi.L + 1e-12:
        raise ValueError("ball radius exceeds the box half-width")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    # the mask is centered at the origin sample (index n/2 per axis)
    shift = tuple(i - phi.n // 2 for i in _center_index(phi, x0))
    offsets = np.roll(_ball_mask(phi, R), shift, axis=tuple(range(phi.N)))
    vals = np.abs(phi.values)[offsets]
    if p == math.inf:
        return float(vals.max(initial=0.0))
    return float(np.sum(vals**p) * phi.h**phi.N) ** (1.0 / p)


def _scan(phi: GridFunction, p: float, ell: float, ladder: RadiusLadder) -> float:
    """max over ladder radii and strided centers of R^{(ell-N)/p} * ball norm."""
    w = np.abs(phi.values) ** p * phi.h**phi.N
    stride_sl = (slice(None, None, ladder.stride),) * phi.N
    best = 0.0
    for R in ladder.radii:
        sums = _ball_sums(phi, w, R)[stride_sl]
        val = float(np.max(sums)) ** (1.0 / p) * R ** ((ell - phi.N) / p)
        best = max(best, val)
    return best


def morrey_norm(phi: GridFunction, p: float, ell: float, ladder: RadiusLadder | None = None) -> float:
    """Discrete Morrey norm sup_{x0,R} R^{(ell-N)/p} ||phi||_{L^p(B(x0,R))}.

    p = inf short-circuits to the plain sup norm (all M^{inf,ell} collapse
    to L^inf).
    """
    if p == math.inf:
        return float(np.max(np.abs(phi.values)))
    if not (0.0 < ell <= phi.N + 1e-12):
        raise ValueError(f"ell={ell} outside (0, N]")
    if ladder is None:
        ladder = RadiusLadder.for_grid(phi)
    return _scan(phi, p, ell, ladder)


def uniform_norm(phi: GridFunction, p: float, stride: int = 4) -> float:
    """Locally-uniform norm: max over centers of the unit-ball L^p norm."""
    if phi.L < 1.0:
        raise ValueError("uniform norm needs a box with L >= 1")
    if p == math.inf:
        return float(np.max(np.abs(phi.values)))
    w = np.abs(phi.values) ** p * phi.h**phi.N
    sums = _ball_sums(phi, w, 1.0)[(slice(None, None, stride),) * phi.N]
    return float(np.max(sums)) ** (1.0 / p)


class MeasureNorm(NamedTuple):
    value: float
    diverging: bool


def measure_morrey_norm(mu: AtomicMeasure, ell: float, g: GridFunction,
                        ladder: RadiusLadder | None = None) -> MeasureNorm:
    """max over the ladder of R^{ell-N} |mu|(B(x0, R)) for an atomic measure.

    Centers run over atom locations and strided grid points.  For
    ell < N a point mass makes the sup diverge as R_min shrinks; the
    value at R_min is then reported with the diverging flag set.
    """
    if not (0.0 < ell <= mu.N + 1e-12):
        raise ValueError(f"ell={ell} outside (0, N]")
    if not mu.atoms:
        return MeasureNorm(0.0, False)
    if ladder is None:
        ladder = RadiusLadder.for_grid(g)
    locs = mu.locations()
    w = np.abs(mu.weights())
    ax = g.axis()[:: ladder.stride]
    if mu.N == 1:
        centers = ax[:, None]
    else:
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        centers = np.stack([X.ravel(), Y.ravel()], axis=-1)
    centers = np.concatenate([centers, locs], axis=0)
    d = wrap_offsets(centers[:, None, :] - locs[None, :, :], g.L)
    dist = np.abs(d[..., 0]) if mu.N == 1 else np.sqrt(np.sum(d * d, axis=-1))
    best, best_r = 0.0, None
    for R in ladder.radii:
        masses = (dist <= R + 1e-12) @ w
        val = float(masses.max()) * R ** (ell - mu.N)
        if val > best:
            best, best_r = val, R
    diverging = best_r is not None and best_r == ladder.radii[0] and ell < mu.N - 1e-12 and best > 0.0
    return MeasureNorm(best, diverging)


def translation_modulus(phi: GridFunction, p: float, ell: float, y,
                        ladder: RadiusLadder | None = None) -> float:
    """Morrey norm of tau_y(phi) - phi for a grid shift y (multiple of h)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    cells = y / phi.h
    if np.max(np.abs(cells - np.round(cells))) > 1e-9:
        raise ValueError("translation must be a whole number of grid cells")
    shifted = phi.shifted(tuple(int(c) for c in np.round(cells)))
    return morrey_norm(shifted - phi, p, ell, ladder)


class HolderCheck(NamedTuple):
    lhs: float
    rhs: float
    z: float
    nu: float
    passed: bool


def holder_product_check(f: GridFunction, g: GridFunction, w: float, kappa: float,
                         p0: float, ell0: float, tol: float = 0.05,
                         ladder: RadiusLadder | None = None) -> HolderCheck:
    """Product inequality ||f g||_{M^{z,nu}} <= ||f||_{M^{w,kappa}} ||g||_{M^{p0,ell0}}
    with 1/z = 1/w + 1/p0 and nu/z = kappa/w + ell0/p0.

    Requires w >= p0' so that z >= 1.  `passed` allows a discretization
    slack of `tol` on the right-hand side.
    """
    inv_w = 0.0 if w == math.inf else 1.0 / w
    inv_p0 = 0.0 if p0 == math.inf else 1.0 / p0
    inv_z = inv_w + inv_p0
    if inv_z > 1.0 + 1e-12:
        raise ValueError(f"w={w} below the conjugate exponent of p0={p0}: no product space")
    z = math.inf if inv_z == 0.0 else 1.0 / inv_z
    nu_over_z = kappa * inv_w + ell0 * inv_p0
    nu = 0.0 if z == math.inf else nu_over_z * z
    prod = f * g
    lhs = morrey_norm(prod, z, nu if nu > 0 else float(f.N), ladder) if z != math.inf \
        else float(np.max(np.abs(prod.values)))
    rhs = morrey_norm(f, w, kappa, ladder) * morrey_norm(g, p0, ell0, ladder)
    return HolderCheck(lhs, rhs, z, nu, lhs <= rhs * (1.0 + tol))
