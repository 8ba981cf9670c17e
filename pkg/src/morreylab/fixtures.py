"""Code-generated initial-datum and potential fixtures.

Fixtures are always regenerated from formulas (never shipped as data)
so that report runs are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from .grids import GridFunction
from .potentials import PotentialSpec, constant_potential, power_law_potential

__all__ = ["initial_datum", "potential_fixture", "INITIAL_DATA"]


def dirac(N: int, n: int, L: float) -> GridFunction:
    return GridFunction.dirac(N, n, L)


def gaussian_bump(N: int, n: int, L: float, width: float = 1.0) -> GridFunction:
    g = GridFunction.constant(0.0, N, n, L)
    r = g.radii()
    return GridFunction(N, n, L, np.exp(-((r / width) ** 2)))


def half_box_indicator(N: int, n: int, L: float) -> GridFunction:
    g = GridFunction.constant(0.0, N, n, L)
    ax = g.axis()
    if N == 1:
        vals = (ax >= 0.0).astype(float)
    else:
        vals = np.broadcast_to((ax >= 0.0).astype(float)[:, None], (n, n)).copy()
    return GridFunction(N, n, L, vals)


def power_law(N: int, n: int, L: float, beta: float = 0.5, amplitude: float = 1.0,
              cap_radius: float | None = None, support_radius: float | None = None,
              mass_faithful: bool = False) -> GridFunction:
    """|x|^{-beta}, capped below cap_radius; optionally zero outside support_radius.

    The outer truncation keeps the torus wrap from leaving a flat
    background whose norms would contaminate decay-rate fits.  With
    mass_faithful (1D only) the samples inside the cap are replaced by
    exact cell averages of the continuum profile, so the discrete core
    carries the right mass; otherwise the singular mass lost to the cap
    evolves like an extra point source and flattens small-time fits.
    """
    g = GridFunction.constant(0.0, N, n, L)
    cap = 2.0 * g.h if cap_radius is None else cap_radius
    r = np.maximum(g.radii(), cap)
    vals = amplitude * r ** (-beta)
    if mass_faithful:
        if N != 1 or beta >= 1.0:
            raise ValueError("mass-faithful realization needs N = 1 and beta < 1")
        h = g.h
        core = np.where(g.radii() <= cap + 1e-12 * cap)
        x = g.axis()[core]
        lo, hi = np.abs(x) - 0.5 * h, np.abs(x) + 0.5 * h

        def anti(s):  # integral of |x|^{-beta} from 0 to s >= 0
            return s ** (1.0 - beta) / (1.0 - beta)

        straddles = lo < 0.0
        cell = np.where(straddles, anti(np.abs(lo)) + anti(hi),
                        anti(hi) - anti(np.maximum(lo, 0.0)))
        vals = vals.copy()
        vals[core] = amplitude * cell / h
    if support_radius is not None:
        vals = np.where(g.radii() <= support_radius, vals, 0.0)
    return GridFunction(N, n, L, vals)


def constant_one(N: int, n: int, L: float) -> GridFunction:
    return GridFunction.constant(1.0, N, n, L)


INITIAL_DATA = {
    "dirac": dirac,
    "gaussian_bump": gaussian_bump,
    "half_box_indicator": half_box_indicator,
    "power_law": power_law,
    "constant_one": constant_one,
}


def initial_datum(spec, N: int, n: int, L: float) -> GridFunction:
    """Build a fixture from its id string or a {'fixture': ..., params} mapping."""
    if isinstance(spec, str):
        name, params = spec, {}
    else:
        params = dict(spec)
        name = params.pop("fixture")
    try:
        maker = INITIAL_DATA[name]
    except KeyError:
        raise ValueError(f"unknown initial-datum fixture {name!r}") from None
    return maker(N, n, L, **params)


def potential_fixture(spec) -> PotentialSpec:
    """Build a potential from a config mapping."""
    params = dict(spec)
    kind = params.pop("kind")
    if kind == "power_law":
        return power_law_potential(
            amplitude=params.pop("amplitude"),
            beta=params.pop("beta"),
            p0=params.pop("p0"),
            cap_radius=params.pop("cap_radius", None),
        )
    if kind == "constant":
        return constant_potential(params.pop("value"), N=params.pop("N", 1))
    raise ValueError(f"unknown potential kind {kind!r}")
