"""Benchmark problems with trusted exact-solution oracles.

Each entry fixes a flux, a domain with boundary policy, initial data, and --
where one is known -- a pointwise exact solution used by the convergence
studies.  The oracles are constructed, not fitted: translation for constant
transport, a characteristics fixed-point solve for smooth Burgers data
before the first crossing time, and the self-similar shock/rarefaction
solution for Riemann data (constant in y, so the y-flux contributes nothing
and the 1D solution extends verbatim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .entropy import FluxSpec, burgers_flux, linear_flux
from .grid import Boundary

# First characteristic crossing for 0.5 + 0.4 sin(2 pi (x+y)) under Burgers
# transport along (1,1) is at t = 1/(1.6 pi) ~ 0.1989; the fixed-point oracle
# refuses anything later than this with a safety margin.
_BURGERS_SMOOTH_T_MAX = 0.19


@dataclass(frozen=True)
class ProblemSpec:
    """A runnable setup: flux, domain, data, and optional exact solution."""

    name: str
    flux: FluxSpec
    boundary: Boundary
    x0: float
    x1: float
    y0: float
    y1: float
    u0: Callable
    oracle: Callable | None
    linf_bound: float
    description: str = ""


def _advect_u0(x, y):
    return np.sin(2.0 * np.pi * np.asarray(x)) * np.sin(2.0 * np.pi * np.asarray(y))


def _advect_oracle(x, y, t):
    return _advect_u0(np.asarray(x) - t, np.asarray(y) - t)


def _burgers_smooth_u0(x, y):
    return 0.5 + 0.4 * np.sin(2.0 * np.pi * (np.asarray(x) + np.asarray(y)))


def _burgers_smooth_oracle(x, y, t):
    """Solve u = g(s - 2 u t), s = x + y, by Newton iteration.

    The map is a contraction up to the crossing time; close to it the
    Jacobian 1 + 2 t g' stays positive, so Newton converges from the g(s)
    initial guess.
    """
    t = float(t)
    s = np.asarray(x, dtype=float) + np.asarray(y, dtype=float)
    if t == 0.0:
        return 0.5 + 0.4 * np.sin(2.0 * np.pi * s)
    if not 0.0 < t < _BURGERS_SMOOTH_T_MAX:
        raise ValueError(
            f"characteristics oracle is valid for 0 <= t < {_BURGERS_SMOOTH_T_MAX}, got {t}"
        )
    u = 0.5 + 0.4 * np.sin(2.0 * np.pi * s)
    for _ in range(100):
        arg = 2.0 * np.pi * (s - 2.0 * u * t)
        g = 0.5 + 0.4 * np.sin(arg)
        gp = 0.8 * np.pi * np.cos(arg)
        delta = (u - g) / (1.0 + 2.0 * t * gp)
        u = u - delta
        if float(np.max(np.abs(delta))) < 1e-14:
            break
    else:
        raise RuntimeError("characteristics solve did not converge")
    return u


def _riemann_profile(uL: float, uR: float, xi, t: float):
    """Self-similar entropy solution of 1D Burgers Riemann data at xi = x - 0.5."""
    xi = np.asarray(xi, dtype=float)
    if t == 0.0:
        return np.where(xi < 0.0, uL, uR)
    if uL > uR:
        shock = 0.5 * (uL + uR) * t
        return np.where(xi < shock, uL, uR)
    return np.clip(xi / t, uL, uR)


def burgers_riemann_x(uL: float, uR: float, name: str | None = None) -> ProblemSpec:
    """Planar Riemann data in x for Burgers flux in both directions.

    The data is constant in y, so the exact solution is the 1D entropy
    solution (shock of speed (uL+uR)/2 for uL > uR, else a rarefaction fan)
    extended constantly in y.
    """
    uL = float(uL)
    uR = float(uR)

    def u0(x, y):
        return np.where(np.asarray(x, dtype=float) < 0.5, uL, uR) + 0.0 * np.asarray(y)

    def oracle(x, y, t):
        out = _riemann_profile(uL, uR, np.asarray(x, dtype=float) - 0.5, float(t))
        return out + 0.0 * np.asarray(y)

    wave = "shock" if uL > uR else "rarefaction"
    return ProblemSpec(
        name=name or "burgers-riemann-x",
        flux=burgers_flux(),
        boundary=Boundary.OUTFLOW,
        x0=0.0, x1=1.0, y0=0.0, y1=1.0,
        u0=u0,
        oracle=oracle,
        linf_bound=1.2 * max(abs(uL), abs(uR), 1e-6),
        description=f"planar Riemann data uL={uL:g}, uR={uR:g} ({wave}), outflow box",
    )


def registry() -> list[ProblemSpec]:
    """All registered problems, in a stable order."""
    return [
        ProblemSpec(
            name="advect-smooth",
            flux=linear_flux(1.0, 1.0),
            boundary=Boundary.PERIODIC,
            x0=0.0, x1=1.0, y0=0.0, y1=1.0,
            u0=_advect_u0,
            oracle=_advect_oracle,
            linf_bound=1.2,
            description="constant transport of sin(2 pi x) sin(2 pi y), periodic unit box",
        ),
        ProblemSpec(
            name="burgers-smooth",
            flux=burgers_flux(),
            boundary=Boundary.PERIODIC,
            x0=0.0, x1=1.0, y0=0.0, y1=1.0,
            u0=_burgers_smooth_u0,
            oracle=_burgers_smooth_oracle,
            linf_bound=1.1,
            description="smooth Burgers data 0.5 + 0.4 sin(2 pi (x+y)); oracle valid pre-shock",
        ),
        burgers_riemann_x(1.0, 0.0),
        burgers_riemann_x(-1.0, 1.0, name="burgers-riemann-x-rarefaction"),
    ]


def get_problem(name: str) -> ProblemSpec:
    for problem in registry():
        if problem.name == name:
            return problem
    known = ", ".join(p.name for p in registry())
    raise ValueError(f"unknown problem {name!r}; registered: {known}")
