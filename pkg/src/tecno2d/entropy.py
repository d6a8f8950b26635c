"""Flux specifications and entropy pairs.

A flux spec bundles the two flux components f = (f_x, f_y) with their
derivatives and primitives Psi (Psi' = f, normalized to Psi(0) = 0); the
primitives drive the entropy-conservative two-point flux.  An entropy pair
bundles a convex entropy eta with its compatible entropy flux q (q' = eta' f')
and the entropy potential psi = eta'(u) f(u) - q(u).

Two families are provided: the square entropy u^2/2, with respect to which
the scheme is provably dissipative, and a smoothed family of kink entropies
sqrt((u-k)^2 + delta^2) - delta used only by the residual diagnostics.
Entropy fluxes have closed forms whenever the flux derivative is (affine)
polynomial -- which covers the registered fluxes -- and fall back to adaptive
quadrature otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridFunction

RealFn = Callable[[np.ndarray], np.ndarray]

_QUAD_ABS_TOL = 1e-13


@dataclass(frozen=True)
class FluxSpec:
    """Flux components, derivatives and primitives for one conservation law.

    df_poly_* optionally stores the coefficients (c0, c1) of an affine flux
    derivative df(u) = c0 + c1*u; when present, entropy fluxes are built in
    closed form instead of by quadrature.
    """

    name: str
    f_x: RealFn
    f_y: RealFn
    df_x: RealFn
    df_y: RealFn
    Fprim_x: RealFn
    Fprim_y: RealFn
    df_poly_x: tuple[float, float] | None = None
    df_poly_y: tuple[float, float] | None = None

    def f(self, axis: str) -> RealFn:
        return self.f_x if axis == "x" else self.f_y

    def df(self, axis: str) -> RealFn:
        return self.df_x if axis == "x" else self.df_y

    def Fprim(self, axis: str) -> RealFn:
        return self.Fprim_x if axis == "x" else self.Fprim_y

    def df_poly(self, axis: str) -> tuple[float, float] | None:
        return self.df_poly_x if axis == "x" else self.df_poly_y


@dataclass(frozen=True)
class EntropyPair:
    """Convex entropy eta with entropy flux q and potential psi per axis.

    fields_fn optionally evaluates (v, psi_x, psi_y) on a whole array in one
    pass, sharing intermediates; the residual diagnostics call it every
    stage, so pairs built from closed forms provide one.
    """

    name: str
    eta: RealFn
    deta: RealFn
    ddeta: RealFn
    q_x: RealFn
    q_y: RealFn
    psi_x: RealFn
    psi_y: RealFn
    fields_fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]] | None = None

    def q(self, axis: str) -> RealFn:
        return self.q_x if axis == "x" else self.q_y

    def psi(self, axis: str) -> RealFn:
        return self.psi_x if axis == "x" else self.psi_y

    def interface_fields(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Entropy variable and both potential components of an array."""
        if self.fields_fn is not None:
            return self.fields_fn(values)
        return (
            np.asarray(self.deta(values), dtype=float),
            np.asarray(self.psi_x(values), dtype=float),
            np.asarray(self.psi_y(values), dtype=float),
        )


def burgers_flux() -> FluxSpec:
    """f = u^2/2 in both directions."""
    half_sq = lambda u: 0.5 * np.asarray(u, dtype=float) ** 2
    ident = lambda u: np.asarray(u, dtype=float)
    cube6 = lambda u: np.asarray(u, dtype=float) ** 3 / 6.0
    return FluxSpec(
        name="burgers",
        f_x=half_sq, f_y=half_sq,
        df_x=ident, df_y=ident,
        Fprim_x=cube6, Fprim_y=cube6,
        df_poly_x=(0.0, 1.0), df_poly_y=(0.0, 1.0),
    )


def linear_flux(a: float, b: float) -> FluxSpec:
    """Constant-velocity transport, f = (a*u, b*u)."""
    a = float(a)
    b = float(b)
    return FluxSpec(
        name=f"linear({a:g},{b:g})",
        f_x=lambda u: a * np.asarray(u, dtype=float),
        f_y=lambda u: b * np.asarray(u, dtype=float),
        df_x=lambda u: np.full_like(np.asarray(u, dtype=float), a),
        df_y=lambda u: np.full_like(np.asarray(u, dtype=float), b),
        Fprim_x=lambda u: 0.5 * a * np.asarray(u, dtype=float) ** 2,
        Fprim_y=lambda u: 0.5 * b * np.asarray(u, dtype=float) ** 2,
        df_poly_x=(a, 0.0),
        df_poly_y=(b, 0.0),
    )


_LINEAR_RE = re.compile(r"^linear\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$")


def make_flux(name: str) -> FluxSpec:
    """Look up a flux by registry key: 'burgers' or 'linear(a,b)'."""
    key = name.strip()
    if key == "burgers":
        return burgers_flux()
    m = _LINEAR_RE.match(key)
    if m:
        try:
            return linear_flux(float(m.group(1)), float(m.group(2)))
        except ValueError as exc:
            raise ValueError(f"bad linear flux parameters in {name!r}") from exc
    raise ValueError(f"unknown flux {name!r}; expected 'burgers' or 'linear(a,b)'")


def _quad_integral(g: Callable[[float], float], lo: float) -> RealFn:
    """Antiderivative of g starting at lo, by adaptive quadrature, vectorized."""
    from scipy.integrate import quad

    def single(u: float) -> float:
        val, _ = quad(g, lo, u, epsabs=_QUAD_ABS_TOL, epsrel=1e-12, limit=200)
        return val

    vectorized = np.vectorize(single, otypes=[np.float64])

    def evaluate(u):
        out = vectorized(u)
        return out if np.ndim(u) else float(out)

    return evaluate


def square_entropy_pair(flux: FluxSpec) -> EntropyPair:
    """The pair eta = u^2/2, v = u; q = int_0^u s f'(s) ds, psi = u f - q.

    For this entropy the potential psi coincides with the flux primitive up
    to the Psi(0) = 0 normalization, since psi' = f.
    """

    def component(axis: str) -> tuple[RealFn, RealFn]:
        poly = flux.df_poly(axis)
        f = flux.f(axis)
        if poly is not None:
            c0, c1 = poly

            def q(u, c0=c0, c1=c1):
                u = np.asarray(u, dtype=float)
                return 0.5 * c0 * u**2 + c1 * u**3 / 3.0

        else:
            df = flux.df(axis)
            q = _quad_integral(lambda s: s * df(s), 0.0)

        def psi(u, f=f, q=q):
            u = np.asarray(u, dtype=float)
            return u * f(u) - q(u)

        return q, psi

    q_x, psi_x = component("x")
    q_y, psi_y = component("y")

    def fields(values):
        values = np.asarray(values, dtype=float)
        return values, psi_x(values), psi_y(values)

    return EntropyPair(
        name="square",
        eta=lambda u: 0.5 * np.asarray(u, dtype=float) ** 2,
        deta=lambda u: np.asarray(u, dtype=float),
        ddeta=lambda u: np.ones_like(np.asarray(u, dtype=float)),
        q_x=q_x, q_y=q_y, psi_x=psi_x, psi_y=psi_y,
        fields_fn=fields,
    )


def smoothed_kruzkov_pair(flux: FluxSpec, k: float, delta: float) -> EntropyPair:
    """Smooth convex approximation of the kink entropy |u - k|.

    eta(u) = sqrt((u-k)^2 + delta^2) - delta tends to |u-k| as delta -> 0
    and has bounded first and second derivatives for fixed delta, which is
    what the residual diagnostics require.  The entropy flux integrates
    eta'(s) f'(s) from k; for affine-derivative fluxes this has a closed
    form in terms of sqrt and arcsinh.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    k = float(k)
    delta = float(delta)

    def eta(u):
        w = np.asarray(u, dtype=float) - k
        return np.hypot(w, delta) - delta

    def deta(u):
        w = np.asarray(u, dtype=float) - k
        return w / np.hypot(w, delta)

    def ddeta(u):
        w = np.asarray(u, dtype=float) - k
        return delta**2 / np.hypot(w, delta) ** 3

    def component(axis: str) -> tuple[RealFn, RealFn]:
        poly = flux.df_poly(axis)
        f = flux.f(axis)
        if poly is not None:
            c0, c1 = poly

            def q(u, c0=c0, c1=c1):
                # int_k^u eta'(s) (c0 + c1 s) ds with w = s - k:
                #   (c0 + c1 k) * [r - delta] + c1 * [w r - delta^2 asinh(w/delta)]/2
                w = np.asarray(u, dtype=float) - k
                r = np.hypot(w, delta)
                i1 = r - delta
                i2 = 0.5 * (w * r - delta**2 * np.arcsinh(w / delta))
                return (c0 + c1 * k) * i1 + c1 * i2

        else:
            df = flux.df(axis)

            def integrand(s, df=df):
                w = s - k
                return w / np.hypot(w, delta) * df(s)

            q = _quad_integral(integrand, k)

        def psi(u, f=f, q=q):
            return deta(u) * f(u) - q(u)

        return q, psi

    q_x, psi_x = component("x")
    q_y, psi_y = component("y")

    fields = None
    if flux.df_poly_x is not None and flux.df_poly_y is not None:
        # one hypot/arcsinh pass shared across v and both potentials
        def fields(values):
            values = np.asarray(values, dtype=float)
            w = values - k
            r = np.hypot(w, delta)
            v = w / r
            i1 = r - delta
            i2 = 0.5 * (w * r - delta**2 * np.arcsinh(w / delta))
            out = []
            for axis in ("x", "y"):
                c0, c1 = flux.df_poly(axis)
                q_vals = (c0 + c1 * k) * i1 + c1 * i2
                out.append(v * flux.f(axis)(values) - q_vals)
            return v, out[0], out[1]

    return EntropyPair(
        name=f"kruzkov(k={k:g},delta={delta:g})",
        eta=eta, deta=deta, ddeta=ddeta,
        q_x=q_x, q_y=q_y, psi_x=psi_x, psi_y=psi_y,
        fields_fn=fields,
    )


def entropy_variable(pair: EntropyPair, w: GridFunction) -> GridFunction:
    """Pointwise map of a field through v = eta'."""
    return GridFunction(w.grid, pair.deta(w.values), w.time)
