"""Radial grids, singular-weight quadrature, test functions and quadratic forms.

Grids hold interior nodes of a truncated interval (r_min, r_max); the
quadrature weights are trapezoid weights with a linear end-closure (virtual
endpoint values by two-point extrapolation, folded into the first and last
two weights), which is exact for linear integrands and keeps every weight
positive.  Test functions used in inequality checks must be compactly
supported strictly inside the truncation, mirroring the smooth compactly
supported test class of the continuous statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ArgumentError,
    CapabilityError,
    EvaluationError,
    SupportError,
)
from .manifolds import ModelManifold

GRADINGS = ("uniform", "log_graded", "geometric")


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray
    quad_weights: np.ndarray
    r_min: float
    r_max: float
    grading: str
    r_c: float | None = None

    @property
    def M(self) -> int:
        return self.nodes.size

    def refined(self, M: int) -> "RadialGrid":
        return make_grid(self.r_min, self.r_max, M, self.grading, self.r_c)


def _closure_weights(nodes: np.ndarray, a: float, b: float) -> np.ndarray:
    """Trapezoid weights over [a, b] on interior nodes, linear end-closure.

    The boundary cells [a, nodes[0]] and [nodes[-1], b] are closed with
    endpoint values linearly extrapolated from the two nearest nodes
    (exact for linear integrands); tiny grids fall back to constant
    extrapolation to keep every weight positive.
    """
    w = np.zeros_like(nodes)
    gaps = np.diff(nodes)
    w[:-1] += gaps / 2.0
    w[1:] += gaps / 2.0
    d0 = nodes[0] - a
    d1 = b - nodes[-1]
    h0 = nodes[1] - nodes[0]
    h1 = nodes[-1] - nodes[-2]
    # linear extrapolation is used only when the boundary cell is no wider
    # than the sampling gap (always true on uniform grids); otherwise the
    # correction could turn the neighbour weight negative
    if nodes.size >= 5 and d0 <= h0 * (1.0 + 1e-12):
        w[0] += d0 + d0 * d0 / (2.0 * h0)
        w[1] -= d0 * d0 / (2.0 * h0)
    else:
        w[0] += d0
    if nodes.size >= 5 and d1 <= h1 * (1.0 + 1e-12):
        w[-1] += d1 + d1 * d1 / (2.0 * h1)
        w[-2] -= d1 * d1 / (2.0 * h1)
    else:
        w[-1] += d1
    if np.any(w <= 0.0):
        raise ArgumentError("grid produced nonpositive quadrature weights")
    return w


def make_grid(
    r_min: float,
    r_max: float,
    M: int,
    grading: str = "uniform",
    r_c: float | None = None,
) -> RadialGrid:
    """Interior grid of M nodes on (r_min, r_max).

    uniform     equispaced
    geometric   constant ratio between consecutive nodes
    log_graded  half the nodes geometric in (r_min, r_c), half uniform
                on [r_c, r_max); default split r_c = 1
    """
    if not (0.0 < r_min < r_max):
        raise ArgumentError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    if M < 3:
        raise ArgumentError(f"grid needs at least 3 nodes, got {M}")
    if grading not in GRADINGS:
        raise ArgumentError(f"unknown grading {grading!r}")

    if grading == "uniform":
        nodes = np.linspace(r_min, r_max, M + 2)[1:-1]
    elif grading == "geometric":
        q = (r_max / r_min) ** (1.0 / (M + 1))
        nodes = r_min * q ** np.arange(1, M + 1)
    else:
        r_c = 1.0 if r_c is None else float(r_c)
        if not (r_min < r_c < r_max):
            raise ArgumentError("log_graded needs r_min < r_c < r_max")
        m_geo = M // 2
        m_uni = M - m_geo
        q = (r_c / r_min) ** (1.0 / (m_geo + 1))
        lower = r_min * q ** np.arange(1, m_geo + 1)
        upper = r_c + (r_max - r_c) / m_uni * np.arange(m_uni)
        nodes = np.concatenate([lower, upper])

    weights = _closure_weights(nodes, r_min, r_max)
    return RadialGrid(nodes, weights, float(r_min), float(r_max), grading, r_c)


# ---------------------------------------------------------------------------
# radial functions


@dataclass(frozen=True)
class RadialFunction:
    """Scalar function of r with optional first and second derivatives.

    Closed-form instances are evaluable anywhere in their support; sampled
    instances only at the nodes of the grid they were sampled on.
    """

    value: Callable
    d1: Callable | None = None
    d2: Callable | None = None
    support: tuple[float, float] = (0.0, np.inf)
    label: str = ""
    kind: str = "closed_form"

    def __call__(self, r):
        return self.value(r)

    @staticmethod
    def from_samples(grid: RadialGrid, values: np.ndarray, label: str = "") -> "RadialFunction":
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise ArgumentError("sample array must match the grid nodes")
        nodes = grid.nodes

        def _at_nodes(r):
            r = np.asarray(r, dtype=float)
            if r.shape != nodes.shape or not np.array_equal(r, nodes):
                raise CapabilityError("sampled function is evaluable at its grid nodes only")
            return values

        d1 = np.gradient(values, nodes)
        d2 = np.gradient(d1, nodes)

        def _d1(r):
            _at_nodes(r)
            return d1

        def _d2(r):
            _at_nodes(r)
            return d2

        return RadialFunction(
            value=_at_nodes,
            d1=_d1,
            d2=_d2,
            support=(float(nodes[0]), float(nodes[-1])),
            label=label,
            kind="sampled",
        )


def _smoothstep(t):
    # quintic smoothstep: s(0)=0, s(1)=1, s'=s''=0 at both ends (C^2 glue)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d1(t):
    return 30.0 * t * t * (t - 1.0) ** 2


def _smoothstep_d2(t):
    return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0)


def bump(a: float, b: float, rise: float | None = None, fall: float | None = None,
         label: str = "") -> RadialFunction:
    """C^2 bump: quintic rise on [a, a+rise], plateau 1, quintic fall on [b-fall, b]."""
    if not (0.0 <= a < b):
        raise ArgumentError("bump needs 0 <= a < b")
    rise = (b - a) / 2.0 if rise is None else float(rise)
    fall = (b - a) / 2.0 if fall is None else float(fall)
    if rise <= 0 or fall <= 0 or rise + fall > (b - a) * (1 + 1e-12):
        raise ArgumentError("bump widths must be positive and fit inside [a, b]")
    m1, m2 = a + rise, b - fall

    def _piece(r, up, plateau, down):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        sel = (r > a) & (r < m1)
        out[sel] = up((r[sel] - a) / rise)
        sel = (r >= m1) & (r <= m2)
        out[sel] = plateau
        sel = (r > m2) & (r < b)
        out[sel] = down((b - r[sel]) / fall)
        return out

    value = lambda r: _piece(r, _smoothstep, 1.0, _smoothstep)
    d1 = lambda r: _piece(r, lambda t: _smoothstep_d1(t) / rise, 0.0,
                          lambda t: -_smoothstep_d1(t) / fall)
    d2 = lambda r: _piece(r, lambda t: _smoothstep_d2(t) / rise**2, 0.0,
                          lambda t: _smoothstep_d2(t) / fall**2)
    return RadialFunction(value, d1, d2, support=(a, b),
                          label=label or f"bump[{a:g},{b:g}]")


def plateau_cutoff(delta: float, width: float | None = None) -> RadialFunction:
    """C^2 cutoff equal to 1 on [0, delta], falling to 0 at delta + width."""
    width = delta if width is None else float(width)
    b = delta + width

    def _sel(r, f_mid, lo_val, hi_val):
        r = np.asarray(r, dtype=float)
        out = np.full_like(r, hi_val)
        out[r <= delta] = lo_val
        sel = (r > delta) & (r < b)
        out[sel] = f_mid((b - r[sel]) / width)
        return out

    value = lambda r: _sel(r, _smoothstep, 1.0, 0.0)
    d1 = lambda r: _sel(r, lambda t: -_smoothstep_d1(t) / width, 0.0, 0.0)
    d2 = lambda r: _sel(r, lambda t: _smoothstep_d2(t) / width**2, 0.0, 0.0)
    return RadialFunction(value, d1, d2, support=(0.0, b), label=f"cutoff[{delta:g}]")


def seeded_bumps(seed: int, count: int, lo: float, hi: float,
                 min_width: float = 0.3) -> list[RadialFunction]:
    """Reproducible random bumps supported inside [lo, hi]; seed is recorded
    in the label so failures can be replayed."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        a = rng.uniform(lo, hi - min_width)
        b = rng.uniform(a + min_width, hi)
        frac_r = rng.uniform(0.2, 0.5)
        frac_f = rng.uniform(0.2, 0.5)
        out.append(
            bump(a, b, rise=frac_r * (b - a), fall=frac_f * (b - a),
                 label=f"bump(seed={seed},k={k})")
        )
    return out


def grid_covering(support: tuple[float, float], M: int = 4096,
                  pad: float = 0.05) -> RadialGrid:
    """Uniform grid slightly wider than a compact support (for margin checks)."""
    a, b = support
    width = b - a
    return make_grid(max(a - pad * width, a * 0.5), b + pad * width, M, "uniform")


# ---------------------------------------------------------------------------
# quadrature and quadratic forms


def _check_support_inside(u: RadialFunction, grid: RadialGrid) -> None:
    a, b = u.support
    if not (a > grid.r_min and b < grid.r_max) or not np.isfinite(b):
        raise SupportError(
            f"test function support [{a:g}, {b:g}] must lie strictly inside "
            f"({grid.r_min:g}, {grid.r_max:g})"
        )


def _finite_or_raise(vals: np.ndarray, grid: RadialGrid, what: str) -> np.ndarray:
    bad = np.nonzero(~np.isfinite(vals))[0]
    if bad.size:
        i = int(bad[0])
        raise EvaluationError(
            f"{what} is non-finite at node {i} (r = {grid.nodes[i]:.6g})"
        )
    return vals


def integrate_weighted(f, w, manifold: ModelManifold, grid: RadialGrid) -> float:
    """Quadrature of f(r) * w(r) * psi(r)^(N-1) dr over the grid.

    This is the radial reduction of the volume integral; the constant sphere
    area factor is omitted consistently from both sides of every inequality.
    """
    fv = f(grid.nodes) if callable(f) else np.asarray(f, dtype=float)
    wv = w(grid.nodes) if callable(w) else np.asarray(w, dtype=float)
    vals = fv * wv * manifold.measure_weight(grid.nodes)
    _finite_or_raise(vals, grid, "integrand")
    return float(np.dot(grid.quad_weights, vals))


def dirichlet_form(u: RadialFunction, manifold: ModelManifold, grid: RadialGrid) -> float:
    """Radial Dirichlet energy: integral of u'(r)^2 psi^(N-1) dr."""
    _check_support_inside(u, grid)
    if u.d1 is None:
        raise CapabilityError("dirichlet_form needs first-derivative data")
    du = u.d1(grid.nodes)
    vals = du * du * manifold.measure_weight(grid.nodes)
    _finite_or_raise(vals, grid, "gradient integrand")
    return float(np.dot(grid.quad_weights, vals))


def bilaplacian_form(u: RadialFunction, manifold: ModelManifold, grid: RadialGrid) -> float:
    """Integral of (Delta u)^2 psi^(N-1) dr with the radial Laplacian
    Delta u = u'' + (N-1)(psi'/psi) u'."""
    _check_support_inside(u, grid)
    if u.d1 is None or u.d2 is None:
        raise CapabilityError("bilaplacian_form needs second-derivative data")
    r = grid.nodes
    lap = u.d2(r) + (manifold.N - 1) * manifold.dpsi_over_psi(r) * u.d1(r)
    vals = lap * lap * manifold.measure_weight(r)
    _finite_or_raise(vals, grid, "bilaplacian integrand")
    return float(np.dot(grid.quad_weights, vals))


def weighted_l2(u, weight, manifold: ModelManifold, grid: RadialGrid) -> float:
    """Integral of u^2 * weight(r) * psi^(N-1) dr (margin-check helper)."""
    uv = u(grid.nodes)
    wv = weight(grid.nodes) if callable(weight) else weight
    vals = uv * uv * wv * manifold.measure_weight(grid.nodes)
    _finite_or_raise(vals, grid, "weighted L2 integrand")
    return float(np.dot(grid.quad_weights, vals))
