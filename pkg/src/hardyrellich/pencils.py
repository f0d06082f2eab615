"""Discretized Rayleigh-quotient pencils and a minimal-eigenvalue solver.

A pencil (A, B) encodes numerator and denominator quadratic forms of a
radial quotient on a grid with homogeneous Dirichlet conditions at both
truncation ends.  Second-order numerators are assembled variationally from
piecewise-linear cells (A symmetric tridiagonal); fourth-order numerators
square the discrete radial Laplacian through the quadrature weights
(A symmetric pentadiagonal) and clamp the two nodes adjacent to each end.
B is always diagonal and strictly positive.

The smallest generalized eigenvalue is bracketed by Sturm-count bisection on
the congruent symmetric problem B^(-1/2) A B^(-1/2) and refined by shifted
inverse iteration.  Pentadiagonal numerators go through LAPACK's banded
bisection instead (scipy.linalg.eig_banded).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import ArgumentError, EvaluationError, NumericError
from .manifolds import ModelManifold
from .radial import RadialGrid

ORDER_LAPLACIAN = "2nd_order_laplacian"
ORDER_BILAPLACIAN = "4th_order_bilaplacian"

_PIVMIN = 1e-300


@dataclass
class ConstantEstimate:
    """A sharp-constant estimate with its truncation and refinement history.

    All pencil estimates are radial-sector values: the minimization runs over
    radial test functions only.
    """

    value: float
    r_min: float
    r_max: float
    M: int
    history: list[tuple[int, float]] = field(default_factory=list)
    label: str = ""

    def csv_row(self, name: str, N: int) -> str:
        return (
            f"{name},{N},{self.r_min:.17g},{self.r_max:.17g},{self.M},"
            f"{self.value:.17g}"
        )


@dataclass
class QuadraticPencil:
    """Banded symmetric numerator A and positive diagonal denominator B.

    ``a_bands`` is in lower banded storage: row k holds the k-th subdiagonal
    (row 0 = main diagonal).  ``rebuild`` re-assembles the same pencil on a
    grid with a different node count; it backs the refinement history of
    min_generalized_eigenvalue.
    """

    a_bands: np.ndarray
    b_diag: np.ndarray
    grid: RadialGrid
    order: str
    boundary: str = "dirichlet"
    rebuild: Callable[[int], "QuadraticPencil"] | None = None

    @property
    def size(self) -> int:
        return self.b_diag.size

    @property
    def bandwidth(self) -> int:
        return self.a_bands.shape[0] - 1


def _as_values(fn, nodes: np.ndarray) -> np.ndarray:
    if fn is None:
        return np.zeros_like(nodes)
    if callable(fn):
        return np.broadcast_to(np.asarray(fn(nodes), dtype=float), nodes.shape).copy()
    return np.full_like(nodes, float(fn))


def _stiffness(nodes, a, b, g_of):
    """Tridiagonal of the form sum over cells of (Du)^2 * avg(g) / h."""
    ext = np.concatenate(([a], nodes, [b]))
    g_ext = g_of(ext)
    h = np.diff(ext)
    g_cell = 0.5 * (g_ext[:-1] + g_ext[1:])
    cond = g_cell / h  # one entry per cell
    diag = cond[:-1] + cond[1:]
    off = -cond[1:-1]
    return diag, off


def _laplacian_rows(nodes, a, b, p_vals, q_vals):
    """Nonuniform 3-point rows of L[u] = u'' + p u' - q u at each node."""
    left = np.concatenate(([a], nodes[:-1]))
    right = np.concatenate((nodes[1:], [b]))
    hm = nodes - left
    hp = right - nodes
    hs = hm + hp
    c_m = 2.0 / (hm * hs)
    c_c = -2.0 / (hm * hp)
    c_p = 2.0 / (hp * hs)
    d_m = -hp / (hm * hs)
    d_c = (hp - hm) / (hm * hp)
    d_p = hm / (hp * hs)
    alpha = c_m + p_vals * d_m
    beta = c_c + p_vals * d_c - q_vals
    gamma = c_p + p_vals * d_p
    alpha[0] = 0.0  # u vanishes at the left truncation end
    gamma[-1] = 0.0
    return alpha, beta, gamma


def _square_rows(alpha, beta, gamma, d):
    """Pentadiagonal bands of K^T diag(d) K for tridiagonal rows K."""
    n = beta.size
    a0 = np.zeros(n)
    a1 = np.zeros(n - 1)
    a2 = np.zeros(n - 2)
    a0 += d * beta * beta
    a0[:-1] += d[1:] * alpha[1:] ** 2
    a0[1:] += d[:-1] * gamma[:-1] ** 2
    a1 += d[:-1] * beta[:-1] * gamma[:-1]
    a1 += d[1:] * alpha[1:] * beta[1:]
    a2 += d[1:-1] * alpha[1:-1] * gamma[1:-1]
    return a0, a1, a2


def assemble_custom_pencil(
    grid: RadialGrid,
    log_weight: Callable,
    drift,
    zeroth,
    V,
    W,
    order: str,
    rebuild: Callable[[int], "QuadraticPencil"] | None = None,
) -> QuadraticPencil:
    """Shared assembly with measure exp(log_weight(r)) dr.

    order 2: numerator int u'^2 g - int V u^2 g, denominator int W u^2 g.
    order 4: numerator int (u'' + drift*u' - zeroth*u)^2 g - int V u^2 g.
    The measure is rescaled by a common constant (median log) so the widest
    truncations stay far from overflow; pencil eigenvalues are unchanged.
    """
    nodes = grid.nodes
    w = grid.quad_weights
    lg = np.asarray(log_weight(nodes), dtype=float)
    shift = float(np.median(lg))

    def g_of(r):
        return np.exp(np.asarray(log_weight(r), dtype=float) - shift)

    g = g_of(nodes)
    v_vals = _as_values(V, nodes)
    w_vals = _as_values(W, nodes)
    if np.any(w_vals <= 0.0):
        i = int(np.nonzero(w_vals <= 0.0)[0][0])
        raise ArgumentError(
            f"denominator weight must be positive; W <= 0 at node {i} "
            f"(r = {nodes[i]:.6g})"
        )

    b_diag = w * g * w_vals

    if order in (ORDER_LAPLACIAN, 2, "2"):
        diag, off = _stiffness(nodes, grid.r_min, grid.r_max, g_of)
        diag = diag - w * g * v_vals
        a_bands = np.zeros((2, nodes.size))
        a_bands[0] = diag
        a_bands[1, :-1] = off
        pencil = QuadraticPencil(a_bands, b_diag, grid, ORDER_LAPLACIAN, rebuild=rebuild)
    elif order in (ORDER_BILAPLACIAN, 4, "4"):
        p_vals = _as_values(drift, nodes)
        q_vals = _as_values(zeroth, nodes)
        alpha, beta, gamma = _laplacian_rows(nodes, grid.r_min, grid.r_max, p_vals, q_vals)
        a0, a1, a2 = _square_rows(alpha, beta, gamma, w * g)
        a0 = a0 - w * g * v_vals
        # clamp the two nodes adjacent to each end (compact support)
        sl = slice(2, nodes.size - 2)
        n_red = nodes.size - 4
        if n_red < 8:
            raise ArgumentError("bilaplacian pencil needs more interior nodes")
        a_bands = np.zeros((3, n_red))
        a_bands[0] = a0[sl]
        a_bands[1, : n_red - 1] = a1[2 : nodes.size - 3]
        a_bands[2, : n_red - 2] = a2[2 : nodes.size - 4]
        pencil = QuadraticPencil(a_bands, b_diag[sl], grid, ORDER_BILAPLACIAN, rebuild=rebuild)
    else:
        raise ArgumentError(f"unknown pencil order {order!r}")

    if not (np.all(np.isfinite(pencil.a_bands)) and np.all(np.isfinite(pencil.b_diag))):
        raise EvaluationError("pencil assembly produced non-finite entries")
    return pencil


def assemble_pencil(
    manifold: ModelManifold,
    V,
    W,
    grid: RadialGrid,
    order: str = ORDER_LAPLACIAN,
) -> QuadraticPencil:
    """Pencil of the quotient [int u'^2 psi^(N-1) - int V u^2 psi^(N-1)] /
    [int W u^2 psi^(N-1)] (order 2), or the bilaplacian analogue with
    Delta u = u'' + (N-1)(psi'/psi) u' (order 4)."""

    def rebuild(m: int) -> QuadraticPencil:
        return assemble_pencil(manifold, V, W, grid.refined(m), order)

    drift = None
    if order in (ORDER_BILAPLACIAN, 4, "4"):
        drift = lambda r: (manifold.N - 1) * manifold.dpsi_over_psi(r)
    return assemble_custom_pencil(
        grid,
        log_weight=lambda r: (manifold.N - 1) * manifold.log_psi(r),
        drift=drift,
        zeroth=None,
        V=V,
        W=W,
        order=order,
        rebuild=rebuild,
    )


# ---------------------------------------------------------------------------
# eigenvalue machinery


def _to_standard(pencil: QuadraticPencil):
    """Congruence to the standard symmetric banded problem via B^(-1/2)."""
    s = 1.0 / np.sqrt(pencil.b_diag)
    bands = pencil.a_bands.copy()
    n = pencil.size
    bands[0] *= s * s
    for k in range(1, bands.shape[0]):
        bands[k, : n - k] *= s[k:] * s[: n - k]
    return bands


def _sturm_count(t: np.ndarray, o2: np.ndarray, mu: float, pivmin: float) -> int:
    """Number of eigenvalues of the tridiagonal (t, o) strictly below mu.

    pivmin is scale-aware (relative to max o^2) so the pivot division can
    never overflow.
    """
    count = 0
    d = t[0] - mu
    if d < 0.0:
        count += 1
    for i in range(1, t.size):
        if abs(d) < pivmin:
            d = -pivmin
        d = (t[i] - mu) - o2[i - 1] / d
        if d < 0.0:
            count += 1
    return count


def _smallest_tridiagonal(t, o, tol, budget):
    """Sturm bisection bracket + shifted inverse iteration refinement."""
    n = t.size
    o_abs = np.abs(o)
    rad = np.zeros(n)
    rad[:-1] += o_abs
    rad[1:] += o_abs
    lo = float(np.min(t - rad))
    hi_cap = float(np.max(t + rad))
    hi = float(np.min(t))
    o2 = o * o
    pivmin = max(_PIVMIN, float(np.max(o2)) * 1e-290) if o2.size else _PIVMIN

    used = 0
    step = max(tol * max(1.0, abs(hi)), 1e-14 * max(1.0, abs(hi)))
    while _sturm_count(t, o2, hi, pivmin) < 1:
        hi = min(hi + step, hi_cap + step)
        step *= 2.0
        used += 1
        if used > budget:
            raise NumericError(
                f"Sturm expansion failed: no eigenvalue below {hi:g}"
            )

    while (hi - lo) > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if _sturm_count(t, o2, mid, pivmin) >= 1:
            hi = mid
        else:
            lo = mid
        used += 1
        if used > budget:
            raise NumericError(
                "eigenvalue bisection exhausted its iteration budget: "
                f"bracket [{lo:.12g}, {hi:.12g}], width {hi - lo:.3g}, "
                f"iterations {used}"
            )

    # shifted inverse iteration from the upper bracket end
    sigma = hi
    ab = np.zeros((3, n))
    x = np.ones(n) / np.sqrt(n)
    rho = sigma
    for attempt in range(3):
        ab[0, 1:] = o
        ab[1] = t - sigma
        ab[2, :-1] = o
        try:
            prev = None
            for _ in range(10):
                y = scipy.linalg.solve_banded((1, 1), ab, x)
                norm = float(np.linalg.norm(y))
                if not np.isfinite(norm) or norm == 0.0:
                    raise scipy.linalg.LinAlgError("inverse iteration blew up")
                x = y / norm
                rho = float(x @ (t * x) + 2.0 * np.sum(o * x[:-1] * x[1:]))
                if prev is not None and abs(rho - prev) <= 1e-15 * max(1.0, abs(rho)):
                    break
                prev = rho
            return rho, (lo, hi)
        except (scipy.linalg.LinAlgError, ValueError):
            # shift sat exactly on the eigenvalue: nudge and retry
            sigma += max(tol, 1e-12) * max(1.0, abs(sigma)) * (attempt + 1)
    return 0.5 * (lo + hi), (lo, hi)


def smallest_eigenvalue(pencil: QuadraticPencil, tol: float = 1e-8,
                        budget: int = 200) -> float:
    """Smallest mu with A x = mu B x."""
    if tol <= 0:
        raise ArgumentError("tolerance must be positive")
    bands = _to_standard(pencil)
    if pencil.bandwidth == 1:
        value, _ = _smallest_tridiagonal(bands[0], bands[1, :-1], tol, budget)
        return value
    vals = scipy.linalg.eig_banded(
        bands, lower=True, eigvals_only=True, select="i", select_range=(0, 0)
    )
    return float(vals[0])


def min_generalized_eigenvalue(pencil: QuadraticPencil, tol: float = 1e-8,
                               label: str = "") -> ConstantEstimate:
    """Minimal eigenvalue with a refinement history.

    When the pencil carries a rebuild closure the solve is repeated at
    M/4, M/2 and M nodes so the history records three grid refinements;
    hand-built pencils get a single-entry history.
    """
    grid = pencil.grid
    history: list[tuple[int, float]] = []
    if pencil.rebuild is not None:
        sizes = sorted({max(32, grid.M // 4), max(32, grid.M // 2), grid.M})
        for m in sizes:
            p = pencil.rebuild(m) if m != grid.M else pencil
            history.append((m, smallest_eigenvalue(p, tol)))
        value = history[-1][1]
    else:
        value = smallest_eigenvalue(pencil, tol)
        history.append((grid.M, value))
    return ConstantEstimate(
        value=value,
        r_min=grid.r_min,
        r_max=grid.r_max,
        M=grid.M,
        history=history,
        label=label,
    )
