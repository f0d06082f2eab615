"""Rotationally symmetric model manifolds defined by a warping function.

A manifold here is the data (N, psi) with metric dr^2 + psi(r)^2 dw^2 on
(0, infinity) x S^{N-1}.  Everything downstream only ever needs psi, its
first two derivatives, and a handful of overflow-safe ratios, so each family
carries closed-form evaluators for all of them.  The hyperbolic family never
forms sinh r directly beyond r = 700; callers needing the volume weight at
large radius go through ``log_psi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, CapabilityError, DomainError, NumericError

# sinh overflows float64 just past this radius; log-domain paths take over.
SINH_DIRECT_LIMIT = 700.0

_POLE_SAMPLES = (1e-6, 1e-8)
_POLE_RTOL = 1e-4


def _require_positive(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radius must be positive")
    return r


@dataclass(frozen=True)
class ModelManifold:
    """Dimension N plus closed-form psi, psi', psi'' and stable ratios.

    ``dpsi_over_psi``, ``ddpsi_over_psi``, ``tan_ratio`` (= (psi'^2 - 1)/psi^2)
    and ``log_psi`` are the overflow-safe forms used by curvature, weights and
    quadrature; the raw evaluators stay available for identity checks.
    """

    N: int
    family: str
    psi: Callable
    dpsi: Callable
    ddpsi: Callable
    log_psi: Callable
    dpsi_over_psi: Callable
    ddpsi_over_psi: Callable
    tan_ratio: Callable
    a: float | None = None

    def describe(self) -> str:
        if self.family == "superexp":
            return f"superexp(a={self.a:g}, N={self.N})"
        return f"{self.family}(N={self.N})"

    def measure_weight(self, r):
        """Radial volume density psi(r)^(N-1), computed in log domain."""
        r = _require_positive(r)
        return np.exp((self.N - 1) * self.log_psi(r))


def _check_dimension(N: int, minimum: int = 3) -> int:
    if int(N) != N or N < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {N!r}")
    return int(N)


def euclidean(N: int) -> ModelManifold:
    """Flat model, psi(r) = r."""
    N = _check_dimension(N)
    return ModelManifold(
        N=N,
        family="euclidean",
        psi=lambda r: _require_positive(r) + 0.0,
        dpsi=lambda r: np.ones_like(_require_positive(r)),
        ddpsi=lambda r: np.zeros_like(_require_positive(r)),
        log_psi=lambda r: np.log(_require_positive(r)),
        dpsi_over_psi=lambda r: 1.0 / _require_positive(r),
        ddpsi_over_psi=lambda r: np.zeros_like(_require_positive(r)),
        tan_ratio=lambda r: np.zeros_like(_require_positive(r)),
    )


def _sinh_guarded(r):
    r = _require_positive(r)
    if np.max(r) > SINH_DIRECT_LIMIT:
        raise NumericError(
            f"sinh(r) would overflow for r > {SINH_DIRECT_LIMIT}; use log_psi"
        )
    return np.sinh(r)


def _log_sinh(r):
    # log(sinh r) = r + log(-expm1(-2r)) - log 2, stable for every r > 0
    r = _require_positive(r)
    return r + np.log(-np.expm1(-2.0 * r)) - math.log(2.0)


def hyperbolic(N: int) -> ModelManifold:
    """Constant curvature -1 model, psi(r) = sinh r."""
    N = _check_dimension(N)
    return ModelManifold(
        N=N,
        family="hyperbolic",
        psi=_sinh_guarded,
        dpsi=lambda r: np.cosh(_require_positive(r)),
        ddpsi=_sinh_guarded,
        log_psi=_log_sinh,
        dpsi_over_psi=lambda r: 1.0 / np.tanh(_require_positive(r)),
        ddpsi_over_psi=lambda r: np.ones_like(_require_positive(r)),
        # coth^2 - 1/sinh^2 == 1 identically
        tan_ratio=lambda r: np.ones_like(_require_positive(r)),
    )


def superexp(N: int, a: float) -> ModelManifold:
    """Super-exponential model, psi(r) = r * exp(r^a) with a > 1.

    Curvatures are unbounded below; all ratios are formed with exp(r^a)
    cancelled symbolically so no evaluator overflows before r^a itself does.
    """
    N = _check_dimension(N)
    if not a > 1.0:
        raise DomainError(f"superexp exponent must satisfy a > 1, got {a!r}")

    def g1(r):  # (r^a)'
        return a * r ** (a - 1.0)

    def psi(r):
        r = _require_positive(r)
        return r * np.exp(r**a)

    def dpsi(r):
        r = _require_positive(r)
        return np.exp(r**a) * (1.0 + a * r**a)

    def ddpsi(r):
        r = _require_positive(r)
        return np.exp(r**a) * a * r ** (a - 1.0) * (1.0 + a + a * r**a)

    def log_psi(r):
        r = _require_positive(r)
        return np.log(r) + r**a

    def dpsi_over_psi(r):
        r = _require_positive(r)
        return 1.0 / r + g1(r)

    def ddpsi_over_psi(r):
        r = _require_positive(r)
        return a * r ** (a - 2.0) * (1.0 + a + a * r**a)

    def tan_ratio(r):
        r = _require_positive(r)
        return dpsi_over_psi(r) ** 2 - np.exp(-2.0 * log_psi(r))

    return ModelManifold(
        N=N,
        family="superexp",
        psi=psi,
        dpsi=dpsi,
        ddpsi=ddpsi,
        log_psi=log_psi,
        dpsi_over_psi=dpsi_over_psi,
        ddpsi_over_psi=ddpsi_over_psi,
        tan_ratio=tan_ratio,
        a=float(a),
    )


def check_pole_conditions(psi, dpsi, ddpsi) -> None:
    """Numeric check of psi(0+) = 0, psi'(0+) = 1, psi''(0+) = 0.

    Sampled at r = 1e-6 and 1e-8 with relative tolerance 1e-4.
    """
    for r in _POLE_SAMPLES:
        if abs(float(psi(r)) / r - 1.0) > _POLE_RTOL:
            raise ArgumentError(f"psi(r)/r != 1 near the pole (r={r:g})")
        if abs(float(dpsi(r)) - 1.0) > _POLE_RTOL:
            raise ArgumentError(f"psi'(r) != 1 near the pole (r={r:g})")
        if abs(float(ddpsi(r))) > _POLE_RTOL:
            raise ArgumentError(f"psi''(r) != 0 near the pole (r={r:g})")


def custom(N: int, psi, dpsi, ddpsi, name: str = "custom") -> ModelManifold:
    """Model from user-supplied closed-form psi, psi', psi''.

    All three evaluators are required; finite-difference fallbacks are
    refused because differenced psi'' cannot reach the identity-residual
    tolerances the verifiers assert.  Pole conditions are validated here.
    """
    N = _check_dimension(N)
    for f, label in ((psi, "psi"), (dpsi, "dpsi"), (ddpsi, "ddpsi")):
        if not callable(f):
            raise CapabilityError(f"custom manifold needs a callable {label}")
    check_pole_conditions(psi, dpsi, ddpsi)

    def _psi(r):
        return np.asarray(psi(_require_positive(r)), dtype=float)

    def _dpsi(r):
        return np.asarray(dpsi(_require_positive(r)), dtype=float)

    def _ddpsi(r):
        return np.asarray(ddpsi(_require_positive(r)), dtype=float)

    return ModelManifold(
        N=N,
        family=name,
        psi=_psi,
        dpsi=_dpsi,
        ddpsi=_ddpsi,
        log_psi=lambda r: np.log(_psi(r)),
        dpsi_over_psi=lambda r: _dpsi(r) / _psi(r),
        ddpsi_over_psi=lambda r: _ddpsi(r) / _psi(r),
        tan_ratio=lambda r: (_dpsi(r) ** 2 - 1.0) / _psi(r) ** 2,
    )


def flat_line(dimension: int) -> ModelManifold:
    """Internal flat model with psi = r and N in {1, 2}.

    Backs the one-dimensional auxiliary pencils (measure r^(N-1) dr with
    N - 1 in {0, 1}); not part of the public manifold families, which
    require N >= 3.
    """
    if dimension not in (1, 2):
        raise DomainError("flat_line supports dimension 1 or 2 only")
    base = euclidean(3)
    return ModelManifold(
        N=dimension,
        family="flat",
        psi=base.psi,
        dpsi=base.dpsi,
        ddpsi=base.ddpsi,
        log_psi=base.log_psi,
        dpsi_over_psi=base.dpsi_over_psi,
        ddpsi_over_psi=base.ddpsi_over_psi,
        tan_ratio=base.tan_ratio,
    )


def manifold_from_config(cfg: dict) -> ModelManifold:
    """Build a manifold from flat key-value config: family, N, [a]."""
    family = str(cfg.get("family", "hyperbolic")).lower()
    N = int(cfg.get("N", cfg.get("n", 3)))
    if family == "euclidean":
        return euclidean(N)
    if family == "hyperbolic":
        return hyperbolic(N)
    if family == "superexp":
        if "a" not in cfg:
            raise ArgumentError("superexp family requires key 'a'")
        return superexp(N, float(cfg["a"]))
    raise ArgumentError(f"unknown manifold family {family!r}")


# ---------------------------------------------------------------------------
# curvature and weights


def curvature_rad(manifold: ModelManifold, r):
    """Sectional curvature of planes containing the radial direction."""
    return -manifold.ddpsi_over_psi(_require_positive(r))


def curvature_tan(manifold: ModelManifold, r):
    """Sectional curvature of planes orthogonal to the radial direction."""
    return -manifold.tan_ratio(_require_positive(r))


def hardy_weight_general(manifold: ModelManifold, r):
    """Curvature-dependent Hardy weight of the improved inequality.

    w(r) = (N-1)/4 * [2 psi''/psi + (N-3) (psi'^2 - 1)/psi^2].
    Identically 0 for the euclidean family and (N-1)^2/4 for hyperbolic.
    """
    r = _require_positive(r)
    N = manifold.N
    return (
        (N - 1)
        / 4.0
        * (2.0 * manifold.ddpsi_over_psi(r) + (N - 3) * manifold.tan_ratio(r))
    )


def check_monotonicity_condition(manifold: ModelManifold, grid):
    """Check (N-2) psi' + (N-1) r psi'' >= 0 at every grid node.

    Returns (True, None) if the condition holds, else (False, i) with i the
    first violating node index.  This is the hypothesis under which the
    comparison profile used by the supersolution argument is nonincreasing.
    """
    nodes = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    if nodes.size == 0:
        raise ArgumentError("grid must be nonempty")
    N = manifold.N
    values = (N - 2) * manifold.dpsi(nodes) + (N - 1) * nodes * manifold.ddpsi(nodes)
    bad = np.nonzero(values < 0.0)[0]
    if bad.size:
        return False, int(bad[0])
    return True, None


def laplace_radial(manifold: ModelManifold, f, r):
    """Radial Laplace-Beltrami operator: f'' + (N-1)(psi'/psi) f'."""
    r = _require_positive(r)
    d1 = getattr(f, "d1", None)
    d2 = getattr(f, "d2", None)
    if d1 is None or d2 is None:
        raise CapabilityError("laplace_radial needs first and second derivatives")
    return f.d2(r) + (manifold.N - 1) * manifold.dpsi_over_psi(r) * f.d1(r)
