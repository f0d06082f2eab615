"""Verification and sharp-constant estimation for Poincare-Hardy and
Poincare-Rellich inequalities on hyperbolic space and warped-product models."""

__version__ = "0.1.0"

from . import errors, manifolds, radial, pencils, iterated_log  # noqa: F401,E402
from . import supersolutions, hardy, rellich, euclid  # noqa: F401,E402
from . import config, reports, suites, cli  # noqa: F401,E402
