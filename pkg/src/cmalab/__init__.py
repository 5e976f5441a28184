"""Numerical laboratory for the complex Monge-Ampere operator.

Closed-form singular solution families, finite-difference complex
Hessians on grids, a damped-Newton Dirichlet solver for
log det(u_ij) = F, iteration machinery behind the interior estimate,
viscosity-solution jet tests at the singular slice, and empirical
regularity probes (Holder exponents, W^{2,p} thresholds, Lipschitz
blow-up of the smoothed right-hand side).
"""

from . import errors, families, grid, hermitian, kernels, moser, probe, solver, viscosity

__version__ = "0.1.0"

__all__ = ["errors", "families", "grid", "hermitian", "kernels", "moser",
           "probe", "solver", "viscosity", "__version__"]
