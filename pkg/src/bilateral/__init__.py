"""Pseudo-differential operators acting on functions harmonic off a hypersurface.

Spectral laboratory on the flat torus ``(R/2piZ)^2`` with the circle
``Z = {y = 0}``: symbol integrals along the conormal direction, the trace
and extension operators, the bilateral Dirichlet-to-Neumann operator, the
Poisson operator, and numerical checks tying them together.
"""
from .symbols import (
    BoundaryComponent,
    BoundarySymbol,
    ClassicalSymbol,
    DegreeTooHigh,
    HomogeneousComponent,
    NonConvergent,
    eval_symbol,
    integrate_eta,
    poisson_conjugation_symbol,
    quadrature_with_tail,
    trace_symbol,
)
from .torus import (
    DN,
    CircleField,
    FourierMultiplierZ,
    GridField,
    TorusGrid,
    apply_multiplier_Z,
    apply_pdo,
    apply_pdo_Z,
    dirichlet_to_neumann,
    extend,
    harmonic_extension,
    inner_x,
    inner_z,
    laplace_quasi_inverse,
    laplacian,
    poisson,
    poisson_adjoint,
    quadratic_form,
    trace,
)

__version__ = "0.1.0"
