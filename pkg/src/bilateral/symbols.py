"""Classical symbols and the integrals over the conormal frequency.

A symbol on the torus chart is a function ``a(z, y; zeta, eta)``.  It is
stored as a list of homogeneous components (principal first), optionally
together with a closed-form ``full`` evaluator when the homogeneous
expansion is infinite, e.g. ``(1 + zeta**2 + eta**2)**-1``.

All evaluators must accept numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec

__all__ = [
    "DegreeTooHigh",
    "NonConvergent",
    "HomogeneousComponent",
    "ClassicalSymbol",
    "BoundaryComponent",
    "BoundarySymbol",
    "cutoff",
    "eval_symbol",
    "quadrature_with_tail",
    "integrate_eta",
    "trace_symbol",
    "poisson_conjugation_symbol",
    "depends_on_z",
]

DEFAULT_TOL = 1e-10
MAX_SUBINTERVALS = 2000


class DegreeTooHigh(ValueError):
    """The symbol degree is outside the range where the integral converges."""


class NonConvergent(RuntimeError):
    """Adaptive quadrature hit its subdivision bound."""


def cutoff(r, radius: float):
    """Smooth cutoff: 0 for ``r <= radius/2``, 1 for ``r >= radius``.

    ``radius == 0`` disables the cutoff (used for polynomial symbols).
    """
    r = np.asarray(r, dtype=float)
    if radius <= 0:
        return np.ones_like(r)
    s = np.clip((r - 0.5 * radius) / (0.5 * radius), 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


@dataclass(frozen=True)
class HomogeneousComponent:
    """One term ``a_j(z, y; zeta, eta)`` of degree ``degree`` in (zeta, eta)."""

    degree: float
    evaluator: Callable
    label: str = ""

    def __call__(self, z, y, zeta, eta):
        return self.evaluator(z, y, zeta, eta)


def _zero4(z, y, zeta, eta):
    return np.zeros(np.broadcast(z, y, zeta, eta).shape)


def _zero2(z, zeta):
    return np.zeros(np.broadcast(z, zeta).shape)


@dataclass(frozen=True)
class ClassicalSymbol:
    """Classical symbol ``a ~ sum_j a_{d-j}`` with a low-frequency cutoff.

    Parameters
    ----------
    components : sequence of HomogeneousComponent
        Degrees must be ``d, d-1, d-2, ...``.  Missing orders are given as
        zero components (see :meth:`zero_component`).
    cutoff_radius : float
        ``r0`` of the cutoff applied to the sum of components.  Zero means
        no cutoff, which is only sensible for polynomial symbols.
    full : callable, optional
        Closed form of the symbol.  When present it is what gets quantized
        and integrated, and ``components`` is its (truncated) expansion.
    """

    components: tuple
    cutoff_radius: float = 1.0
    full: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a classical symbol needs at least one component")
        for a, b in zip(comps, comps[1:]):
            if not math.isclose(a.degree - b.degree, 1.0):
                raise ValueError(
                    f"component degrees must decrease by 1, got {a.degree} then {b.degree}"
                )
        if self.cutoff_radius < 0:
            raise ValueError("cutoff_radius must be nonnegative")
        object.__setattr__(self, "components", comps)

    @property
    def degree(self) -> float:
        return self.components[0].degree

    @property
    def principal(self) -> HomogeneousComponent:
        return self.components[0]

    @property
    def is_homogeneous(self) -> bool:
        """True if the principal component is the whole symbol."""
        return self.full is None and len(self.components) == 1

    @staticmethod
    def zero_component(degree: float) -> HomogeneousComponent:
        return HomogeneousComponent(degree, _zero4, "0")

    def __call__(self, z, y, zeta, eta):
        return eval_symbol(self, z, y, zeta, eta)

    def scaled(self, c: complex) -> "ClassicalSymbol":
        comps = tuple(
            HomogeneousComponent(p.degree, _scale4(p.evaluator, c), f"{c}*{p.label}")
            for p in self.components
        )
        full = _scale4(self.full, c) if self.full is not None else None
        return ClassicalSymbol(comps, self.cutoff_radius, full, f"{c}*({self.label})")


def _scale4(f, c):
    return lambda z, y, zeta, eta: c * f(z, y, zeta, eta)


def eval_symbol(s: ClassicalSymbol, z, y, zeta, eta):
    """Evaluate ``s`` at the given points (numpy broadcasting applies)."""
    if s.full is not None:
        out = s.full(z, y, zeta, eta)
        return np.broadcast_to(out, np.broadcast(z, y, zeta, eta).shape)
    zeta = np.asarray(zeta, dtype=float)
    eta = np.asarray(eta, dtype=float)
    chi = cutoff(np.hypot(zeta, eta), s.cutoff_radius)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        total = sum(c(z, y, zeta, eta) for c in s.components)
        total = np.broadcast_to(total, np.broadcast(z, y, zeta, eta).shape)
        return np.where(chi > 0, chi * total, 0.0)


# --------------------------------------------------------------------------
# quadrature


def _integrate(f, a, b, tol, limit, epsabs=0.0):
    res, err, info = quad_vec(
        f, a, b, epsrel=tol, epsabs=epsabs, limit=limit, norm="max", full_output=True
    )
    if info.status == 1:
        raise NonConvergent(
            f"adaptive quadrature on [{a}, {b}] exceeded {limit} subintervals"
        )
    if info.status == 2:
        raise FloatingPointError(f"non-finite integrand on [{a}, {b}]")
    return res, err


def quadrature_with_tail(
    f: Callable,
    decay_degree: float,
    tol: float = DEFAULT_TOL,
    radius: float = 32.0,
    limit: int = MAX_SUBINTERVALS,
):
    """Integrate ``f`` over the real line, ``|f(eta)| <= C |eta|**decay_degree``.

    The integrand is folded, ``f(eta) + f(-eta)``, so odd integrands give an
    exact zero.  The fold is integrated adaptively on ``[0, radius]``.  The
    rest is mapped to ``t = radius/eta`` on ``(0, 1]``; the leading power
    ``c |eta|**decay_degree`` (``c`` read off at ``radius``) is integrated in
    closed form and only the remainder goes to the adaptive rule.

    ``f`` may return arrays; the result then has the same shape and ``tol``
    is relative in the max norm.
    """
    d = float(decay_degree)
    if d >= -1:
        raise DegreeTooHigh(f"integrand decay degree {d} must be < -1 for convergence")
    if tol <= 0:
        raise ValueError("tol must be positive")
    R = float(radius)

    def fold(eta):
        return np.asarray(f(eta)) + np.asarray(f(-eta))

    # absolute floor: keeps near-cancelling integrands from refining forever
    probe = np.linspace(0.0, R, 9)[1:]
    scale = max(float(np.max(np.abs(fold(e)))) for e in probe) * R
    core, _ = _integrate(fold, 0.0, R, tol, limit, epsabs=max(1e-3 * tol * scale, 1e-300))

    c = fold(R) * R ** (-d)
    lead = c * R ** (d + 1) / (-d - 1)

    def remainder(t):
        eta = R / t
        return fold(eta) * R / t**2 - c * R ** (d + 1) * t ** (-d - 2)

    floor = 0.1 * tol * max(float(np.max(np.abs(core))), float(np.max(np.abs(lead))))
    rest, _ = _integrate(remainder, 0.0, 1.0, tol, limit, epsabs=max(floor, 1e-300))
    return core + lead + rest


# --------------------------------------------------------------------------
# boundary symbols


@dataclass(frozen=True)
class BoundaryComponent:
    """Homogeneous term ``b_l(z; zeta)`` of a symbol on the hypersurface."""

    degree: float
    evaluator: Callable
    label: str = ""

    def __call__(self, z, zeta):
        return self.evaluator(z, zeta)


@dataclass(frozen=True)
class BoundarySymbol:
    """Symbol on Z; same layout as :class:`ClassicalSymbol` in ``(z, zeta)``."""

    components: tuple
    cutoff_radius: float = 1.0
    full: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def degree(self) -> float:
        return self.components[0].degree

    def principal(self) -> "BoundarySymbol":
        return self.truncate(1)

    def truncate(self, terms: int) -> "BoundarySymbol":
        """Keep the first ``terms`` homogeneous components, drop ``full``."""
        return BoundarySymbol(self.components[:terms], self.cutoff_radius, None, self.label)

    def __call__(self, z, zeta):
        if self.full is not None:
            return self.full(z, zeta)
        zeta = np.asarray(zeta, dtype=float)
        chi = cutoff(np.abs(zeta), self.cutoff_radius)
        shape = np.broadcast(z, zeta).shape
        out = np.zeros(shape, dtype=complex)
        # homogeneous terms are undefined at zeta = 0; report 0 there
        live = np.broadcast_to((chi > 0) & (zeta != 0), shape)
        if live.any():
            zz = np.broadcast_to(z, shape)[live]
            ks = np.broadcast_to(zeta, shape)[live]
            vals = sum(np.asarray(c(zz, ks), dtype=complex) for c in self.components)
            out[live] = np.broadcast_to(chi, shape)[live] * vals
        return out if np.iscomplexobj(out) and np.any(out.imag) else out.real


def depends_on_z(f: Callable, zeta: float = 2.0, eta: float = 1.3) -> bool:
    """Probe a 4-argument evaluator at a few irregular angles."""
    zs = np.array([0.31, 1.73, 2.89, 4.41])
    vals = np.broadcast_to(f(zs, 0.57, zeta, eta), zs.shape)
    return not np.allclose(vals, vals[0], rtol=1e-14, atol=0.0)


def _eta_integral(profile: Callable, degree: float, tol: float, prefactor=None, zero_at_origin=False):
    """Build ``(z, zeta) -> int profile(z, zeta, eta) d eta`` vectorized over z.

    ``profile`` is a 3-argument callable; values are grouped by distinct
    ``zeta`` so the relative tolerance applies per frequency.  With
    ``zero_at_origin`` the value at ``zeta == 0`` is 0 instead of an integral
    that does not exist.
    """
    z_dep = depends_on_z(lambda z, y, k, e: profile(z, k, e))

    def integral(z, zeta):
        z = np.asarray(z, dtype=float)
        zeta = np.asarray(zeta, dtype=float)
        shape = np.broadcast(z, zeta).shape
        zb = np.broadcast_to(z, shape).ravel()
        kb = np.broadcast_to(zeta, shape).ravel()
        out = np.empty(zb.shape, dtype=complex)
        for k in np.unique(kb):
            sel = kb == k
            if zero_at_origin and k == 0:
                out[sel] = 0.0
                continue
            R = max(8.0 * abs(k), 32.0)
            if z_dep:
                zs = zb[sel]
                val = quadrature_with_tail(
                    lambda e: np.asarray(profile(zs, k, e), dtype=complex)
                    * np.ones(zs.shape),
                    degree,
                    tol,
                    R,
                )
            else:
                val = quadrature_with_tail(
                    lambda e: complex(np.asarray(profile(0.0, k, e)).item()),
                    degree,
                    tol,
                    R,
                )
            if prefactor is not None:
                val = prefactor(k) * val
            out[sel] = val
        out = out.reshape(shape)
        return out.real.copy() if not np.any(out.imag) else out

    return integral


def integrate_eta(s: ClassicalSymbol, tol: float = DEFAULT_TOL) -> BoundarySymbol:
    """Integrate ``s(z, 0; zeta, eta)`` over eta, component by component.

    The component of degree ``l`` of the result is the integral of the
    component of degree ``l - 1`` of ``s``.  Raises :class:`DegreeTooHigh`
    unless ``s.degree < -1``.
    """
    return _integrated(s, tol, scale=1.0)


def trace_symbol(s: ClassicalSymbol, tol: float = DEFAULT_TOL) -> BoundarySymbol:
    """Predicted symbol of ``T o A o E``: ``(1/2pi) * integrate_eta(s)``."""
    return _integrated(s, tol, scale=1.0 / (2.0 * math.pi))


def _integrated(s: ClassicalSymbol, tol: float, scale: float) -> BoundarySymbol:
    if s.degree >= -1:
        raise DegreeTooHigh(
            f"symbol degree {s.degree} must be < -1 for the eta-integral to converge"
        )
    pref = None if scale == 1.0 else (lambda k: scale)
    comps = []
    for c in s.components:
        if c.evaluator is _zero4:
            comps.append(BoundaryComponent(c.degree + 1, _zero2, "0"))
            continue
        prof = _profile(c.evaluator)
        comps.append(
            BoundaryComponent(c.degree + 1, _eta_integral(prof, c.degree, tol, pref), c.label)
        )
    full = None
    if s.full is not None:
        full = _eta_integral(_profile(s.full), s.degree, tol, pref)
    return BoundarySymbol(tuple(comps), s.cutoff_radius, full, f"int[{s.label}]")


def _profile(f):
    return lambda z, zeta, eta: f(z, 0.0, zeta, eta)


def poisson_conjugation_symbol(a: ClassicalSymbol, tol: float = DEFAULT_TOL) -> BoundarySymbol:
    """Symbol of ``P* A P`` on Z:

    ``b(z, zeta) = (2/pi) |zeta|^2 int a(z, 0; zeta, eta) / (|zeta|^2 + eta^2)^2 d eta``

    applied to every component (degrees drop by one).  Only the principal
    term is guaranteed by the theory; the rest are returned for inspection.
    """
    if a.degree >= 3:
        raise DegreeTooHigh(f"symbol degree {a.degree} must be < 3")

    def weighted(f):
        def prof(z, zeta, eta):
            k2 = zeta * zeta
            return f(z, 0.0, zeta, eta) / (k2 + eta * eta) ** 2

        return prof

    pref = lambda k: (2.0 / math.pi) * k * k
    comps = []
    for c in a.components:
        if c.evaluator is _zero4:
            comps.append(BoundaryComponent(c.degree - 1, _zero2, "0"))
            continue
        comps.append(
            BoundaryComponent(
                c.degree - 1, _eta_integral(weighted(c.evaluator), c.degree - 4, tol, pref), c.label
            )
        )
    full = None
    if a.full is not None:
        full = _eta_integral(weighted(a.full), a.degree - 4, tol, pref, zero_at_origin=True)
    return BoundarySymbol(tuple(comps), a.cutoff_radius, full, f"pconj[{a.label}]")
