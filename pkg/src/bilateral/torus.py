"""Spectral model: X = (R/2piZ)^2 with coordinates (z, y), Z = {y = 0}.

Fourier convention (fixed so CSV dumps are bit-stable)::

    u(z, y) = sum_{n, m} c[n, m] exp(i (n z + m y)),
    c[n, m] = (2 pi)^-2 int int u exp(-i (n z + m y)) dz dy,

with n in [-Nz/2, Nz/2), m in [-Ny/2, Ny/2), stored in numpy FFT order.
The Laplacian is the geometers' one, symbol ``n^2 + m^2`` (nonnegative).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .symbols import BoundarySymbol, ClassicalSymbol, depends_on_z, eval_symbol

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusGrid:
    Nz: int = 256
    Ny: int = 256

    def __post_init__(self):
        for name, N in (("Nz", self.Nz), ("Ny", self.Ny)):
            if N < 8 or N % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {N}")

    @property
    def n(self) -> np.ndarray:
        return _freqs(self.Nz)

    @property
    def m(self) -> np.ndarray:
        return _freqs(self.Ny)

    @property
    def z(self) -> np.ndarray:
        return TWO_PI * np.arange(self.Nz) / self.Nz

    @property
    def y(self) -> np.ndarray:
        return TWO_PI * np.arange(self.Ny) / self.Ny

    def wavenumbers(self):
        """``(n, m)`` as broadcastable column/row arrays."""
        return self.n[:, None], self.m[None, :]

    def __str__(self):
        return f"{self.Nz}x{self.Ny}"

    @classmethod
    def parse(cls, text: str) -> "TorusGrid":
        nz, _, ny = text.lower().partition("x")
        return cls(int(nz), int(ny or nz))


def _freqs(N: int) -> np.ndarray:
    return np.fft.fftfreq(N, d=1.0 / N).astype(int)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("Fourier coefficients must be finite")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class CircleField:
    """Function on Z given by Fourier coefficients ``f[n]`` (FFT order)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.ndim != 1 or c.size < 2 or c.size % 2:
            raise ValueError("circle coefficients must be a 1-d array of even length")
        object.__setattr__(self, "coeffs", c)

    @property
    def Nz(self) -> int:
        return self.coeffs.size

    @property
    def n(self) -> np.ndarray:
        return _freqs(self.Nz)

    @classmethod
    def mode(cls, Nz: int, n: int, amplitude: complex = 1.0) -> "CircleField":
        """``amplitude * exp(i n z)``."""
        c = np.zeros(Nz, dtype=complex)
        c[_index(n, Nz)] = amplitude
        return cls(c)

    @classmethod
    def from_values(cls, values) -> "CircleField":
        values = np.asarray(values)
        return cls(np.fft.fft(values) / values.size)

    def values(self) -> np.ndarray:
        return np.fft.ifft(self.coeffs) * self.Nz

    def coeff(self, n: int) -> complex:
        return complex(self.coeffs[_index(n, self.Nz)])

    def norm(self) -> float:
        return math.sqrt(inner_z(self, self).real)

    def __add__(self, other):
        return CircleField(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return CircleField(self.coeffs - other.coeffs)

    def __mul__(self, c):
        return CircleField(self.coeffs * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GridField:
    """Function or distribution on X given by ``c[n, m]`` (FFT order)."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.grid.Nz, self.grid.Ny):
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_values(cls, grid: TorusGrid, values) -> "GridField":
        values = np.asarray(values)
        return cls(grid, np.fft.fft2(values) / values.size)

    @classmethod
    def mode(cls, grid: TorusGrid, n: int, m: int, amplitude: complex = 1.0) -> "GridField":
        c = np.zeros((grid.Nz, grid.Ny), dtype=complex)
        c[_index(n, grid.Nz), _index(m, grid.Ny)] = amplitude
        return cls(grid, c)

    def values(self) -> np.ndarray:
        return np.fft.ifft2(self.coeffs) * self.coeffs.size

    def norm(self) -> float:
        return math.sqrt(inner_x(self, self).real)

    def __add__(self, other):
        return GridField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return GridField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return GridField(self.grid, self.coeffs * c)

    __rmul__ = __mul__


def _index(k: int, N: int) -> int:
    if not -N // 2 <= k < N // 2:
        raise IndexError(f"frequency {k} outside [-{N // 2}, {N // 2})")
    return k % N


class FourierMultiplierZ:
    """Diagonal operator on Z, ``f[n] -> lam(n) f[n]``."""

    def __init__(self, lam: Callable, label: str = ""):
        self.lam = lam
        self.label = label

    def __call__(self, n):
        return self.lam(np.asarray(n))

    def apply(self, f: CircleField) -> CircleField:
        return apply_multiplier_Z(self, f)


def dn_multiplier(n) -> np.ndarray:
    """Eigenvalues ``2 |n| tanh(pi |n|)`` of the bilateral DN operator."""
    k = np.abs(np.asarray(n, dtype=float))
    return 2.0 * k * np.tanh(math.pi * k)


DN = FourierMultiplierZ(dn_multiplier, "DN")


# --------------------------------------------------------------------------
# operators


def _check_nz(f: CircleField, grid: TorusGrid):
    if f.Nz != grid.Nz:
        raise ValueError(f"circle field has Nz={f.Nz}, grid has Nz={grid.Nz}")


def extend(f: CircleField, grid: TorusGrid) -> GridField:
    """``f -> f delta(y = 0)``; every retained m-row gets ``f[n] / 2pi``."""
    _check_nz(f, grid)
    c = np.repeat(f.coeffs[:, None] / TWO_PI, grid.Ny, axis=1)
    return GridField(grid, c)


def trace(F: GridField) -> CircleField:
    """Restriction to y = 0: ``f[n] = sum_m c[n, m]``.

    Only meaningful for fields whose coefficients are summable in m; on
    ``extend(f)`` it returns ``Ny f[n] / 2pi``, a pure grid artefact.
    """
    return CircleField(F.coeffs.sum(axis=1))


def laplacian(F: GridField) -> GridField:
    n, m = F.grid.wavenumbers()
    return GridField(F.grid, (n * n + m * m) * F.coeffs)


def laplace_quasi_inverse(F: GridField) -> GridField:
    """Invert the Laplacian on nonconstant modes; the mean is sent to 0."""
    n, m = F.grid.wavenumbers()
    lam = (n * n + m * m).astype(float)
    lam[0, 0] = np.inf
    return GridField(F.grid, F.coeffs / lam)


def poisson_coefficients(grid: TorusGrid) -> np.ndarray:
    """``c[n, m]`` of the harmonic extension of ``exp(i n z)``, one row per n."""
    n, m = grid.wavenumbers()
    k = np.abs(n).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = k * np.tanh(math.pi * k) / (math.pi * (n * n + m * m))
    c[0, :] = 0.0
    c[0, 0] = 1.0
    return c


def harmonic_extension(f: CircleField, grid: TorusGrid) -> GridField:
    """Harmonic function off Z with equal traces from both sides.

    Row n is the Fourier series in y of
    ``f[n] cosh(n (y - pi)) / cosh(n pi)``, truncated to the grid.
    """
    _check_nz(f, grid)
    return GridField(grid, f.coeffs[:, None] * poisson_coefficients(grid))


def poisson(f: CircleField, grid: TorusGrid) -> GridField:
    """Poisson operator P; equal to :func:`harmonic_extension` on this model."""
    return harmonic_extension(f, grid)


def poisson_adjoint(G: GridField) -> CircleField:
    """``P*`` for the pairings on X and Z: ``<P* G, f>_Z = <G, P f>_X``."""
    c = poisson_coefficients(G.grid)
    return CircleField(TWO_PI * np.sum(G.coeffs * np.conj(c), axis=1))


def dirichlet_to_neumann(f: CircleField) -> CircleField:
    """Minus the sum of the interior normal derivatives of the harmonic
    extension, from both sides of Z."""
    return apply_multiplier_Z(DN, f)


def apply_multiplier_Z(lam, f: CircleField) -> CircleField:
    return CircleField(np.asarray(lam(f.n)) * f.coeffs)


# --------------------------------------------------------------------------
# quantization


def _symbol_evaluator(a):
    if isinstance(a, ClassicalSymbol):
        return lambda z, y, zeta, eta: eval_symbol(a, z, y, zeta, eta)
    return a


def _depends_on_y(f) -> bool:
    ys = np.array([0.31, 1.73, 2.89, 4.41])
    vals = np.broadcast_to(f(0.7, ys, 2.0, 1.3), ys.shape)
    return not np.allclose(vals, vals[0], rtol=1e-14, atol=0.0)


def apply_pdo(a, u: GridField, chunk: int = 8) -> GridField:
    """Kohn-Nirenberg quantization on the grid::

        (A u)(z_k, y_l) = sum_{n, m} exp(i (n z_k + m y_l)) a(z_k, y_l; n, m) u[n, m]

    ``a`` is a :class:`ClassicalSymbol` or a broadcasting callable
    ``(z, y, zeta, eta)``.  Symbols independent of (z, y) reduce to a Fourier
    multiplier; dependence on one variable costs one transform per grid line;
    full (z, y) dependence is summed directly, O(N^2) per output point.
    """
    f = _symbol_evaluator(a)
    grid = u.grid
    n, m = grid.wavenumbers()
    dz, dy = depends_on_z(f), _depends_on_y(f)
    if not dz and not dy:
        lam = np.broadcast_to(f(0.0, 0.0, n, m), n.shape[:1] + m.shape[1:])
        return GridField(grid, lam * u.coeffs)

    z, y = grid.z, grid.y
    Nz, Ny = grid.Nz, grid.Ny
    out = np.empty((Nz, Ny), dtype=complex)
    if dz and not dy:
        ez = np.exp(1j * np.outer(z, n[:, 0]))  # (k, n)
        for s in range(0, Nz, chunk):
            zk = z[s : s + chunk, None, None]
            lam = f(zk, 0.0, n[None], m[None])
            rows = np.fft.ifft(lam * u.coeffs[None], axis=2) * Ny  # (k, n, l)
            out[s : s + chunk] = np.einsum("kn,knl->kl", ez[s : s + chunk], rows)
    elif dy and not dz:
        ey = np.exp(1j * np.outer(y, m[0, :]))  # (l, m)
        for s in range(0, Ny, chunk):
            yl = y[s : s + chunk, None, None]
            lam = f(0.0, yl, n[None], m[None])  # (l, n, m)
            cols = np.fft.ifft(lam * u.coeffs[None], axis=1) * Nz  # (l, k, m)
            out[:, s : s + chunk] = np.einsum("lm,lkm->kl", ey[s : s + chunk], cols)
    else:
        phase_z = np.exp(1j * np.outer(z, n[:, 0]))
        phase_y = np.exp(1j * np.outer(y, m[0, :]))
        for k in range(Nz):
            for l in range(Ny):
                lam = f(z[k], y[l], n, m)
                out[k, l] = np.sum(phase_z[k][:, None] * phase_y[l][None, :] * lam * u.coeffs)
    return GridField.from_values(grid, out)


def apply_pdo_Z(b, f: CircleField) -> CircleField:
    """Quantize a symbol on Z: ``(B f)(z_k) = sum_n exp(i n z_k) b(z_k, n) f[n]``.

    Only modes with nonzero coefficients are evaluated, which keeps
    quadrature-backed :class:`BoundarySymbol` evaluations cheap on test
    functions.
    """
    Nz = f.Nz
    z = TWO_PI * np.arange(Nz) / Nz
    out = np.zeros(Nz, dtype=complex)
    for idx in np.flatnonzero(f.coeffs):
        k = int(f.n[idx])
        vals = np.broadcast_to(b(z, float(k)), z.shape)
        out += np.exp(1j * k * z) * vals * f.coeffs[idx]
    return CircleField.from_values(out)


# --------------------------------------------------------------------------
# pairings


def inner_x(F: GridField, G: GridField) -> complex:
    """``<F, G>_X = (2 pi)^2 sum c_F conj(c_G)`` (Lebesgue measure)."""
    return TWO_PI**2 * complex(np.vdot(G.coeffs, F.coeffs))


def inner_z(f: CircleField, g: CircleField) -> complex:
    return TWO_PI * complex(np.vdot(g.coeffs, f.coeffs))


def quadratic_form(A: Callable, F: GridField) -> complex:
    """``Q_A(F) = <A F, F>_X`` for an operator ``A: GridField -> GridField``."""
    return inner_x(A(F), F)


# --------------------------------------------------------------------------
# CSV


def field_to_csv(field, fh=None) -> str:
    """Write coefficients as ``n,m,re,im`` rows (``m`` empty for circle fields)."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "re", "im"])
    if isinstance(field, GridField):
        ns, ms = field.grid.n, field.grid.m
        for i, nn in enumerate(ns):
            for j, mm in enumerate(ms):
                c = field.coeffs[i, j]
                w.writerow([int(nn), int(mm), repr(float(c.real)), repr(float(c.imag))])
    else:
        for nn, c in zip(field.n, field.coeffs):
            w.writerow([int(nn), "", repr(float(c.real)), repr(float(c.imag))])
    return buf.getvalue() if fh is None else ""


def field_from_csv(text: str, grid: TorusGrid | None = None):
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and rows[0]["m"] == "":
        Nz = len(rows)
        c = np.zeros(Nz, dtype=complex)
        for r in rows:
            c[_index(int(r["n"]), Nz)] = complex(float(r["re"]), float(r["im"]))
        return CircleField(c)
    if grid is None:
        raise ValueError("a grid is needed to read a GridField")
    c = np.zeros((grid.Nz, grid.Ny), dtype=complex)
    for r in rows:
        c[_index(int(r["n"]), grid.Nz), _index(int(r["m"]), grid.Ny)] = complex(
            float(r["re"]), float(r["im"])
        )
    return GridField(grid, c)
