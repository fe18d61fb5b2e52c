import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bilateral.symbolspec import modulated_resolvent, resolvent
from bilateral.torus import (
    DN,
    CircleField,
    FourierMultiplierZ,
    GridField,
    TorusGrid,
    apply_multiplier_Z,
    apply_pdo,
    apply_pdo_Z,
    dirichlet_to_neumann,
    dn_multiplier,
    extend,
    field_from_csv,
    field_to_csv,
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
from bilateral.verify import random_circle_field, random_grid_field

from oracles import lattice_sum_1, missing_tail_1, sov_harmonic

G64 = TorusGrid(64, 64)
G256 = TorusGrid(256, 256)


# ----------------------------------------------------------------- containers

def test_grid_defaults_and_parse():
    g = TorusGrid()
    assert (g.Nz, g.Ny) == (256, 256)
    assert TorusGrid.parse("32x16") == TorusGrid(32, 16)
    assert str(TorusGrid(32, 16)) == "32x16"


@pytest.mark.parametrize("bad", [(7, 8), (8, 6), (0, 8), (9, 9)])
def test_grid_rejects_bad_sizes(bad):
    with pytest.raises(ValueError):
        TorusGrid(*bad)


def test_frequency_range():
    g = TorusGrid(8, 16)
    assert g.n.min() == -4 and g.n.max() == 3
    assert g.m.min() == -8 and g.m.max() == 7


def test_fields_are_immutable():
    f = CircleField.mode(16, 2)
    with pytest.raises(ValueError):
        f.coeffs[0] = 1.0
    F = GridField.mode(G64, 1, 1)
    with pytest.raises(ValueError):
        F.coeffs[0, 0] = 1.0


def test_fields_reject_nonfinite():
    c = np.zeros(16, complex)
    c[3] = np.nan
    with pytest.raises(ValueError):
        CircleField(c)


def test_mode_out_of_range():
    with pytest.raises(IndexError):
        CircleField.mode(16, 8)
    assert CircleField.mode(16, -8).coeff(-8) == 1.0


def test_values_roundtrip():
    f = random_circle_field(32, 3)
    g = CircleField.from_values(f.values())
    np.testing.assert_allclose(g.coeffs, f.coeffs, atol=1e-13)


def test_csv_roundtrip_circle_and_grid():
    f = random_circle_field(16, 1)
    back = field_from_csv(field_to_csv(f))
    np.testing.assert_array_equal(back.coeffs, f.coeffs)
    g = TorusGrid(8, 8)
    F = random_grid_field(g, 2, band=3)
    back = field_from_csv(field_to_csv(F), g)
    np.testing.assert_array_equal(back.coeffs, F.coeffs)


def test_csv_header_and_decimal_point():
    text = field_to_csv(CircleField.mode(8, 1, 0.5))
    assert text.splitlines()[0] == "n,m,re,im"
    assert "1,,0.5,0.0" in text


# ----------------------------------------------------------------- extend / trace

def test_extend_constant():
    F = extend(CircleField.mode(G64.Nz, 0), G64)
    np.testing.assert_allclose(F.coeffs[0], 1 / (2 * np.pi), rtol=1e-15)
    assert np.all(F.coeffs[1:] == 0)


def test_extend_single_mode():
    F = extend(CircleField.mode(G64.Nz, 3), G64)
    row = np.flatnonzero(np.any(F.coeffs != 0, axis=1))
    assert list(G64.n[row]) == [3]
    np.testing.assert_allclose(F.coeffs[row[0]], 1 / (2 * np.pi), rtol=1e-15)


def test_extend_size_mismatch():
    with pytest.raises(ValueError):
        extend(CircleField.mode(32, 1), G64)


@pytest.mark.parametrize("seed", range(3))
def test_extend_trace_adjoint(seed):
    f = random_circle_field(G64.Nz, seed)
    phi = random_grid_field(G64, seed + 10)
    lhs = inner_x(extend(f, G64), phi)
    rhs = inner_z(f, trace(phi))
    assert abs(lhs - rhs) <= 1e-13 * f.norm() * phi.norm()


def test_trace_of_single_mode():
    out = trace(GridField.mode(G64, 2, 5))
    assert out.coeff(2) == 1.0 and np.count_nonzero(out.coeffs) == 1


def test_trace_of_delta_is_grid_artefact():
    out = trace(extend(CircleField.mode(G64.Nz, 4, 2.0), G64))
    assert out.coeff(4) == pytest.approx(G64.Ny * 2.0 / (2 * np.pi), rel=1e-14)


def test_trace_laplace_inverse_extend_n1():
    val = trace(laplace_quasi_inverse(extend(CircleField.mode(256, 1), G256))).coeff(1).real
    exact = 1 / (2 * math.tanh(math.pi))
    assert abs(val - exact) <= 2 * missing_tail_1(1.0, 128) / (2 * math.pi)
    assert abs(val - exact) > 0  # truncated grid never reproduces the lattice sum exactly


# ----------------------------------------------------------------- Laplacian

def test_quasi_inverse_eigenfunction():
    out = laplace_quasi_inverse(GridField.mode(G64, 1, 1))
    np.testing.assert_allclose(out.coeffs, GridField.mode(G64, 1, 1, 0.5).coeffs, atol=0)


def test_quasi_inverse_kills_constants():
    assert np.all(laplace_quasi_inverse(GridField.mode(G64, 0, 0)).coeffs == 0)


def test_laplacian_after_quasi_inverse_removes_mean():
    F = random_grid_field(G64, 4)
    back = laplacian(laplace_quasi_inverse(F))
    expect = F.coeffs.copy()
    expect[0, 0] = 0
    np.testing.assert_allclose(back.coeffs, expect, atol=1e-13)


# ----------------------------------------------------------------- harmonic extension

def test_harmonic_extension_of_constant():
    F = harmonic_extension(CircleField.mode(G64.Nz, 0), G64)
    np.testing.assert_array_equal(F.coeffs, GridField.mode(G64, 0, 0).coeffs)


@pytest.mark.parametrize("n", [1, 3])
def test_harmonic_extension_physical_space(n):
    F = harmonic_extension(CircleField.mode(G256.Nz, n), G256)
    zz, yy = np.meshgrid(G256.z, G256.y, indexing="ij")
    exact = sov_harmonic(n, yy) * np.exp(1j * n * zz)
    err = np.max(np.abs(F.values() - exact))
    # the grid keeps |m| < 128; the dropped coefficients bound the pointwise error
    bound = n * math.tanh(math.pi * n) / math.pi * missing_tail_1(n, 128)
    assert err <= bound
    # away from the crease at y = 0 the coefficient tail averages out
    interior = (yy > 1.0) & (yy < 2 * np.pi - 1.0)
    assert np.max(np.abs(F.values() - exact)[interior]) <= 2e-5


@pytest.mark.parametrize("n", [1, 4, 10])
def test_trace_of_harmonic_extension(n):
    f = CircleField.mode(G256.Nz, n)
    t = trace(harmonic_extension(f, G256)).coeff(n).real
    bound = n * math.tanh(math.pi * n) / math.pi * missing_tail_1(n, 128)
    assert 0 < 1 - t <= bound


def test_poisson_equals_harmonic_extension():
    f = random_circle_field(G64.Nz, 0)
    np.testing.assert_array_equal(poisson(f, G64).coeffs, harmonic_extension(f, G64).coeffs)


@pytest.mark.parametrize("seed", range(3))
def test_poisson_factorization_on_mean_zero(seed):
    c = random_circle_field(G64.Nz, seed).coeffs.copy()
    c[0] = 0
    f = CircleField(c)
    fact = laplace_quasi_inverse(extend(dirichlet_to_neumann(f), G64))
    diff = poisson(f, G64) - fact
    assert np.max(np.abs(diff.coeffs)) <= 1e-13 * np.max(np.abs(c))


def test_poisson_factorization_zero_mode():
    one = CircleField.mode(G64.Nz, 0)
    assert poisson(one, G64).coeffs[0, 0] == 1.0
    assert np.all(laplace_quasi_inverse(extend(dirichlet_to_neumann(one), G64)).coeffs == 0)


@pytest.mark.parametrize("seed", range(3))
def test_lemma_identity_exact(seed):
    f = random_circle_field(G64.Nz, seed)
    lhs = laplacian(harmonic_extension(f, G64))
    rhs = extend(dirichlet_to_neumann(f), G64)
    assert np.max(np.abs((lhs - rhs).coeffs)) <= 1e-13 * np.linalg.norm(f.coeffs)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_poisson_adjoint(seed):
    f = random_circle_field(G64.Nz, seed)
    Gf = random_grid_field(G64, seed + 1)
    lhs = inner_z(poisson_adjoint(Gf), f)
    rhs = inner_x(Gf, poisson(f, G64))
    assert abs(lhs - rhs) <= 1e-12 * f.norm() * Gf.norm()


# ----------------------------------------------------------------- DN

def test_dn_kills_constants():
    assert np.all(dirichlet_to_neumann(CircleField.mode(16, 0, 3.0)).coeffs == 0)


def test_dn_mode_five():
    out = dirichlet_to_neumann(CircleField.mode(32, 5))
    assert out.coeff(5) == pytest.approx(10 * math.tanh(5 * math.pi), rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_dn_matches_finite_difference_oracle(n):
    # minus the sum of interior normal derivatives of cosh(n(y-pi))/cosh(n pi)
    h = 1e-3
    k = np.arange(5)
    w = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    d_lower = w @ sov_harmonic(n, k * h)                     # d/dy at y = 0+
    d_upper = -(w @ sov_harmonic(n, 2 * math.pi - k * h))   # d/dy at y = 2pi-
    fd = -(d_lower - d_upper)
    assert dn_multiplier(n) == pytest.approx(fd, rel=1e-7)


def test_dn_ratio_tends_to_one():
    n = np.arange(1, 7)
    r = dn_multiplier(n) / (2 * n)
    assert np.all(np.diff(r) > 0)
    assert 1 - dn_multiplier(30) / 60 <= 1e-15


def test_dn_even_real():
    n = np.arange(-20, 21)
    np.testing.assert_array_equal(dn_multiplier(n), dn_multiplier(-n))
    assert np.isrealobj(dn_multiplier(n))


# ----------------------------------------------------------------- multipliers on Z

def test_apply_multiplier_identity_and_dn():
    f = random_circle_field(32, 5)
    one = FourierMultiplierZ(lambda n: np.ones_like(n, dtype=float))
    np.testing.assert_array_equal(apply_multiplier_Z(one, f).coeffs, f.coeffs)
    lam = FourierMultiplierZ(lambda n: 2 * np.abs(n) * np.tanh(np.pi * np.abs(n)))
    np.testing.assert_allclose(apply_multiplier_Z(lam, f).coeffs, dirichlet_to_neumann(f).coeffs, rtol=1e-15)
    np.testing.assert_array_equal(DN.apply(f).coeffs, dirichlet_to_neumann(f).coeffs)


def test_apply_multiplier_n_on_first_mode():
    out = apply_multiplier_Z(lambda n: n, CircleField.mode(16, 1))
    np.testing.assert_array_equal(out.coeffs, CircleField.mode(16, 1).coeffs)


def test_apply_pdo_Z_z_dependent():
    f = CircleField.mode(32, 3)
    out = apply_pdo_Z(lambda z, k: (2 + np.cos(z)) * k, f)
    z = 2 * np.pi * np.arange(32) / 32
    np.testing.assert_allclose(out.values(), 3 * (2 + np.cos(z)) * np.exp(3j * z), atol=1e-13)


# ----------------------------------------------------------------- quantization

def test_apply_pdo_identity():
    u = random_grid_field(G64, 1)
    out = apply_pdo(lambda z, y, k, e: np.ones(np.broadcast(z, y, k, e).shape), u)
    np.testing.assert_array_equal(out.coeffs, u.coeffs)


def test_apply_pdo_resolvent_on_mode():
    out = apply_pdo(resolvent(1), GridField.mode(G64, 2, 1))
    np.testing.assert_allclose(out.coeffs, GridField.mode(G64, 2, 1, 1 / 6).coeffs, atol=1e-16)


def test_apply_pdo_z_dependent_single_mode():
    out = apply_pdo(modulated_resolvent(1), GridField.mode(G64, 0, 1))
    zz, yy = np.meshgrid(G64.z, G64.y, indexing="ij")
    exact = (2 + np.cos(zz)) * np.exp(1j * yy) / 2
    assert np.max(np.abs(out.values() - exact)) <= 1e-12 * np.max(np.abs(exact))


def test_apply_pdo_y_dependent_single_mode():
    a = lambda z, y, k, e: (3 + np.sin(y)) / (1 + k * k + e * e)
    out = apply_pdo(a, GridField.mode(G64, 2, 0))
    zz, yy = np.meshgrid(G64.z, G64.y, indexing="ij")
    exact = (3 + np.sin(yy)) * np.exp(2j * zz) / 5
    assert np.max(np.abs(out.values() - exact)) <= 1e-12


def test_apply_pdo_full_dependence_matches_direct_sum():
    g = TorusGrid(8, 8)
    u = random_grid_field(g, 7, band=3)
    a = lambda z, y, k, e: (2 + np.cos(z) * np.sin(y)) * (1 + k * k + 2 * e * e) ** -0.5
    out = apply_pdo(a, u).values()
    ref = np.zeros((8, 8), complex)
    for i, z in enumerate(g.z):
        for j, y in enumerate(g.y):
            for p, n in enumerate(g.n):
                for q, m in enumerate(g.m):
                    ref[i, j] += np.exp(1j * (n * z + m * y)) * a(z, y, n, m) * u.coeffs[p, q]
    np.testing.assert_allclose(out, ref, atol=1e-12)


@pytest.mark.parametrize("path", ["z", "y"])
def test_apply_pdo_paths_agree_with_direct_sum(path):
    g = TorusGrid(8, 16)
    u = random_grid_field(g, 9, band=3)
    if path == "z":
        a = lambda z, y, k, e: (2 + np.cos(z)) / (1 + k * k + e * e)
    else:
        a = lambda z, y, k, e: (2 + np.cos(2 * y)) / (1 + k * k + e * e)
    out = apply_pdo(a, u).values()
    zz, yy = np.meshgrid(g.z, g.y, indexing="ij")
    ref = np.zeros(zz.shape, complex)
    for p, n in enumerate(g.n):
        for q, m in enumerate(g.m):
            ref += np.exp(1j * (n * zz + m * yy)) * a(zz, yy, n, m) * u.coeffs[p, q]
    np.testing.assert_allclose(out, ref, atol=1e-12)


def test_multiplier_composition_two_ways():
    u = random_grid_field(G64, 11)
    a1 = lambda z, y, k, e: 1 / (1 + k * k + e * e)
    a2 = lambda z, y, k, e: np.sqrt(4 + k * k + e * e)
    two_steps = apply_pdo(a1, apply_pdo(a2, u))
    one_step = apply_pdo(lambda z, y, k, e: a1(z, y, k, e) * a2(z, y, k, e), u)
    np.testing.assert_allclose(two_steps.coeffs, one_step.coeffs, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(-3, 3), beta=st.floats(-3, 3))
def test_apply_pdo_linear(seed, alpha, beta):
    g = TorusGrid(16, 16)
    u, v = random_grid_field(g, seed), random_grid_field(g, seed + 1)
    a = modulated_resolvent(1)
    lhs = apply_pdo(a, u * alpha + v * beta)
    rhs = apply_pdo(a, u) * alpha + apply_pdo(a, v) * beta
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12 * (1 + abs(alpha) + abs(beta)))


# ----------------------------------------------------------------- pairings

def test_volume_of_torus():
    one = GridField.mode(G64, 0, 0)
    assert inner_x(one, one) == pytest.approx((2 * np.pi) ** 2, rel=1e-15)


def test_identity_form_positive():
    F = random_grid_field(G64, 2)
    q = quadratic_form(lambda x: x, F)
    assert q.real > 0 and q.imag == 0
    assert q.real == pytest.approx(F.norm() ** 2, rel=1e-14)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_dirichlet_energy_of_poisson(n):
    e = CircleField.mode(G256.Nz, n)
    q = quadratic_form(laplacian, poisson(e, G256)).real
    target = inner_z(dirichlet_to_neumann(e), e).real
    assert target == pytest.approx(2 * math.pi * 2 * n * math.tanh(math.pi * n), rel=1e-15)
    # truncated grid misses 4 n^2 tanh^2 sum_{|m| >= M} (n^2+m^2)^-1
    bound = 4 * n * n * math.tanh(math.pi * n) ** 2 * missing_tail_1(n, 128)
    assert 0 < target - q <= bound


def test_lattice_oracle_sanity():
    # the oracle itself: exact lattice sum against a brute force sum
    s = 2.0
    m = np.arange(-200000, 200001, dtype=float)
    brute = np.sum(1 / (s * s + m * m)) + 2 / 200000
    assert brute == pytest.approx(lattice_sum_1(s), rel=1e-10)
