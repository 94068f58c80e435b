import numpy as np
import pytest
from conftest import random_divfree, random_real

from sqgci.spectral.dump import read_coeffs_csv, read_field, write_coeffs_csv, write_field
from sqgci.spectral.fields import SpectralField, SymTensorField, VectorField, inverse, transform
from sqgci.spectral.grid import GridSpec, grid_for_box
from sqgci.spectral.littlewood_paley import (LowPass, MeanOnly, RemoveMean, Shell, populated_shells, project,
                                             shell_symbol)
from sqgci.spectral.norms import LInf, Lp, SobolevHomog, l2_coeff_norm, lp_norm, norm, sobolev_sq
from sqgci.spectral.operators import (FractionalLaplacian, PerpRiesz, apply_symbol, grad, inverse_divergence, lam,
                                      partial, perp_div, perp_grad, tensor_div)
from sqgci.spectral.operators import MeanError
from sqgci.spectral.products import AliasError, multiply

G16 = GridSpec(16)


def sin1(n=16, a=1.0):
    return SpectralField.from_modes(GridSpec(n), {(1, 0): -0.5j * a, (-1, 0): 0.5j * a})


def cos1(n=16, a=1.0, m=1):
    return SpectralField.from_modes(GridSpec(n), {(m, 0): 0.5 * a, (-m, 0): 0.5 * a})


def direct_samples(f: SpectralField, n: int) -> np.ndarray:
    """Evaluate the trigonometric sum mode by mode (independent of FFTs)."""
    x = np.arange(n) / n
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    out = np.zeros((n, n), np.complex128)
    k = f.grid.freqs
    for i1, i2 in zip(*np.nonzero(f.coeffs)):
        out += f.coeffs[i1, i2] * np.exp(2j * np.pi * (k[i1] * X1 + k[i2] * X2))
    return out


# grid ----------------------------------------------------------------------

def test_grid_invariants():
    with pytest.raises(ValueError):
        GridSpec(12)
    with pytest.raises(ValueError):
        GridSpec(4)
    with pytest.raises(ValueError):
        GridSpec(16, 6.0)
    assert GridSpec(16).lambda_max == 4.0
    assert grid_for_box(-4, 3) == 8 and grid_for_box(-4, 4) == 16


# transform -----------------------------------------------------------------

def test_transform_constant_and_single_mode():
    f = transform(np.full((16, 16), 3.5))
    assert f.real_flag
    expect = np.zeros((16, 16))
    expect[0, 0] = 3.5
    np.testing.assert_allclose(f.coeffs, expect, atol=1e-15)
    x = np.arange(16) / 16
    s = np.sin(2 * np.pi * x)[:, None] * np.ones((1, 16))
    g = transform(s)
    assert abs(g.coeff(1, 0) - (-0.5j)) < 1e-15 and abs(g.coeff(-1, 0) - 0.5j) < 1e-15
    nz = np.abs(g.coeffs) > 1e-14
    assert nz.sum() == 2


def test_transform_roundtrip_and_direct_evaluation(rng):
    f = random_real(rng, 32, 9)
    a = inverse(f)
    assert np.isrealobj(a)
    np.testing.assert_allclose(a, direct_samples(f, 32).real, atol=1e-12)
    back = transform(a)
    assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-13 * np.max(np.abs(f.coeffs))


def test_hermitian_symmetry_enforced(rng):
    c = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    f = SpectralField(GridSpec(8), c, True)
    idx = (-np.arange(8)) % 8
    np.testing.assert_array_equal(f.coeffs, np.conj(f.coeffs[idx][:, idx]))


def test_parseval(rng):
    f = random_real(rng, 32, 10)
    a = inverse(f)
    assert abs(np.sqrt(np.mean(a * a)) - l2_coeff_norm(f)) <= 1e-12 * l2_coeff_norm(f)


def test_on_grid_refuses_lossy_truncation(rng):
    f = random_real(rng, 32, 10)
    with pytest.raises(ValueError):
        f.on_grid(16)
    g = random_real(rng, 32, 3)
    np.testing.assert_array_equal(g.on_grid(8).on_grid(32).coeffs, g.coeffs)


# symbols -------------------------------------------------------------------

@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_lambda_gamma_on_base_mode(gamma):
    A = 0.7
    out = apply_symbol(sin1(a=A), FractionalLaplacian(gamma))
    np.testing.assert_allclose(out.coeffs, (2 * np.pi) ** gamma * sin1(a=A).coeffs, rtol=1e-15)


def test_symbols_zero_field_and_mean_ignored():
    z = SpectralField.zeros(G16)
    assert not np.any(lam(z, -3.0).coeffs)
    c = SpectralField.from_modes(G16, {(0, 0): 5.0})
    assert not np.any(lam(c, -1.0).coeffs) and not np.any(lam(c, 2.0).coeffs)


def test_perp_riesz_of_sine():
    r = apply_symbol(sin1(), PerpRiesz())
    assert not np.any(r.x.coeffs)
    np.testing.assert_allclose(r.y.coeffs, cos1().coeffs, atol=1e-16)


def test_perp_conventions():
    # grad_perp f = (-d2 f, d1 f); grad_perp . F = d1 F2 - d2 F1
    f = SpectralField.from_modes(G16, {(1, 2): 1.0, (-1, -2): 1.0})
    g = perp_grad(f)
    np.testing.assert_allclose(g.x.coeffs, -partial(f, 2).coeffs)
    np.testing.assert_allclose(g.y.coeffs, partial(f, 1).coeffs)
    F = VectorField(f, 2.0 * f)
    np.testing.assert_allclose(perp_div(F).coeffs, (partial(2.0 * f, 1) - partial(f, 2)).coeffs)
    assert abs(partial(f, 1).coeff(1, 2) - 2j * np.pi) < 1e-14


def test_lambda_self_adjoint(rng):
    f, g = random_real(rng, 32, 8), random_real(rng, 32, 8)
    lhs = np.vdot(lam(f, 1.0).coeffs, g.coeffs)
    rhs = np.vdot(f.coeffs, lam(g, 1.0).coeffs)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


# inverse divergence --------------------------------------------------------

def test_inverse_divergence_example():
    u = VectorField(SpectralField.zeros(G16), cos1(a=2 * np.pi))
    R = inverse_divergence(u)
    assert np.max(np.abs(R.c11.coeffs)) < 1e-15 and np.max(np.abs(R.c22.coeffs)) < 1e-15
    np.testing.assert_allclose(R.c12.coeffs, sin1().coeffs, atol=1e-15)
    back = tensor_div(R)
    np.testing.assert_allclose(back.y.coeffs, u.y.coeffs, atol=1e-14)


def test_inverse_divergence_random_divfree(rng):
    for _ in range(5):
        u = random_divfree(rng, 32, 10)
        back = tensor_div(inverse_divergence(u))
        err = max(np.max(np.abs(a.coeffs - b.coeffs)) for a, b in zip(back.components, u.components))
        assert err <= 1e-12 * np.max(np.abs(u.x.coeffs))


def test_inverse_divergence_kills_gradients(rng):
    h = random_real(rng, 32, 8)
    back = tensor_div(inverse_divergence(grad(h)))
    assert max(np.max(np.abs(c.coeffs)) for c in back.components) < 1e-12


def test_inverse_divergence_zero_and_mean():
    z = VectorField.zeros(G16)
    assert all(not np.any(c.coeffs) for c in inverse_divergence(z).components)
    u = VectorField(SpectralField.from_modes(G16, {(0, 0): 1.0}), SpectralField.zeros(G16))
    with pytest.raises(MeanError):
        inverse_divergence(u)


def test_tensor_entry_indexing():
    a, b, c = (SpectralField.from_modes(G16, {(i, 0): 1.0, (-i, 0): 1.0}) for i in (1, 2, 3))
    R = SymTensorField(a, b, c)
    assert R.entry(1, 2) is R.entry(2, 1) is b
    assert R.entry(1, 1) is a and R.entry(2, 2) is c
    with pytest.raises(IndexError):
        R.entry(0, 1)


# projectors ----------------------------------------------------------------

def test_shell_zero_keeps_base_mode():
    np.testing.assert_array_equal(project(sin1(), Shell(0)).coeffs, sin1().coeffs)
    assert populated_shells(sin1()) == [0]


def test_remove_mean_and_mean_only(rng):
    f = random_real(rng, 16, 5)
    g = f + SpectralField.from_modes(G16, {(0, 0): 2.0})
    np.testing.assert_array_equal(project(g, RemoveMean()).coeffs, f.coeffs)
    assert project(g, MeanOnly()).coeff(0, 0) == 2.0


def test_lowpass_plateau_and_support():
    f = SpectralField.from_modes(GridSpec(128), {(4, 0): 1.0, (-4, 0): 1.0, (32, 0): 1.0, (-32, 0): 1.0})
    out = project(f, LowPass(128))
    assert out.coeff(4, 0) == 1.0 and out.coeff(32, 0) == 0.0


def test_shell_partition_of_unity():
    r = np.linspace(1.0, 300.0, 20001)
    total = sum(shell_symbol(r, j) for j in range(12))
    np.testing.assert_allclose(total, 1.0, atol=1e-15)
    # adjacent-only overlap
    for j in range(8):
        assert not np.any((shell_symbol(r, j) > 0) & (shell_symbol(r, j + 2) > 0))


def test_shell_partition_on_fields(rng):
    f = random_real(rng, 64, 21, mean=True)
    acc = project(f, MeanOnly())
    for j in range(7):
        acc = acc + project(f, Shell(j))
    assert np.max(np.abs(acc.coeffs - f.coeffs)) < 1e-15


@pytest.mark.parametrize("p", [1.0, 2.0, np.inf])
def test_lowpass_lp_bound_stable_across_lambda(p):
    rng = np.random.default_rng(7)
    ratios = []
    for L in (64, 256, 1024):
        n = max(512, L // 4)
        f = random_real(rng, n, L // 8 if L // 8 < n // 2 else n // 2 - 1)
        ratios.append(lp_norm(project(f, LowPass(L)), p) / lp_norm(f, p))
    assert max(ratios) <= 2.0 * min(ratios)


# norms ---------------------------------------------------------------------

def test_lp_norm_of_base_mode():
    A = 0.3
    # rectangle rule on the default quadrature grid, evaluated in one dimension
    N = 2048
    rule = A * np.mean(np.abs(np.sin(2 * np.pi * np.arange(N) / N)))
    assert abs(lp_norm(sin1(a=A), 1.0) - rule) < 1e-11 * rule  # roundoff of a 2048^2 sum
    # second-order accuracy across the zeros of the sine
    assert abs(rule - 2 * A / np.pi) < (2 * A / np.pi) * np.pi ** 2 / (3 * N * N) * 1.01
    assert abs(lp_norm(sin1(a=1e-6), 1.0) - 2e-6 / np.pi) < 1e-12
    assert abs(norm(sin1(a=A), LInf()) - A) < 1e-12
    assert abs(norm(sin1(a=A), Lp(2.0)) - A / np.sqrt(2)) < 1e-13


@pytest.mark.parametrize("s", [-5.0, -4.0, 0.0, 1.5, 3.0])
def test_sobolev_of_base_mode(s):
    assert abs(norm(sin1(), SobolevHomog(s)) - 1 / np.sqrt(2)) < 1e-15


def test_sobolev_oracle(rng):
    f = random_real(rng, 32, 9)
    k = f.grid.freqs
    tot = 0.0
    for i1 in range(32):
        for i2 in range(32):
            r2 = k[i1] ** 2 + k[i2] ** 2
            if r2:
                tot += r2 ** -4.0 * abs(f.coeffs[i1, i2]) ** 2
    assert abs(sobolev_sq(f, -4.0) - tot) <= 1e-13 * tot


def test_tensor_sobolev_uses_operator_norm(rng):
    a, b, c = (random_real(rng, 16, 5) for _ in range(3))
    R = SymTensorField(a, b, c)
    k = G16.freqs
    tot = 0.0
    for i1 in range(16):
        for i2 in range(16):
            r2 = k[i1] ** 2 + k[i2] ** 2
            if r2:
                M = np.array([[a.coeffs[i1, i2], b.coeffs[i1, i2]], [b.coeffs[i1, i2], c.coeffs[i1, i2]]])
                tot += r2 ** -2.0 * np.linalg.norm(M, 2) ** 2
    assert abs(sobolev_sq(R, -2.0) - tot) <= 1e-12 * tot


def test_norms_of_zero_and_bad_p():
    z = SpectralField.zeros(G16)
    for kind in (SobolevHomog(-4.0), Lp(1.0), Lp(1.5), LInf()):
        assert norm(z, kind) == 0.0
    with pytest.raises(ValueError):
        Lp(0.5)
    with pytest.raises(ValueError):
        lp_norm(z, 0.9)


# products ------------------------------------------------------------------

def test_product_double_angle():
    out = multiply(sin1(), sin1())
    expect = SpectralField.from_modes(G16, {(0, 0): 0.5, (2, 0): -0.25, (-2, 0): -0.25})
    np.testing.assert_allclose(out.coeffs, expect.coeffs, atol=1e-16)


def test_product_identity_and_commutative(rng):
    f, g = random_real(rng, 32, 7), random_real(rng, 32, 6)
    one = SpectralField.from_modes(GridSpec(32), {(0, 0): 1.0})
    np.testing.assert_allclose(multiply(f, one).coeffs, f.coeffs, atol=1e-15)
    np.testing.assert_allclose(multiply(f, g).coeffs, multiply(g, f).coeffs, atol=1e-15)


def test_product_against_direct_convolution(rng):
    f = SpectralField(GridSpec(16), np.zeros((16, 16)), True)
    g = SpectralField(GridSpec(16), np.zeros((16, 16)), True)
    for F in (f, g):
        for _ in range(4):
            j = tuple(rng.integers(-5, 6, size=2))
            v = complex(*rng.normal(size=2))
            F.coeffs[j[0] % 16, j[1] % 16] += v
            F.coeffs[-j[0] % 16, -j[1] % 16] += np.conj(v)
    out = multiply(f, g, 32)
    expect = {}
    k = np.fft.fftfreq(16, 1 / 16).astype(int)
    for a1, a2 in zip(*np.nonzero(f.coeffs)):
        for b1, b2 in zip(*np.nonzero(g.coeffs)):
            key = (k[a1] + k[b1], k[a2] + k[b2])
            expect[key] = expect.get(key, 0) + f.coeffs[a1, a2] * g.coeffs[b1, b2]
    for (j1, j2), v in expect.items():
        assert abs(out.coeff(j1, j2) - v) < 1e-14
    support = {key for key, v in expect.items() if abs(v) > 0}
    k32 = out.grid.freqs
    for i1, i2 in zip(*np.nonzero(np.abs(out.coeffs) > 1e-14)):
        assert (k32[i1], k32[i2]) in support


def test_product_alias_error(rng):
    f = random_real(rng, 32, 12)
    with pytest.raises(AliasError):
        multiply(f, f, 32)


# dumps ---------------------------------------------------------------------

def test_binary_dump_roundtrip(tmp_path, rng):
    v = random_divfree(rng, 16, 5)
    p = tmp_path / "v.sqgf"
    write_field(p, v)
    raw = p.read_bytes()
    assert raw[:4] == b"SQGF" and int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:12], "little") == 16 and raw[12] == 1
    back = read_field(p)
    for a, b in zip(back.components, v.components):
        np.testing.assert_allclose(a.coeffs, b.coeffs, atol=1e-15)


def test_csv_dump_roundtrip(tmp_path, rng):
    f = random_real(rng, 16, 4)
    p = tmp_path / "f.csv"
    rows = write_coeffs_csv(p, f)
    assert rows == int(np.count_nonzero(f.coeffs))
    assert p.read_text().splitlines()[0] == "j1,j2,re,im"
    np.testing.assert_array_equal(read_coeffs_csv(p, 16).coeffs, f.coeffs)
