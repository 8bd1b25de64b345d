import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathident.entmeas import TWO_QUBIT_BASIS, MixedStateParams, build_rho
from pathident.interf import (
    SOURCE_BASIS,
    final_rho,
    positivity_matrix,
    reduced_beta_explicit,
)
from pathident.opalg import (
    Basis,
    Ket,
    ModeLabel,
    Operator,
    StructureError,
    hermitian_eigenvalues,
    identity,
    is_psd,
    mode,
    partial_trace,
    partial_transpose,
    tensor,
)

from conftest import brute_partial_trace, random_density

QA = Basis.single([mode("alpha", 1, "H"), mode("alpha", 1, "V")])
QB = Basis.single([mode("beta", 1, "H"), mode("beta", 1, "V")])
SY = np.array([[0, -1j], [1j, 0]])


def phi_plus():
    return build_rho(MixedStateParams(0.5, 1.0, 0.0))


def test_mode_label_invariants():
    assert str(mode("loss", 0, "H")) == "H_0"
    with pytest.raises(ValueError):
        ModeLabel("loss", 1, "H")
    with pytest.raises(ValueError):
        ModeLabel("alpha", 0, "V")
    with pytest.raises(StructureError):
        Basis.single([mode("beta", 1, "H"), mode("beta", 1, "H")])


def test_operator_shape_checked():
    with pytest.raises(StructureError):
        Operator(QA, np.eye(3))
    with pytest.raises(StructureError):
        Operator(QA, np.ones((2, 3)))


def test_ket_allows_subnormalised_but_not_supernormalised():
    assert Ket(QA, [0.3, 0.4]).norm2() == pytest.approx(0.25)
    with pytest.raises(ValueError):
        Ket(QA, [1.0, 0.5])


def test_tensor_identity():
    out = tensor(identity(QA), identity(QB))
    np.testing.assert_array_equal(out.matrix, np.eye(4))
    assert out.basis == TWO_QUBIT_BASIS


def test_tensor_sigma_y_involution():
    yy = tensor(Operator(QA, SY), Operator(QB, SY))
    np.testing.assert_allclose((yy @ yy).matrix, np.eye(4), atol=1e-15)


def test_tensor_projector_product():
    h = Operator(QA, np.diag([1, 0]))
    v = Operator(QB, np.diag([0, 1]))
    out = tensor(h, v)
    expect = np.zeros((4, 4))
    expect[1, 1] = 1
    np.testing.assert_array_equal(out.matrix.real, expect)
    assert out.basis.states[1] == (mode("alpha", 1, "H"), mode("beta", 1, "V"))


def test_partial_trace_product_state(rng):
    a, b = random_density(rng, 2), random_density(rng, 2)
    out = partial_trace(tensor(Operator(QA, a), Operator(QB, b)), keep="beta")
    np.testing.assert_allclose(out.matrix, b, atol=1e-12)
    assert out.basis == QB


def test_partial_trace_bell_state_marginal():
    out = partial_trace(phi_plus(), keep="beta")
    np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_final_state_matches_closed_form(table_setup, table_state):
    p = table_state(1.0)
    rho_f = final_rho(p, table_setup)
    numeric = brute_partial_trace(rho_f.matrix, rho_f.basis, {"beta"})
    closed = reduced_beta_explicit(p, table_setup).matrix
    np.testing.assert_allclose(numeric, closed, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho_f, "beta").matrix, closed, atol=1e-12)


def test_partial_trace_rejects_non_product_basis():
    # alpha^j always pairs with beta^j in the two-source basis
    rho = Operator(SOURCE_BASIS, np.eye(8) / 8)
    with pytest.raises(StructureError):
        partial_trace(rho, keep="beta")
    with pytest.raises(StructureError):
        partial_transpose(rho, "alpha")


def test_partial_trace_preserves_trace(rng):
    big = Basis.single([mode("alpha", 1, "H"), mode("loss", 0, "V")]).product(QB).product(
        Basis.single([mode("beta", 2, "H"), mode("beta", 2, "V")]))
    # beta^1 x beta^2 mixes two beta slots; keep beta collects both
    rho = Operator(big, random_density(rng, 8))
    out = partial_trace(rho, keep="beta")
    assert out.dim == 4
    assert abs(out.trace() - 1) < 1e-12
    np.testing.assert_allclose(out.matrix, brute_partial_trace(rho.matrix, big, {"beta"}),
                               atol=1e-12)


def test_partial_transpose_separable_stays_psd(rng):
    a, b = random_density(rng, 2), random_density(rng, 2)
    rho = tensor(Operator(QA, a), Operator(QB, b))
    pt = partial_transpose(rho, "alpha")
    np.testing.assert_allclose(pt.matrix, np.kron(a.T, b), atol=1e-15)
    assert is_psd(pt)


def test_partial_transpose_bell_eigenvalues():
    ev = hermitian_eigenvalues(partial_transpose(phi_plus(), "alpha"))
    np.testing.assert_allclose(ev, [0.5, 0.5, 0.5, -0.5], atol=1e-12)
    assert not is_psd(partial_transpose(phi_plus(), "alpha"))


def test_partial_transpose_min_eigenvalue_rho3():
    # -coh sqrt(I_H I_V) = -0.32 * 0.5
    ev = hermitian_eigenvalues(partial_transpose(build_rho(MixedStateParams(0.5, 0.32)), "alpha"))
    assert ev[-1] == pytest.approx(-0.16, abs=1e-12)


def test_partial_transpose_involution_and_trace(rng):
    rho = Operator(TWO_QUBIT_BASIS, random_density(rng, 4))
    pt = partial_transpose(rho, "alpha")
    assert pt.is_hermitian(1e-12)
    assert abs(pt.trace() - rho.trace()) < 1e-15
    np.testing.assert_allclose(partial_transpose(pt, "alpha").matrix, rho.matrix, atol=0)
    assert hermitian_eigenvalues(pt).sum() == pytest.approx(1.0, abs=1e-12)


def test_hermitian_eigenvalues_basic():
    np.testing.assert_allclose(hermitian_eigenvalues(Operator(TWO_QUBIT_BASIS, np.eye(4) / 4)),
                               [0.25] * 4, atol=1e-15)
    with pytest.raises(ValueError):
        hermitian_eigenvalues(Operator(QA, [[0, 1], [0, 0]]))


def test_hermitian_eigenvalues_descending_and_sum(rng):
    rho = Operator(TWO_QUBIT_BASIS, random_density(rng, 4))
    ev = hermitian_eigenvalues(rho)
    assert np.all(np.diff(ev) <= 0)
    assert abs(ev.sum() - rho.trace().real) < 1e-10


def test_positivity_matrix_eigenvalues():
    assert hermitian_eigenvalues(positivity_matrix(1.0, 1.0, 1.0))[-1] >= -1e-10
    assert hermitian_eigenvalues(positivity_matrix(0.5, 1.0, 1.0))[-1] < 0
    assert not is_psd(positivity_matrix(0.5, 0.6, 0.5))


def test_is_psd_identity():
    assert is_psd(identity(QA))


_entry = st.floats(-1, 1, allow_nan=False)


@st.composite
def density_2x2(draw):
    g = np.array([[complex(draw(_entry), draw(_entry)) for _ in range(2)] for _ in range(2)])
    m = g @ g.conj().T + 1e-3 * np.eye(2)
    return m / np.trace(m).real


@settings(max_examples=60, deadline=None)
@given(density_2x2(), density_2x2())
def test_partial_trace_inverts_tensor(a, b):
    rho = tensor(Operator(QA, a), Operator(QB, b))
    np.testing.assert_allclose(partial_trace(rho, "alpha").matrix, a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, "beta").matrix, b, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(-math.pi, math.pi))
def test_pt_spectrum_of_family(i_h, coh, phi):
    p = MixedStateParams(i_h, coh, phi)
    ev = hermitian_eigenvalues(partial_transpose(build_rho(p), "alpha"))
    k = coh * math.sqrt(i_h * (1 - i_h))
    np.testing.assert_allclose(ev, sorted([i_h, 1 - i_h, k, -k], reverse=True), atol=1e-10)
