import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathident.entmeas import (
    TWO_QUBIT_BASIS,
    MixedStateParams,
    NumericalValidityError,
    build_rho,
    concurrence_exact,
    concurrence_numeric,
    entanglement_report,
    ppt_criterion,
    ppt_eigenvalues_exact,
    spin_flip,
)
from pathident.opalg import Operator, hermitian_eigenvalues

from conftest import random_density


def proj(*amps):
    v = np.array(amps, dtype=complex)
    return np.outer(v, v.conj())


PHI_PLUS = proj(1, 0, 0, 1) / 2


def test_params_invariants():
    p = MixedStateParams(0.3, 0.4, 1.0)
    assert p.i_v == pytest.approx(0.7)
    assert p.coh_matrix("H", "H") == 1 and p.coh_matrix("H", "V") == 0.4
    assert p.phase("H", "V") == -1.0 and p.phase("V", "H") == 1.0
    for bad in [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.1), (0.5, 1.2)]:
        with pytest.raises(ValueError):
            MixedStateParams(*bad)


def test_build_rho_examples():
    np.testing.assert_array_equal(build_rho(MixedStateParams(1, 0)).matrix, proj(1, 0, 0, 0))
    for phi in (0, 1.3, -2):
        np.testing.assert_allclose(build_rho(MixedStateParams(0.5, 0, phi)).matrix,
                                   np.diag([0.5, 0, 0, 0.5]), atol=0)
    np.testing.assert_allclose(build_rho(MixedStateParams(0.5, 1, 0)).matrix, PHI_PLUS,
                               atol=1e-15)


def test_build_rho_coherence_entry():
    p = MixedStateParams(0.3, 0.7, 0.9)
    m = build_rho(p).matrix
    assert m[0, 3] == pytest.approx(np.exp(-0.9j) * 0.7 * math.sqrt(0.21), abs=1e-15)
    assert m[3, 0] == pytest.approx(np.conj(m[0, 3]))


def test_ppt_examples():
    ev, ent = ppt_criterion(build_rho(MixedStateParams(0.5, 0)), 1e-10)
    assert ev[-1] == pytest.approx(0, abs=1e-12) and not ent
    ev, ent = ppt_criterion(build_rho(MixedStateParams(0.5, 1)), 1e-10)
    assert ev[-1] == pytest.approx(-0.5, abs=1e-12) and ent
    ev, ent = ppt_criterion(build_rho(MixedStateParams(0.5, 0.32)), 1e-10)
    assert ev[-1] == pytest.approx(-0.16, abs=1e-12) and ent


def test_ppt_rejects_non_density():
    with pytest.raises(ValueError):
        ppt_criterion(Operator(TWO_QUBIT_BASIS, np.diag([1.0, 1, 0, 0])))
    with pytest.raises(ValueError):
        ppt_criterion(Operator(TWO_QUBIT_BASIS, np.diag([1.5, -0.5, 0, 0])))


def test_spin_flip_examples():
    np.testing.assert_allclose(spin_flip(Operator(TWO_QUBIT_BASIS, PHI_PLUS)).matrix, PHI_PLUS,
                               atol=1e-15)
    np.testing.assert_allclose(spin_flip(Operator(TWO_QUBIT_BASIS, proj(1, 0, 0, 0))).matrix,
                               proj(0, 0, 0, 1), atol=1e-15)


def test_spin_flip_rho4_concurrence_from_roots():
    rho = build_rho(MixedStateParams(0.5, 0.5, 0.7))
    ev = np.linalg.eigvals(rho.matrix @ spin_flip(rho).matrix).real
    lam = np.sort(np.sqrt(np.clip(ev, 0, None)))[::-1]
    assert lam[0] - lam[1:].sum() == pytest.approx(0.5, abs=1e-10)


def test_spin_flip_is_density(rng):
    out = spin_flip(Operator(TWO_QUBIT_BASIS, random_density(rng, 4)))
    assert out.is_hermitian(1e-12)
    assert abs(out.trace() - 1) < 1e-12
    assert hermitian_eigenvalues(out)[-1] > -1e-12


@pytest.mark.parametrize("i_h,coh,expect", [(1, 0, 0), (0.5, 0, 0), (0.5, 0.32, 0.32),
                                             (0.5, 0.5, 0.5), (0.5, 1, 1)])
def test_concurrence_table_states(i_h, coh, expect):
    p = MixedStateParams(i_h, coh, math.pi / 8)
    assert concurrence_numeric(build_rho(p)) == pytest.approx(expect, abs=1e-10)
    assert concurrence_exact(p) == pytest.approx(expect, abs=1e-15)


def test_concurrence_exact_derived():
    assert concurrence_exact(MixedStateParams(0.3, 1.0)) == pytest.approx(2 * math.sqrt(0.21))
    assert concurrence_exact(MixedStateParams(0.3, 1.0)) == pytest.approx(0.9165, abs=1e-4)
    assert concurrence_numeric(build_rho(MixedStateParams(0.3, 1.0))) == pytest.approx(
        2 * math.sqrt(0.21), abs=1e-10)


def test_concurrence_werner_oracle():
    # Werner state p|Phi+><Phi+| + (1-p) I/4 has C = max(0, (3p-1)/2)
    for w in (0.2, 1 / 3, 0.5, 0.9):
        rho = Operator(TWO_QUBIT_BASIS, w * PHI_PLUS + (1 - w) * np.eye(4) / 4)
        assert concurrence_numeric(rho) == pytest.approx(max(0, (3 * w - 1) / 2), abs=1e-10)


def test_concurrence_rejects_bad_eigenvalues(monkeypatch):
    rho = build_rho(MixedStateParams(0.5, 1))
    monkeypatch.setattr(np.linalg, "eigvals", lambda m: np.array([1, 0, 0, -1e-6]))
    with pytest.raises(NumericalValidityError):
        concurrence_numeric(rho)


def test_concurrence_grid():
    for i_h in np.linspace(0, 1, 11):
        for coh in (0, 0.25, 0.5, 0.75, 1):
            vals = []
            for phi in (0, math.pi / 4, math.pi):
                p = MixedStateParams(float(i_h), coh, phi)
                c = concurrence_numeric(build_rho(p))
                assert abs(c - concurrence_exact(p)) < 1e-10
                vals.append(c)
            assert max(vals) - min(vals) < 1e-10


def test_report_fields():
    rep = entanglement_report(MixedStateParams(0.5, 1), 1e-10)
    assert rep.is_entangled and rep.ppt_min_eigenvalue == pytest.approx(-0.5)
    d = rep.as_dict()
    assert d["verdict"] == "entangled"
    assert entanglement_report(MixedStateParams(1, 0)).as_dict()["verdict"] == "separable"


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(-math.pi, math.pi))
def test_family_properties(i_h, coh, phi):
    p = MixedStateParams(i_h, coh, phi)
    rep = entanglement_report(p, 1e-10)
    assert rep.is_entangled == (rep.ppt_min_eigenvalue < -1e-10)
    assert rep.is_entangled == (concurrence_exact(p) > 1e-10) or abs(concurrence_exact(p)) < 3e-10
    assert 0 <= rep.concurrence_numeric <= 1 and 0 <= rep.concurrence_exact <= 1
    np.testing.assert_allclose(rep.ppt_eigenvalues, ppt_eigenvalues_exact(p), atol=1e-10)
    assert abs(rep.concurrence_numeric - rep.concurrence_exact) < 1e-10
