import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import COARSE
from udwghost.errors import ConfigError, DegenerateStateError
from udwghost.kinematics import Detector, ModelConfig
from udwghost.register import (
    RegisterState,
    assemble_rho,
    basis_ket,
    check_density,
    delta_operator,
    delta_tilde,
    g_table,
    g_value,
    monopole_matrix,
    sign_vectors,
)
from udwghost.spdc import GexpCache, SpdcConfig

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_monopole_examples():
    assert np.array_equal(monopole_matrix(3.0, 0.0), PAULI_X)
    q = monopole_matrix(1.0, math.pi / 2)
    assert q[0, 1] == pytest.approx(-1j, abs=1e-16)
    assert q[1, 0] == pytest.approx(1j, abs=1e-16)
    assert q[0, 0] == 0 and q[1, 1] == 0


@given(st.floats(0, 10), st.floats(-10, 10))
def test_monopole_involution(omega, tau):
    q = monopole_matrix(omega, tau)
    assert np.allclose(q @ q, np.eye(2), atol=1e-15, rtol=0)


def test_delta_operator_examples():
    assert np.array_equal(delta_operator(1, 5.0, 2.0), np.eye(2))
    assert np.array_equal(delta_operator(-1, 2.0, 0.0), PAULI_X)
    d = delta_operator(-1, 1.0, 1.0)
    assert d[0, 1] == pytest.approx(cmath.exp(-1j), abs=1e-16)
    assert d[1, 0] == pytest.approx(cmath.exp(1j), abs=1e-16)
    with pytest.raises(ConfigError):
        delta_operator(0, 1.0, 0.0)


def test_delta_tilde_table():
    assert delta_tilde(1, 1) == 1
    assert delta_tilde(-1, -1) == -1
    assert delta_tilde(-1, 1) == 1
    assert delta_tilde(1, -1) == 1
    for j in (1, -1):
        assert sum(delta_tilde(j, k) for k in (1, -1)) == 1 + j


def test_basis_ordering():
    # detector 1 is the most significant qubit, g -> 0
    assert np.flatnonzero(basis_ket("eg")) == [2]
    assert np.flatnonzero(basis_ket("gge")) == [1]
    assert sign_vectors(2) == [(1, 1), (1, -1), (-1, 1), (-1, -1)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_coupling_g_values(n):
    one = lambda c: 1.0  # noqa: E731
    for l in sign_vectors(n):
        for j in sign_vectors(n):
            expect = math.prod((1 + x) / 2 for x in l) * math.prod((1 + x) / 2 for x in j)
            assert g_value(l, j, one) == expect


def test_single_detector_vacuum_pattern():
    g = 0.83
    gexp = lambda c: g ** ((c[0] / 2) ** 2)  # noqa: E731
    for l, j in itertools.product((1, -1), repeat=2):
        assert g_value((l,), (j,), gexp) == pytest.approx((1 + l * j + (l + j) * g) / 4, abs=1e-15)
    assert g_value((1,), (1,), gexp) == pytest.approx((1 + g) / 2)
    assert g_value((-1,), (-1,), gexp) == pytest.approx((1 - g) / 2)


@settings(max_examples=20)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_table_matches_literal_sum(n, seed):
    # any provider, even an asymmetric one, since this is pure algebra
    rng = np.random.default_rng(seed)
    table = {c: rng.uniform(0, 1) for c in itertools.product((-2, 0, 2), repeat=n)}
    provider = lambda c: table[tuple(c)]  # noqa: E731
    gt = g_table(n, provider)
    signs = sign_vectors(n)
    for a, l in enumerate(signs):
        for b, j in enumerate(signs):
            assert gt[a, b] == pytest.approx(g_value(l, j, provider), abs=1e-12)


@settings(max_examples=20)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_table_symmetric_for_even_provider(n, seed):
    rng = np.random.default_rng(seed)
    table = {}
    for c in itertools.product((-2, 0, 2), repeat=n):
        neg = tuple(-x for x in c)
        table[c] = table.get(neg, rng.uniform(0, 1))
    gt = g_table(n, lambda c: table[tuple(c)])
    assert np.max(np.abs(gt - gt.T)) <= 1e-12


def test_zero_coupling_rho_is_initial_projector(triple):
    dets = tuple(Detector(lam=0.0, omega=d.omega, worldline=d.worldline) for d in triple)
    cache = GexpCache(ModelConfig(), SpdcConfig(), dets, 0.4, COARSE)
    for init in (("g", "e", "g"), ("e", "e", "g")):
        rho = assemble_rho(RegisterState(init, 0.4), g_table(3, cache), dets)
        ket = basis_ket(init)
        assert np.array_equal(rho, np.outer(ket, ket))


def test_single_detector_excitation_formula():
    g = 0.9
    gt = g_table(1, lambda c: g ** ((c[0] / 2) ** 2))
    rho, tr = assemble_rho(RegisterState(("g",)), gt, [Detector()], return_trace=True)
    assert tr == pytest.approx(1.0, abs=1e-15)
    assert rho[1, 1].real == pytest.approx((1 - g) / 2, abs=1e-15)
    assert rho[0, 0].real == pytest.approx((1 + g) / 2, abs=1e-15)


def test_omega_irrelevant_at_tau_zero(pair):
    cache = GexpCache(ModelConfig(), SpdcConfig(), pair, 0.0, COARSE)
    gt = g_table(2, cache)
    reg = RegisterState(("e", "g"), 0.0)
    a = assemble_rho(reg, gt, [Detector(omega=1.0), Detector(omega=1.0)])
    b = assemble_rho(reg, gt, [Detector(omega=7.0), Detector(omega=7.0)])
    assert np.array_equal(a, b)


def test_assemble_errors():
    with pytest.raises(DegenerateStateError):
        assemble_rho(RegisterState(("g",)), np.zeros((2, 2)), [Detector()])
    with pytest.raises(ConfigError):
        assemble_rho(RegisterState(("g", "g")), np.eye(4), [Detector()])
    with pytest.raises(ConfigError):
        assemble_rho(RegisterState(("g",)), np.eye(4), [Detector()])
    with pytest.raises(ConfigError):
        RegisterState(("x",))
    with pytest.raises(ConfigError):
        RegisterState(())


def test_pair_state_valid(pair):
    cache = GexpCache(ModelConfig(), SpdcConfig(), pair, 0.0, COARSE)
    gt = g_table(2, cache)
    assert 0 < gt[0, 0] <= 1
    assert np.all(np.abs(gt) <= 1)
    for init in itertools.product("ge", repeat=2):
        rho, tr = assemble_rho(RegisterState(init), gt, pair, return_trace=True)
        assert check_density(rho, tr).ok


def test_check_density_flags_bad_states():
    assert not check_density(np.diag([1.1, -0.1])).ok
    assert not check_density(np.array([[0.5, 0.1], [0.0, 0.5]])).ok
    assert not check_density(np.diag([0.6, 0.6])).ok
    assert check_density(np.diag([0.25, 0.75])).ok
