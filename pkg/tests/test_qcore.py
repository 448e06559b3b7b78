import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptqed.qcore import (
    DOWN, UP, DensityMatrix, LayoutError, Operator, SpaceLayout, StateError, annihilation,
    coherent, commutator, compose, dagger, expectation, fock, number, partial_trace, pauli,
    qubit, resonator, scale,
)
from conftest import random_density


def test_annihilation_two_level():
    layout = SpaceLayout.of(resonator(2))
    assert np.array_equal(annihilation(layout, 0).data, [[0, 1], [0, 0]])


def test_number_diagonal():
    layout = SpaceLayout.of(resonator(7))
    a = annihilation(layout, 0)
    n = (a.dag() @ a).data
    assert np.allclose(np.diag(n), np.arange(7), atol=0)
    assert np.allclose(n, number(layout, 0).data)


def test_commutator_truncation_artifact():
    layout = SpaceLayout.of(resonator(10))
    a = annihilation(layout, 0)
    c = commutator(a, a.dag()).data
    expected = np.eye(10)
    expected[9, 9] = -9
    # off-diagonal entries vanish exactly; sqrt(n)**2 rounds in the last bit
    assert np.array_equal(c - np.diag(np.diag(c)), np.zeros((10, 10)))
    assert np.max(np.abs(c - expected)) < 1e-13


def test_annihilation_errors():
    layout = SpaceLayout.of(resonator(4), qubit())
    with pytest.raises(LayoutError):
        annihilation(layout, 1)
    with pytest.raises(LayoutError):
        annihilation(layout, 2)


def test_embedding_order_and_dimension():
    layout = SpaceLayout.of(resonator(3), qubit(), resonator(4))
    assert layout.dim == 24
    a = annihilation(layout, 2)
    assert a.data.shape == (24, 24)
    assert np.allclose(a.data, np.kron(np.eye(6), np.diag(np.sqrt([1, 2, 3]), 1)))


def test_pauli_algebra():
    layout = SpaceLayout.of(qubit())
    sp, sm = pauli(layout, 0, "plus"), pauli(layout, 0, "minus")
    sx, sy, sz = (pauli(layout, 0, k) for k in "xyz")
    assert np.allclose((sp @ sm + sm @ sp).data, np.eye(2))
    assert np.allclose(sx.data, (sp + sm).data)
    assert np.allclose(commutator(sz, sp).data, 2 * sp.data)
    assert np.allclose(commutator(sz, sm).data, -2 * sm.data)
    assert np.allclose(commutator(sx, sy).data, 2j * sz.data)
    # sigma_+ = |up><down| and sigma_z|up> = +|up>
    assert np.allclose(sp.data @ DOWN, UP)
    assert np.allclose(sz.data @ UP, UP)


def test_pauli_errors():
    layout = SpaceLayout.of(resonator(3), qubit())
    with pytest.raises(LayoutError):
        pauli(layout, 0, "x")
    with pytest.raises(ValueError):
        pauli(layout, 1, "w")


def test_compose_layout_mismatch():
    a = SpaceLayout.of(resonator(3)).identity()
    b = SpaceLayout.of(resonator(4)).identity()
    with pytest.raises(LayoutError):
        compose(a, b, "add")
    with pytest.raises(ValueError):
        compose(a, a, "div")


def test_operator_identities(rng):
    layout = SpaceLayout.of(resonator(4), qubit())
    a = Operator(layout, rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    assert np.array_equal(commutator(a, a).data, np.zeros((8, 8)))
    assert np.allclose(dagger(scale(a, 1j)).data, scale(dagger(a), -1j).data)
    assert np.array_equal(dagger(dagger(a)).data, a.data)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mul_associativity(seed):
    rng = np.random.default_rng(seed)
    layout = SpaceLayout.of(resonator(4), qubit())
    a, b, c = (Operator(layout, rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))) for _ in range(3))
    assert np.max(np.abs(((a @ b) @ c).data - (a @ (b @ c)).data)) < 1e-12


def test_operators_are_immutable():
    op = SpaceLayout.of(resonator(3)).identity()
    with pytest.raises(ValueError):
        op.data[0, 0] = 2


def test_expectations():
    layout = SpaceLayout.of(resonator(5), qubit())
    n = number(layout, 0)
    assert expectation(DensityMatrix.product(layout, [fock(5, 0), DOWN]), n) == 0
    assert expectation(DensityMatrix.product(layout, [fock(5, 0), UP]), pauli(layout, 1, "z")) == 1
    mixed = DensityMatrix.maximally_mixed(layout)
    traceless = n - (np.trace(n.data) / layout.dim) * layout.identity()
    assert abs(expectation(mixed, traceless)) < 1e-12


def test_density_validation():
    layout = SpaceLayout.of(qubit())
    with pytest.raises(StateError):
        DensityMatrix(layout, np.diag([0.5, 0.6]))
    with pytest.raises(StateError):
        DensityMatrix(layout, np.diag([1.2, -0.2]))
    with pytest.raises(StateError):
        DensityMatrix(layout, np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_partial_trace_product(rng):
    layout = SpaceLayout.of(resonator(3), qubit())
    ra, rb = random_density(3, rng), random_density(2, rng)
    rho = DensityMatrix(layout, np.kron(ra, rb))
    assert np.max(np.abs(partial_trace(rho, {0}).data - ra)) < 1e-12
    assert np.max(np.abs(partial_trace(rho, {1}).data - rb)) < 1e-12


def test_partial_trace_bell():
    layout = SpaceLayout.of(qubit(), qubit())
    psi = (np.kron(UP, DOWN) + np.kron(DOWN, UP)) / np.sqrt(2)
    rho = DensityMatrix.from_ket(layout, psi)
    assert np.allclose(partial_trace(rho, {0}).data, np.eye(2) / 2, atol=1e-12)
    with pytest.raises(LayoutError):
        partial_trace(rho, set())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([{0}, {1}, {2}, {0, 2}, {1, 2}]))
def test_partial_trace_preserves_trace(seed, keep):
    rng = np.random.default_rng(seed)
    layout = SpaceLayout.of(resonator(3), qubit(), resonator(2))
    rho = DensityMatrix(layout, random_density(12, rng))
    red = partial_trace(rho, keep)
    assert abs(np.trace(red.data) - 1) < 1e-12
    assert red.layout.dim == int(np.prod([layout.dims[i] for i in keep]))


def test_coherent_state_mean():
    layout = SpaceLayout.of(resonator(30))
    beta = 0.3 + 0.2j
    rho = DensityMatrix.from_ket(layout, coherent(30, beta))
    assert abs(expectation(rho, annihilation(layout, 0)) - beta) < 1e-12
