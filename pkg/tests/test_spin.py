import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from purimetry import (
    SpinSpace,
    angular_momentum_operators,
    mz_unitary,
    parity_operator,
    rotation_operator,
    spin_coherent_state,
)

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def test_space_bookkeeping():
    s = SpinSpace(5)
    assert s.dim == 6 and s.two_j == 5 and s.j == 2.5
    assert np.array_equal(s.m, np.arange(-2.5, 3.0))
    assert SpinSpace.from_dim(6) == s
    with pytest.raises(ValueError):
        SpinSpace(-1)


def test_small_matrices():
    ops = angular_momentum_operators(SpinSpace(2))
    assert np.array_equal(np.diag(ops.jz).real, [-1, 0, 1])
    jy = angular_momentum_operators(SpinSpace(1)).jy
    assert np.allclose(jy, [[0, 0.5j], [-0.5j, 0]], atol=1e-15)
    empty = angular_momentum_operators(SpinSpace(0))
    assert empty.jx.shape == (1, 1) and not empty.jx.any()


def test_raising_operator_entries():
    space = SpinSpace(7)
    ops = angular_momentum_operators(space)
    j = space.j
    for k, m in enumerate(space.m[:-1]):
        assert ops.jplus[k + 1, k] == pytest.approx(np.sqrt(j * (j + 1) - m * (m + 1)))
    assert np.allclose(ops.jminus, ops.jplus.conj().T)


@pytest.mark.parametrize("n", [1, 2, 7, 50, 200])
def test_su2_algebra_and_casimir(n):
    space = SpinSpace(n)
    o = angular_momentum_operators(space)
    for a, b, c in ((o.jx, o.jy, o.jz), (o.jy, o.jz, o.jx), (o.jz, o.jx, o.jy)):
        assert np.max(np.abs(a @ b - b @ a - 1j * c)) <= 1e-12 * max(1, n)
    casimir = o.jx @ o.jx + o.jy @ o.jy + o.jz @ o.jz
    j = space.j
    assert np.max(np.abs(casimir - j * (j + 1) * np.eye(space.dim))) <= 1e-12 * n * n


def test_coherent_state_special_values():
    top = spin_coherent_state(SpinSpace(6), 0.0, 1.3)
    assert abs(top[-1]) == pytest.approx(1.0) and np.allclose(top[:-1], 0)
    half = spin_coherent_state(SpinSpace(1), np.pi / 2, 0.0)
    assert np.allclose(half, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_coherent_state_matches_matrix_exponential():
    space = SpinSpace(20)
    o = angular_momentum_operators(space)
    top = np.zeros(space.dim)
    top[-1] = 1
    # scipy's scaling-and-squaring Pade expm as oracle
    ref = expm(-1j * 0.7 * o.jz) @ expm(-1j * 1.1 * o.jy) @ top
    assert np.max(np.abs(spin_coherent_state(space, 1.1, 0.7) - ref)) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(n=st.sampled_from([1, 5, 20, 100]), theta=angles, azimuth=angles)
def test_coherent_state_is_rotated_top_state(n, theta, azimuth):
    space = SpinSpace(n)
    r = rotation_operator(space, theta, azimuth)
    assert np.max(np.abs(spin_coherent_state(space, theta, azimuth) - r[:, -1])) <= 1e-10
    assert np.linalg.norm(spin_coherent_state(space, theta, azimuth)) == pytest.approx(1, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(theta=angles, azimuth=angles)
def test_rotation_unitary_and_frame_change(theta, azimuth):
    # with R = exp(-i az Jz) exp(-i th Jy) these hold for R J R^dag
    space = SpinSpace(9)
    o = angular_momentum_operators(space)
    r = rotation_operator(space, theta, azimuth)
    assert np.max(np.abs(r.conj().T @ r - np.eye(space.dim))) <= 1e-12
    ct, st_, cp, sp = np.cos(theta), np.sin(theta), np.cos(azimuth), np.sin(azimuth)
    assert np.max(np.abs(r @ o.jy @ r.conj().T - (-sp * o.jx + cp * o.jy))) <= 1e-12
    expected_x = ct * cp * o.jx + ct * sp * o.jy - st_ * o.jz
    assert np.max(np.abs(r @ o.jx @ r.conj().T - expected_x)) <= 1e-12
    # and in the Heisenberg direction
    assert np.max(np.abs(r.conj().T @ o.jx @ r - (cp * (ct * o.jx + st_ * o.jz) - sp * o.jy))) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(theta=angles, azimuth=angles)
def test_coherent_state_moments(theta, azimuth):
    space = SpinSpace(12)
    o = angular_momentum_operators(space)
    v = spin_coherent_state(space, theta, azimuth)
    j = space.j

    def ev(op):
        return np.vdot(v, op @ v).real

    assert ev(o.jx) == pytest.approx(j * np.sin(theta) * np.cos(azimuth), abs=1e-11)
    assert ev(o.jy) == pytest.approx(j * np.sin(theta) * np.sin(azimuth), abs=1e-11)
    assert ev(o.jz) == pytest.approx(j * np.cos(theta), abs=1e-11)
    jx2 = j / 2 * (1 + (2 * j - 1) * np.sin(theta) ** 2 * np.cos(azimuth) ** 2)
    assert ev(o.jx @ o.jx) == pytest.approx(jx2, abs=1e-10)


def test_rotation_identity():
    assert np.allclose(rotation_operator(SpinSpace(4), 0, 0), np.eye(5), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 11])
def test_parity_identities(n):
    space = SpinSpace(n)
    o = angular_momentum_operators(space)
    p = parity_operator(space)
    assert np.allclose(p @ p, np.eye(space.dim))
    assert np.allclose(p @ o.jy @ p, -o.jy)
    assert np.allclose(p @ o.jx + o.jx @ p, 0)
    assert np.allclose(p @ o.jz, o.jz @ p)


def test_parity_n2():
    assert np.array_equal(np.diag(parity_operator(SpinSpace(2))).real, [-1, 1, -1])


def test_mz_unitary():
    space = SpinSpace(10)
    o = angular_momentum_operators(space)
    assert np.allclose(mz_unitary(space, 0.0), np.eye(space.dim), atol=1e-14)
    u = mz_unitary(space, 0.3)
    assert np.max(np.abs(u.conj().T @ o.jz @ u - (np.cos(0.3) * o.jz - np.sin(0.3) * o.jx))) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(a=angles, b=angles)
def test_mz_unitary_group_law(a, b):
    space = SpinSpace(6)
    lhs = mz_unitary(space, a) @ mz_unitary(space, b)
    assert np.max(np.abs(lhs - mz_unitary(space, a + b))) <= 1e-12
