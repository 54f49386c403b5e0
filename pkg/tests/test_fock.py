import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polfock.errors import TruncationError
from polfock.fock import (Displacement, FockSpace, displacement_overlaps, ladder_matrices,
                          overlap_matrix, pfs_derivative_coupling, quadrature_matrix)
from polfock.oracle import fc_overlap_quadrature

W = 0.05


def test_fock_space_validation():
    with pytest.raises(ValueError):
        FockSpace(W, 1)
    with pytest.raises(ValueError):
        FockSpace(-1.0, 4)


def test_ladder_commutator():
    b_dag, b, number = ladder_matrices(FockSpace(W, 10))
    comm = b @ b_dag - b_dag @ b
    # exact except in the last level, where truncation cuts b^+
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert np.allclose(b_dag @ b, number)


def test_quadrature_matrix_is_sum_of_ladders():
    b_dag, b, _ = ladder_matrices(FockSpace(W, 7))
    assert np.allclose(quadrature_matrix(7), b_dag + b)


def test_zero_displacement_is_identity():
    assert np.array_equal(overlap_matrix(FockSpace(W, 6), 0.0), np.eye(6))
    assert np.allclose(displacement_overlaps(0.0, 6), np.eye(6), atol=1e-15)


@given(st.floats(-4.0, 4.0))
def test_vacuum_overlap_is_gaussian(lam):
    S = displacement_overlaps(lam, 3)
    assert S[0, 0] == pytest.approx(math.exp(-0.5 * lam ** 2), abs=1e-14)


@given(st.floats(-3.0, 3.0), st.integers(0, 12))
def test_first_column_is_poisson_amplitude(lam, m):
    # <m|D(lam)|0> = exp(-lam^2/2) lam^m / sqrt(m!)
    S = displacement_overlaps(lam, 13, 1)
    ref = math.exp(-0.5 * lam ** 2) * lam ** m / math.sqrt(math.factorial(m))
    assert S[m, 0] == pytest.approx(ref, abs=1e-13)


@given(st.floats(-3.0, 3.0), st.integers(0, 20), st.integers(0, 20))
def test_matches_quadrature(lam, m, n):
    S = displacement_overlaps(lam, 21)
    assert S[m, n] == pytest.approx(fc_overlap_quadrature(W, lam, m, n), abs=1e-11)


@given(st.floats(-3.0, 3.0))
def test_transpose_reverses_displacement(lam):
    assert np.allclose(displacement_overlaps(lam, 15).T, displacement_overlaps(-lam, 15),
                       atol=1e-14)


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_columns_normalized_with_extra_rows(lam):
    n = 30
    margin = 30 + 4 * math.ceil(lam ** 2) + 8 * math.ceil(lam)
    S = displacement_overlaps(lam, n + margin, n)
    assert np.allclose(np.sum(S ** 2, axis=0), 1.0, atol=1e-12)
    assert np.allclose(S.T @ S, np.eye(n), atol=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_group_law(a, b):
    # real displacements commute: D(a) D(b) = D(a + b)
    big = 60
    prod = displacement_overlaps(a, big) @ displacement_overlaps(b, big)
    assert np.allclose(prod[:12, :12], displacement_overlaps(a + b, 12), atol=1e-12)


def test_vectorized_over_lambda():
    lam = np.array([[0.1, 0.7], [1.3, -2.0]])
    S = displacement_overlaps(lam, 5, 4)
    assert S.shape == (2, 2, 5, 4)
    assert np.allclose(S[1, 0], displacement_overlaps(1.3, 5, 4))


def test_truncation_guard():
    with pytest.raises(TruncationError):
        displacement_overlaps(11.0, 4)
    with pytest.raises(TruncationError):
        displacement_overlaps(np.nan, 4)
    with pytest.raises(TruncationError):
        overlap_matrix(FockSpace(W, 4), Displacement(2.0), limit=1.0)


def test_displacement_from_dipoles():
    d = Displacement.from_dipoles(0.01, 5.0, 0.25)
    assert d.lam == pytest.approx(0.2)
    assert np.allclose(overlap_matrix(FockSpace(W, 5), d), displacement_overlaps(0.2, 5))


def test_derivative_coupling_shape_and_antisymmetry():
    space = FockSpace(W, 6)
    A = pfs_derivative_coupling(space, 1.0, 0.01)
    assert np.allclose(A, -A.T)
    # <1_alpha| d/dR |0_alpha> = -(chi mu' / omega) * (+1)
    assert A[1, 0] == pytest.approx(-0.01 / W)
    assert A[0, 1] == pytest.approx(0.01 / W)
