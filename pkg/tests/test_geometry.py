from fractions import Fraction

import numpy as np
import pytest

from sqgci.geometry import (DirectionSet, PositivityViolation, SymMatrix2, gamma_coefficients, pair_separation,
                            reconstruct, squared_coefficients)


def test_identity_coefficients():
    a = gamma_coefficients(SymMatrix2.identity())
    np.testing.assert_allclose(a, (np.sqrt(7 / 16), np.sqrt(25 / 32), np.sqrt(25 / 32)), atol=1e-15)


def test_reconstruct_identity_and_zero():
    M = reconstruct(np.sqrt(7 / 16), np.sqrt(25 / 32), np.sqrt(25 / 32))
    np.testing.assert_allclose(M.as_array(), np.eye(2), atol=1e-15)
    assert reconstruct(0.0, 0.0, 0.0) == SymMatrix2(0.0, 0.0, 0.0)


def test_reconstruct_oracle_with_exact_fractions():
    # (1/2) sum over all six k of a_k^2 k_perp (x) k_perp with a_{-k} = a_k, in exact arithmetic
    sq = (Fraction(7, 16), Fraction(25, 32), Fraction(25, 32))
    reps = [(Fraction(1), Fraction(0)), (Fraction(3, 5), Fraction(4, 5)), (Fraction(3, 5), Fraction(-4, 5))]
    m = [[Fraction(0)] * 2 for _ in range(2)]
    for a2, k in zip(sq, reps):
        for sign in (1, -1):
            kp = (-sign * k[1], sign * k[0])
            for i in range(2):
                for j in range(2):
                    m[i][j] += Fraction(1, 2) * a2 * kp[i] * kp[j]
    assert m == [[1, 0], [0, 1]]


def test_off_diagonal_difference():
    t = 1e-3
    sq = squared_coefficients(1.0, t, 1.0)
    assert abs((sq[2] - sq[1]) - 25 / 12 * t) < 1e-15


def test_random_reconstruction():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        B = rng.normal(size=(2, 2))
        B = 0.5 * (B + B.T)
        B *= rng.uniform(0, 0.05) / np.max(np.abs(np.linalg.eigvalsh(B)))
        M = SymMatrix2(1 + B[0, 0], B[0, 1], 1 + B[1, 1])
        assert M.op_norm_from_identity() <= 0.05 + 1e-15
        R = reconstruct(*gamma_coefficients(M))
        worst = max(worst, np.max(np.abs(R.as_array() - M.as_array())))
    assert worst <= 1e-12


def test_positivity_violation():
    with pytest.raises(PositivityViolation) as e:
        gamma_coefficients(SymMatrix2(1.0, 0.0, 0.5))
    assert e.value.functional == "a_k1^2"


def test_direction_set_invariants():
    ds = DirectionSet()
    assert len(ds.dirs) == 6
    for k in ds.dirs_exact:
        assert (5 * k[0]).denominator == 1 and (5 * k[1]).denominator == 1
        assert k[0] ** 2 + k[1] ** 2 == 1
        assert (-k[0], -k[1]) in ds.dirs_exact
    assert ds.integer_dirs()[:3] == [(5, 0), (3, 4), (3, -4)]
    seps = pair_separation()
    assert len(seps) == 30
    assert min(v for _, v in seps) >= 0.5
