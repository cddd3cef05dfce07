from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perturblab import ValidationError, determinant, invert_exact, solve_exact

import oracles


def test_determinant_small_known():
    assert determinant([[3, 0], [0, 4]]) == 12
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[5]]) == 5


def test_determinant_matches_cofactor_oracle():
    rng = np.random.Generator(np.random.PCG64(99))
    for _ in range(200):
        rows = rng.integers(-9, 10, size=(3, 3)).tolist()
        assert determinant(rows) == oracles.det3_cofactor(rows)


def test_determinant_zero_rows():
    assert determinant([[1, 2, 3], [1, 2, 3], [0, 0, 1]]) == 0


@given(
    st.lists(
        st.lists(st.integers(min_value=-30, max_value=30), min_size=4, max_size=4),
        min_size=4,
        max_size=4,
    )
)
@settings(max_examples=100, deadline=None)
def test_determinant_matches_numpy_sign_and_scale(rows):
    d = determinant(rows)
    nd = np.linalg.det(np.array(rows, dtype=float))
    assert abs(d - nd) < 1e-4 * max(1.0, abs(nd))


def test_solve_exact_known_system():
    x = solve_exact([[2, 0], [0, 4]], [1, 1])
    assert x == [Fraction(1, 2), Fraction(1, 4)]


def test_solve_exact_zero_residual_on_integer_systems():
    rng = np.random.Generator(np.random.PCG64(3))
    checked = 0
    while checked < 50:
        a = rng.integers(-9, 10, size=(5, 5)).tolist()
        b = [int(v) for v in rng.integers(-9, 10, size=5)]
        x = solve_exact(a, b)
        if x is None:
            continue
        for i in range(5):
            assert sum(Fraction(a[i][j]) * x[j] for j in range(5)) == b[i]
        checked += 1


def test_solve_exact_singular_returns_none():
    assert solve_exact([[1, 1], [1, 1]], [1, 2]) is None


def test_solve_exact_fraction_rhs():
    x = solve_exact([[2, 1], [1, 1]], [Fraction(1, 3), Fraction(1, 6)])
    assert x == [Fraction(1, 6), Fraction(0)]


def test_invert_exact_identity_product():
    rng = np.random.Generator(np.random.PCG64(17))
    done = 0
    while done < 25:
        a = rng.integers(-6, 7, size=(4, 4)).tolist()
        if determinant(a) == 0:
            continue
        inv = invert_exact(a)
        for i in range(4):
            for j in range(4):
                acc = sum(Fraction(a[i][k]) * inv[k][j] for k in range(4))
                assert acc == (1 if i == j else 0)
        done += 1


def test_invert_exact_singular_raises():
    with pytest.raises(ValidationError):
        invert_exact([[1, 2], [2, 4]])


def test_determinant_multiplicativity():
    rng = np.random.Generator(np.random.PCG64(8))
    for _ in range(20):
        a = rng.integers(-5, 6, size=(3, 3))
        b = rng.integers(-5, 6, size=(3, 3))
        assert determinant((a @ b).tolist()) == determinant(a.tolist()) * determinant(
            b.tolist()
        )


def test_large_entries_stay_exact():
    big = 10**12
    a = [[big, 1], [1, big]]
    assert determinant(a) == big * big - 1
    x = solve_exact(a, [1, 0])
    assert x is not None
    assert x[0] * (big * big - 1) == big
