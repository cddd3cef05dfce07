import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perturblab import (
    ConvergenceError,
    IntegerMatrix,
    RealMatrix,
    SingularSpectrum,
    ValidationError,
    bernoulli,
    condition_number,
    exact_inverse_norm,
    frobenius_norm,
    load_integer_matrix,
    matrix_from_spec,
    operator_norm,
    perturb,
    sample_iid_matrix,
    save_integer_matrix,
    svd,
    worst_case_generator,
)


def _random_int_matrix(rng, n, lo=-9, hi=10):
    return IntegerMatrix(rng.integers(lo, hi, size=(n, n)))


# ---------------------------------------------------------------------------
# containers


def test_integer_matrix_entries_read_only():
    m = IntegerMatrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        m.entries[0, 0] = 9


def test_integer_matrix_bound_derived():
    m = IntegerMatrix([[1, -7], [3, 4]])
    assert m.entry_bound == 7


def test_integer_matrix_rejects_non_square():
    with pytest.raises(ValidationError):
        IntegerMatrix([[1, 2, 3], [4, 5, 6]])


def test_real_matrix_rejects_nan():
    with pytest.raises(ValidationError):
        RealMatrix([[1.0, float("nan")], [0.0, 1.0]])


def test_spectrum_orders_descending():
    with pytest.raises(ValidationError):
        SingularSpectrum(sigma=(1.0, 2.0), convergence_residual=0.0)
    with pytest.raises(ValidationError):
        SingularSpectrum(sigma=(1.0, -2.0), convergence_residual=0.0)


# ---------------------------------------------------------------------------
# svd


def test_svd_diagonal_exact():
    s = svd(IntegerMatrix([[3, 0], [0, 4]]))
    assert s.sigma == (4.0, 3.0)
    assert s.sigma_max == 4.0
    assert s.sigma_min == 3.0


def test_svd_zero_matrix():
    s = svd(IntegerMatrix([[0, 0], [0, 0]]))
    assert s.sigma == (0.0, 0.0)


def test_svd_matches_numpy_random():
    rng = np.random.Generator(np.random.PCG64(21))
    for n in (2, 3, 5, 8, 13, 20):
        m = _random_int_matrix(rng, n)
        ours = np.array(svd(m).sigma)
        ref = np.linalg.svd(m.entries.astype(float), compute_uv=False)
        assert np.allclose(ours, ref, rtol=1e-10, atol=1e-10)


def test_svd_rank_one():
    m = IntegerMatrix(np.ones((6, 6), dtype=np.int64))
    s = svd(m)
    assert s.sigma_max == pytest.approx(6.0, rel=1e-12)
    assert s.sigma_min == pytest.approx(0.0, abs=1e-12)


def test_svd_small_sigma_relative_accuracy():
    # graded diagonal spans 9 orders of magnitude; the small singular
    # value must come back with high relative accuracy, not absolute
    n = 10
    d = np.diag([2.0**-i for i in range(n)])
    s = svd(RealMatrix(d))
    assert s.sigma_min == pytest.approx(2.0 ** -(n - 1), rel=1e-12)


def test_svd_residual_reported():
    rng = np.random.Generator(np.random.PCG64(2))
    m = _random_int_matrix(rng, 12)
    s = svd(m)
    assert 0.0 <= s.convergence_residual <= 1e-13


def test_frobenius_sandwich():
    rng = np.random.Generator(np.random.PCG64(33))
    for _ in range(20):
        m = _random_int_matrix(rng, 6)
        s = svd(m)
        f = frobenius_norm(m)
        n = m.n
        assert s.sigma_max <= f * (1 + 1e-12)
        assert f <= math.sqrt(n) * s.sigma_max * (1 + 1e-12)


def test_sum_of_squares_is_frobenius():
    rng = np.random.Generator(np.random.PCG64(4))
    m = _random_int_matrix(rng, 7)
    s = svd(m)
    assert sum(x * x for x in s.sigma) == pytest.approx(frobenius_norm(m) ** 2, rel=1e-12)


# ---------------------------------------------------------------------------
# norms and condition numbers


def test_operator_norm_matches_numpy():
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(10):
        m = _random_int_matrix(rng, 9)
        assert operator_norm(m) == pytest.approx(
            float(np.linalg.norm(m.entries.astype(float), 2)), rel=1e-9
        )


def test_condition_number_diagonal():
    assert condition_number(IntegerMatrix([[3, 0], [0, 4]])) == pytest.approx(4 / 3)


def test_condition_number_singular_is_inf():
    assert condition_number(IntegerMatrix([[1, 1], [1, 1]])) == math.inf


def test_condition_number_zero_matrix_rejected():
    with pytest.raises(ValidationError):
        condition_number(IntegerMatrix([[0, 0], [0, 0]]))


def test_exact_inverse_norm_identity():
    rng = np.random.Generator(np.random.PCG64(6))
    done = 0
    while done < 10:
        m = _random_int_matrix(rng, 5)
        s = svd(m)
        if s.sigma_min < 1e-9:
            continue
        assert s.sigma_min * exact_inverse_norm(m) == pytest.approx(1.0, abs=1e-10)
        done += 1


# ---------------------------------------------------------------------------
# perturbation and masks


def test_perturb_adds_noise():
    base = IntegerMatrix([[1, 0], [0, 1]])
    noise = IntegerMatrix([[1, 2], [3, 4]])
    out = perturb(base, noise)
    assert np.array_equal(out.entries, [[2, 2], [3, 5]])


def test_perturb_mask_freezes_entries():
    base = IntegerMatrix([[1, 0], [0, 1]])
    noise = IntegerMatrix([[1, 2], [3, 4]])
    mask = np.array([[True, False], [False, True]])
    out = perturb(base, noise, mask)
    assert np.array_equal(out.entries, [[1, 2], [3, 1]])


def test_perturb_dimension_mismatch():
    with pytest.raises(ValidationError):
        perturb(IntegerMatrix([[1]]), IntegerMatrix([[1, 0], [0, 1]]))


# ---------------------------------------------------------------------------
# worst-case generators and file io


def test_zero_generator():
    m = worst_case_generator("zero", 4)
    assert not m.entries.any()


def test_graded_diagonal_condition():
    m = worst_case_generator("graded_diagonal", 10, c_exponent=2.0)
    assert condition_number(m) == pytest.approx(100.0, rel=1e-12)


def test_graded_diagonal_caps_at_n_to_c():
    m = worst_case_generator("graded_diagonal", 30, c_exponent=1.0)
    assert int(np.max(np.abs(m.entries))) <= 30


def test_rank_one_ones():
    m = worst_case_generator("rank_one_ones", 5)
    assert np.array_equal(m.entries, np.ones((5, 5), dtype=np.int64))


def test_duplicated_column_is_singular():
    m = worst_case_generator("duplicated_column", 6)
    s = svd(m)
    assert s.sigma_min == pytest.approx(0.0, abs=1e-12)


def test_unknown_generator_kind():
    with pytest.raises(ValidationError):
        worst_case_generator("mystery", 4)


def test_matrix_spec_parsing():
    m = matrix_from_spec("graded_diagonal", 10, 2.0)
    assert condition_number(m) == pytest.approx(100.0, rel=1e-12)
    z = matrix_from_spec("zero", 3, 1.0)
    assert not z.entries.any()


def test_matrix_file_round_trip(tmp_path):
    m = IntegerMatrix([[1, -2], [3, 4]])
    path = tmp_path / "m.txt"
    save_integer_matrix(str(path), m)
    back = load_integer_matrix(str(path))
    assert np.array_equal(back.entries, m.entries)
    via_spec = matrix_from_spec(f"file:{path}", 2, 1.0)
    assert np.array_equal(via_spec.entries, m.entries)


def test_matrix_file_size_mismatch(tmp_path):
    m = IntegerMatrix([[1, -2], [3, 4]])
    path = tmp_path / "m.txt"
    save_integer_matrix(str(path), m)
    with pytest.raises(ValidationError):
        matrix_from_spec(f"file:{path}", 3, 1.0)


# ---------------------------------------------------------------------------
# properties


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=2**31))
@settings(max_examples=25, deadline=None)
def test_svd_invariant_under_transpose(n, seed):
    m = IntegerMatrix(sample_iid_matrix(bernoulli(), n, seed))
    mt = IntegerMatrix(m.entries.T)
    assert np.allclose(svd(m).sigma, svd(mt).sigma, rtol=1e-10, atol=1e-12)


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=2**31))
@settings(max_examples=25, deadline=None)
def test_svd_scales_linearly(n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    m = _random_int_matrix(rng, n)
    doubled = IntegerMatrix(2 * m.entries)
    assert np.allclose(svd(doubled).sigma, 2 * np.array(svd(m).sigma), rtol=1e-10)
