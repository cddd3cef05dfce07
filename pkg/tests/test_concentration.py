from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perturblab import (
    ConcentrationQuery,
    ResourceError,
    ValidationError,
    bernoulli,
    certificate_from_symmetric,
    check_dominance,
    check_nondegeneracy,
    classify_rich,
    discretized_gaussian,
    exact_concentration,
    fourier_bound,
    lazy_coin,
    parse_query,
)

import oracles

BERN = bernoulli()
LAZY = lazy_coin(Fraction(1, 2))
GAUSS = discretized_gaussian()


# ---------------------------------------------------------------------------
# exact concentration vs the enumeration oracle


def test_exact_bernoulli_pair():
    q = ConcentrationQuery(dists=(BERN, BERN))
    out = exact_concentration(q, (1, 1))
    assert out.sup == Fraction(1, 2)  # frozen: oracle gives (1/2, 0)
    assert out.argmax == 0


def test_exact_bernoulli_four_ones():
    q = ConcentrationQuery(dists=(BERN,) * 4)
    out = exact_concentration(q, (1, 1, 1, 1))
    assert out.sup == Fraction(3, 8)  # frozen: C(4,2)/16


def test_exact_bernoulli_123():
    q = ConcentrationQuery(dists=(BERN,) * 3)
    out = exact_concentration(q, (1, 2, 3))
    assert out.sup == Fraction(1, 4)  # frozen via oracle


def test_exact_lazy_pair():
    q = ConcentrationQuery(dists=(LAZY, LAZY))
    out = exact_concentration(q, (1, 1))
    assert out.sup == Fraction(3, 8)  # frozen via oracle


def test_exact_gaussian_single():
    q = ConcentrationQuery(dists=(GAUSS,))
    out = exact_concentration(q, (1,))
    assert out.sup == GAUSS.probability_of(0)
    assert out.argmax == 0


def test_shift_moves_argmax_not_sup():
    base = ConcentrationQuery(dists=(BERN, BERN))
    shifted = ConcentrationQuery(dists=(BERN, BERN), shift=(1, 0))
    a = exact_concentration(base, (2, 2))
    b = exact_concentration(shifted, (2, 2))
    assert a.sup == b.sup == Fraction(1, 2)
    assert a.argmax == 0
    assert b.argmax == 2  # frozen: oracle argmax shifts by z . v


def test_zero_weights_concentrate_fully():
    q = ConcentrationQuery(dists=(BERN, BERN))
    out = exact_concentration(q, (0, 0))
    assert out.sup == Fraction(1)
    assert out.argmax == 0


@given(
    n=st.integers(min_value=1, max_value=5),
    seed=st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=60, deadline=None)
def test_exact_matches_brute_force(n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    v = tuple(int(x) for x in rng.integers(-6, 7, size=n))
    pool = [BERN, LAZY, GAUSS]
    dists = tuple(pool[int(i)] for i in rng.integers(0, 3, size=n))
    shift = tuple(int(x) for x in rng.integers(-2, 3, size=n)) if seed % 2 else None
    q = ConcentrationQuery(dists=dists, shift=shift)
    out = exact_concentration(q, v)
    want_sup, want_arg = oracles.brute_force_concentration(dists, v, shift)
    assert out.sup == want_sup
    assert out.argmax == want_arg


def test_exact_concentration_budget():
    q = ConcentrationQuery(dists=(BERN,) * 30)
    v = tuple(10**14 + i for i in range(30))
    with pytest.raises(ResourceError, match="Monte Carlo"):
        exact_concentration(q, v, state_budget=1000)


# ---------------------------------------------------------------------------
# fourier bound


def test_fourier_frozen_quarter():
    q = ConcentrationQuery(dists=(BERN, BERN), multipliers=(2, 2))
    got = fourier_bound(q, (1, 1), Fraction(1, 4))
    assert got == pytest.approx(19 / 32, abs=1e-12)  # frozen via quadrature


def test_fourier_matches_quadrature():
    rng = np.random.Generator(np.random.PCG64(77))
    for _ in range(15):
        n = int(rng.integers(1, 5))
        v = tuple(int(x) for x in rng.integers(-8, 9, size=n))
        mults = tuple(int(x) for x in rng.integers(1, 4, size=n))
        mu = float(rng.uniform(0.05, 0.5))
        q = ConcentrationQuery(dists=(BERN,) * n, multipliers=mults)
        got = fourier_bound(q, v, mu)
        want = oracles.quad_cosine_product([m * w for m, w in zip(mults, v)], mu)
        assert got == pytest.approx(want, abs=1e-10)


def test_fourier_excluded_rows_dropped():
    q = ConcentrationQuery(dists=(BERN,) * 3, multipliers=(2, 2, 2), exclusion=frozenset({1}))
    got = fourier_bound(q, (1, 5, 1), Fraction(1, 4))
    want = oracles.quad_cosine_product((2, 2), 0.25)  # row 1 removed
    assert got == pytest.approx(want, abs=1e-10)


def test_fourier_all_zero_frequencies():
    q = ConcentrationQuery(dists=(BERN, BERN))
    assert fourier_bound(q, (0, 0), Fraction(1, 4)) == pytest.approx(1.0)


def test_fourier_budget():
    q = ConcentrationQuery(dists=(BERN,) * 3)
    with pytest.raises(ResourceError):
        fourier_bound(q, (10**9, 10**9, 10**9), Fraction(1, 4), averaging_budget=100)


# ---------------------------------------------------------------------------
# dominance


def test_dominance_bernoulli_pair():
    q = ConcentrationQuery(dists=(BERN, BERN))
    cert = certificate_from_symmetric(BERN)
    rep = check_dominance(q, (1, 1), [cert, cert])
    assert rep.ok
    assert rep.exact == Fraction(1, 2)
    assert rep.bound == pytest.approx(19 / 32, abs=1e-12)
    assert rep.multipliers == (2, 2)
    assert rep.mu == Fraction(1, 4)


@given(
    n=st.integers(min_value=1, max_value=6),
    seed=st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=60, deadline=None)
def test_dominance_property(n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    v = tuple(int(x) for x in rng.integers(-20, 21, size=n))
    pool = [BERN, LAZY, GAUSS, lazy_coin(Fraction(1, 10))]
    dists = tuple(pool[int(i)] for i in rng.integers(0, 4, size=n))
    q = ConcentrationQuery(dists=dists)
    certs = [certificate_from_symmetric(d) for d in dists]
    rep = check_dominance(q, v, certs)
    assert rep.ok, f"exact {rep.exact} > bound {rep.bound}"


def test_dominance_with_exclusion_still_holds():
    # dropping a coordinate from the product only raises the bound
    n = 6
    q = ConcentrationQuery(dists=(BERN,) * n, exclusion=frozenset({0, 3}))
    certs = [certificate_from_symmetric(BERN)] * n
    rep = check_dominance(q, (3, 1, 4, 1, 5, 9), certs)
    assert rep.ok
    plain = check_dominance(
        ConcentrationQuery(dists=(BERN,) * n), (3, 1, 4, 1, 5, 9), certs
    )
    assert rep.bound >= plain.bound - 1e-12


def test_cert_count_mismatch():
    q = ConcentrationQuery(dists=(BERN, BERN))
    with pytest.raises(ValidationError):
        check_dominance(q, (1, 1), [certificate_from_symmetric(BERN)])


# ---------------------------------------------------------------------------
# query validation


def test_query_multiplier_positivity():
    with pytest.raises(ValidationError):
        ConcentrationQuery(dists=(BERN, BERN), multipliers=(0, 2))


def test_query_exclusion_bounds():
    with pytest.raises(ValidationError):
        ConcentrationQuery(dists=(BERN, BERN), exclusion=frozenset({5}))


def test_query_exclusion_size_cap():
    # ceil(2^0.99) = 2 would allow both rows; the cap is strict n^0.99
    with pytest.raises(ValidationError):
        ConcentrationQuery(dists=(BERN, BERN), exclusion=frozenset({0, 1}))


def test_query_lcm_cap():
    # lcm(6, 10) = 30 > 4^1 = 4 violates the configured multiplier budget
    with pytest.raises(ValidationError):
        ConcentrationQuery(
            dists=(BERN,) * 4,
            multipliers=(6, 10, 1, 1),
            k_exponent=1.0,
        )
    # generous exponent admits the same multipliers
    ConcentrationQuery(dists=(BERN,) * 4, multipliers=(6, 10, 1, 1), k_exponent=3.0)


def test_query_shift_length():
    with pytest.raises(ValidationError):
        ConcentrationQuery(dists=(BERN, BERN), shift=(1,))


# ---------------------------------------------------------------------------
# richness


def test_classify_rich_constant_vector():
    n = 8
    q = ConcentrationQuery(dists=(BERN,) * n)
    rep = classify_rich(q, (1,) * n, a_exponent=1.0)
    assert rep.label == "rich"


def test_classify_rich_powers_of_two_boundary():
    # weights 2^0 .. 2^(n-1) make every signed sum distinct, so the sup
    # is exactly 2^-n.  At n = 14 that is 6.1e-5 and the threshold
    # n^-(A+offset) crosses it at offset ~2.68: a tighter offset (2.5,
    # threshold 9.7e-5) classifies poor, a looser one (3.0, threshold
    # 2.6e-5) classifies rich.  With the default offset 4 the same
    # construction stays rich all the way to n = 22.
    n = 14
    q = ConcentrationQuery(dists=(BERN,) * n)
    v = tuple(2**i for i in range(n))
    rep = classify_rich(q, v, a_exponent=1.0, offset=2.5)
    assert rep.sup == Fraction(1, 2**n)
    assert rep.label == "poor"
    rep = classify_rich(q, v, a_exponent=1.0, offset=3.0)
    assert rep.sup == Fraction(1, 2**n)
    assert rep.label == "rich"


def test_classify_rich_default_offset():
    n = 12
    q = ConcentrationQuery(dists=(BERN,) * n)
    rep = classify_rich(q, tuple(2**i for i in range(n)), a_exponent=1.0)
    assert rep.label == "rich"  # 2^-12 = 2.4e-4 >= 12^-5 = 4.0e-6


def test_classify_rich_takes_best_row():
    n = 6
    rows = [
        ConcentrationQuery(dists=(lazy_coin(Fraction(1, 10)),) * n),
        ConcentrationQuery(dists=(BERN,) * n),
    ]
    rep = classify_rich(rows, (1,) * n, a_exponent=1.0)
    lazy_only = classify_rich(rows[0], (1,) * n, a_exponent=1.0)
    assert rep.sup >= lazy_only.sup


# ---------------------------------------------------------------------------
# nondegeneracy


def test_nondegeneracy_typical_direction():
    n = 12
    y = np.ones(n) / np.sqrt(n)
    rep = check_nondegeneracy([BERN] * n, None, y, Fraction(1, 4), trials=400, seed=5)
    assert rep.trials == 400
    assert 0.0 <= rep.estimate <= 1.0
    assert not rep.violation


def test_nondegeneracy_degenerate_direction_flags():
    # y = e_1 with noise that never moves: the image is always 0
    n = 4
    point = ConcentrationQuery  # noqa: F841  (readability only)
    from perturblab import DiscreteDistribution

    frozen_law = DiscreteDistribution("point", ((0, Fraction(1)),))
    y = np.zeros(n)
    y[0] = 1.0
    rep = check_nondegeneracy([frozen_law] * n, None, y, Fraction(1, 4), trials=300, seed=9)
    assert rep.estimate == 1.0
    assert rep.violation


# ---------------------------------------------------------------------------
# parsing


def test_parse_query_full():
    text = """
    # weights and law
    dist bernoulli
    v 1 -2 3
    z 0 1 0
    a 2 2 2
    exclude 1
    mu 1/4
    k_exponent 2.0
    """
    parsed = parse_query(text)
    assert parsed.v == (1, -2, 3)
    assert parsed.query.shift == (0, 1, 0)
    assert parsed.query.multipliers == (2, 2, 2)
    assert parsed.query.exclusion == frozenset({1})
    assert parsed.mu == Fraction(1, 4)


def test_parse_query_requires_core_fields():
    with pytest.raises(ValidationError):
        parse_query("dist bernoulli\n")
