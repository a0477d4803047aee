import math

import pytest
from hypothesis import given, strategies as st

from djlong.errors import DomainError
from djlong.params import (Domain, ProfileParams, RegimeTag, classify_regime, default_sigma, derive_exponents,
                           eigenvalue, inverse_map_coefficients, invalid_reason, map_coefficients,
                           regularity_ranges, sigma_range)

betas = st.floats(-10, 10, allow_nan=False).filter(lambda b: abs(b) > 1e-3)
coeffs = st.floats(0, 10, allow_nan=False)


@pytest.mark.parametrize("beta, expected", [(-0.5, (0.5, 3.0, 5.0)), (-2.0, (-1.0, 0.0, 0.5)), (1.0, (2.0, -3.0, -4.0))])
def test_derive_exponents_examples(beta, expected):
    assert derive_exponents(beta) == pytest.approx(expected, abs=1e-15)


def test_derive_exponents_rejects_zero():
    with pytest.raises(DomainError):
        derive_exponents(0.0)


@given(betas)
def test_exponent_relations(beta):
    alpha, s, sp = derive_exponents(beta)
    assert alpha == beta + 1
    assert s == pytest.approx(-1 - 2 / beta)
    assert sp == pytest.approx(-1 - 3 / beta)


def test_map_coefficients_examples():
    assert map_coefficients(1.0, -1.0, 1.0) == pytest.approx((4.0, 5.0))
    assert map_coefficients(-1.0, 3.7, 1.0)[0] == 0.0
    assert map_coefficients(-1.5, 1.0, 2.2)[1] == 0.0


def test_inverse_map_rejects_forced_zero():
    with pytest.raises(DomainError):
        inverse_map_coefficients(-1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        inverse_map_coefficients(-1.5, 0.0, 1.0)
    assert inverse_map_coefficients(-1.0, 0.0, 1.0)[0] == 0.0


@given(betas.filter(lambda b: abs(b + 1) > 1e-3 and abs(b + 1.5) > 1e-3), coeffs, coeffs)
def test_coefficient_map_round_trip(beta, c1, c2):
    C1, C2 = inverse_map_coefficients(beta, c1, c2)
    back = map_coefficients(beta, C1, C2)
    assert back == pytest.approx((c1, c2), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("args, tag", [
    ((0.5, 1, 1), RegimeTag.REGULAR_SUPERLINEAR),
    ((-2.5, 1, 1), RegimeTag.INVALID),
    ((-0.5, 1, 0), RegimeTag.SINGULAR_AUTONOMOUS),
    ((-0.5, 1, 1), RegimeTag.SINGULAR_NONAUTONOMOUS),
    ((1.0, 1, 0), RegimeTag.REGULAR_LINKING),
    ((-3.5, 1, 1), RegimeTag.REGULAR_SUBLINEAR),
    ((-2.5, 1, 0), RegimeTag.REGULAR_SUBLINEAR),
    ((0.0, 1, 1), RegimeTag.INVALID),
    ((-2.0, 1, 0), RegimeTag.INVALID),
    ((0.5, 0, 0), RegimeTag.INVALID),
    ((-1.0, 1, 1), RegimeTag.INVALID),
    ((-1.0, 0, 1), RegimeTag.SINGULAR_NONAUTONOMOUS),
    ((-1.5, 1, 1), RegimeTag.INVALID),
    ((-1.5, 1, 0), RegimeTag.SINGULAR_AUTONOMOUS),
])
def test_classify_regime(args, tag):
    assert classify_regime(*args) is tag


@given(st.floats(-20, 20, allow_nan=False), coeffs, coeffs)
def test_classification_total_and_consistent(beta, c1, c2):
    tag = classify_regime(beta, c1, c2)
    assert isinstance(tag, RegimeTag)
    assert (tag is RegimeTag.INVALID) == (invalid_reason(beta, c1, c2) is not None)
    if tag is not RegimeTag.INVALID:
        assert tag.is_regular != tag.is_singular
        assert tag.is_regular == (beta > 0 or beta < -2)


@pytest.mark.parametrize("k, beta, domain, expected", [
    (1, 1.0, Domain.FULL_SEMICIRCLE, 0.0), (1, -0.5, Domain.QUARTER, 3.75), (2, 3.0, Domain.FULL_SEMICIRCLE, -5.0)])
def test_eigenvalue(k, beta, domain, expected):
    assert eigenvalue(k, beta, domain) == expected


def test_eigenvalue_rejects_bad_index():
    with pytest.raises(DomainError):
        eigenvalue(0, 1.0)


@pytest.mark.parametrize("beta, expected", [(-0.5, (1 / 16, 1 / 3)), (-1.9, (0.9025, 1.0)), (-0.3, (0.0225, 0.2))])
def test_sigma_range(beta, expected):
    assert sigma_range(beta) == pytest.approx(expected)


@given(st.floats(-1.999, -0.001))
def test_sigma_range_nonempty_and_default_inside(beta):
    lo, hi = sigma_range(beta)
    assert lo < hi
    sigma = default_sigma(beta)
    assert lo < sigma <= hi and sigma < 1


def test_sigma_range_outside_singular():
    with pytest.raises(DomainError):
        sigma_range(0.5)


def test_regularity_ranges_metadata():
    r = regularity_ranges()
    assert set(r.values()) == {(-2.0, -1.5), (-2.0, -1.0)}


def test_profile_params_round_trip():
    p = ProfileParams.from_c(-0.5, 1.0, 1.0)
    assert ProfileParams.from_dict(p.to_dict()) == p
    q = ProfileParams.from_C(p.beta, p.C1, p.C2)
    assert q.c1 == pytest.approx(p.c1) and q.c2 == pytest.approx(p.c2)
    assert p.alpha == 0.5 and p.s == 3.0 and p.s_prime == 5.0


def test_require_valid_names_constraint():
    with pytest.raises(DomainError, match="c2 must vanish"):
        ProfileParams.from_c(-2.5, 1.0, 1.0).require_valid()
    assert math.isnan(ProfileParams.from_c(-2.5, 1.0, 1.0).C1)
