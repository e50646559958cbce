import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdual.errors import BalanceViolation, NegativeDimension, NonGenericKappa
from hyperdual.model import admissible_range, validate_weight_data


def test_valid_tuple():
    wd = validate_weight_data(2.3 + 0j, 1, 1.3 + 0j, 2, 2.5)
    assert wd.m1 == 2.3
    assert wd.dim == 2


def test_balance_violation():
    with pytest.raises(BalanceViolation):
        validate_weight_data(1.0, 1, 1.0, 2, 2.5)


def test_non_generic_kappa():
    with pytest.raises(NonGenericKappa):
        validate_weight_data(2.3, 1, 1.3, 2, 1.0)  # sin(pi*1/1) = 0


def test_kappa_resonance_at_larger_index():
    # sin(pi*5/2.5) = sin(2 pi) = 0, hit once max(m2, l2) >= 5
    with pytest.raises(NonGenericKappa):
        validate_weight_data(6.3, 1, 2.3, 5, 2.5)
    validate_weight_data(6.3, 1, 2.3, 5, 2.7)  # fine for kappa = 2.7


def test_negative_dimension():
    with pytest.raises(NegativeDimension):
        validate_weight_data(2.3, -1, 1.3, 0, 2.5)


def test_gamma_pole_guard():
    # 1 + (m1 - j)/kappa = 0 at j = 0 when m1 = -kappa
    with pytest.raises(NonGenericKappa):
        validate_weight_data(-2.5, 3, 0.5 - 2.5 - 0.5 + 3 - 3 + 0.0, 3, 2.5)


def test_admissible_range_examples():
    assert admissible_range(1, 2) == 1
    assert admissible_range(0, 5) == 0
    assert admissible_range(3, 3) == 3


def test_admissible_range_symmetric():
    for m2 in range(5):
        for l2 in range(5):
            assert admissible_range(m2, l2) == admissible_range(l2, m2)


@given(
    m1=st.complex_numbers(min_magnitude=0, max_magnitude=5,
                          allow_nan=False, allow_infinity=False),
    m2=st.integers(min_value=0, max_value=4),
    l2=st.integers(min_value=0, max_value=4),
    kappa=st.floats(min_value=2.05, max_value=2.45),
)
@settings(max_examples=60, deadline=None)
def test_swap_preserves_validity(m1, m2, l2, kappa):
    l1 = m1 + m2 - l2
    try:
        wd = validate_weight_data(m1, m2, l1, l2, kappa)
    except NonGenericKappa:
        with pytest.raises(NonGenericKappa):
            validate_weight_data(l1, l2, m1, m2, kappa)
        return
    swapped = wd.swap()
    assert swapped.m1 == wd.l1 and swapped.l2 == wd.m2
    assert swapped.dim == wd.dim


def test_integer_coercion():
    wd = validate_weight_data(2.3, 1.0, 1.3, 2.0, 2.5)
    assert isinstance(wd.m2, int) and isinstance(wd.l2, int)
    with pytest.raises(TypeError):
        validate_weight_data(2.3, 1.5, 1.3, 2, 2.5)
