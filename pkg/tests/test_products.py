import math
import warnings

import pytest

import slspec as sl
from slspec.products import reference_ratio_at_imag


def _head_cos(k):
    return math.pi * (k - 0.5)


@pytest.fixture(scope="module")
def cos_reference():
    return sl.ZeroSequence(tuple(_head_cos(k) for k in range(1, 51)), "HalfIntegerCos")


@pytest.fixture(scope="module")
def sin_reference():
    return sl.ZeroSequence(tuple(math.pi * k for k in range(1, 51)), "IntegerSin")


@pytest.fixture(scope="module")
def step_zero_sequence(step_spectra_200):
    return sl.ZeroSequence.from_spectrum(step_spectra_200[0])


def test_cosine_identity(cos_reference):
    assert sl.product_eval(cos_reference, 1.0) == pytest.approx(math.cos(1.0), abs=1e-10)


def test_sine_identity(sin_reference):
    assert sl.product_eval(sin_reference, math.pi / 2) == pytest.approx(1.0, abs=1e-10)


def test_product_matches_shooting(step_sigma, step_zero_sequence):
    # scale-free comparison: both sides normalized at a common reference energy
    bc = sl.BoundaryData(sl.INF, 0.0)
    lam_ref = 0.1
    char_ref = sl.char_value(step_sigma, bc, lam_ref**2)
    prod_ref = sl.product_eval(step_zero_sequence, lam_ref)
    for lam in (0.3, 1.7, 4.4):
        char = sl.char_value(step_sigma, bc, lam**2) / char_ref
        prod = sl.product_eval(step_zero_sequence, lam) / prod_ref
        assert prod == pytest.approx(char, abs=1e-5)


def test_derivative_at_zero_cosine(cos_reference):
    assert sl.product_derivative_at_zero(cos_reference, 1) == pytest.approx(-1.0, abs=1e-9)


def test_derivative_at_zero_sine(sin_reference):
    assert sl.product_derivative_at_zero(sin_reference, 1) == pytest.approx(-1.0, abs=1e-9)


def test_derivative_matches_finite_differences(step_zero_sequence):
    h = 1e-5
    for n in range(1, 11):
        z = step_zero_sequence.zeros[n - 1]
        fd = (sl.product_eval(step_zero_sequence, z + h)
              - sl.product_eval(step_zero_sequence, z - h)) / (2 * h)
        got = sl.product_derivative_at_zero(step_zero_sequence, n)
        assert got == pytest.approx(fd, abs=1e-6 * max(1.0, abs(fd)))


def test_parity_is_exact(cos_reference, sin_reference, step_zero_sequence):
    for lam in (0.37, 2.0, 7.7):
        assert sl.product_eval(cos_reference, lam) == sl.product_eval(cos_reference, -lam)
        assert sl.product_eval(step_zero_sequence, lam) == sl.product_eval(
            step_zero_sequence, -lam)
        assert sl.product_eval(sin_reference, -lam) == -sl.product_eval(sin_reference, lam)


def test_supplied_zeros_evaluate_to_zero_exactly(step_zero_sequence):
    for n in (1, 7, 42):
        assert sl.product_eval(step_zero_sequence, step_zero_sequence.zeros[n - 1]) == 0.0


def test_normalization_along_imaginary_axis():
    # mildly perturbed half-integer zeros keep the cosine-type scale
    zeros = tuple(_head_cos(k) + 0.05 / k**2 for k in range(1, 81))
    seq = sl.ZeroSequence(zeros, "HalfIntegerCos")
    assert reference_ratio_at_imag(seq, 30.0) == pytest.approx(1.0, abs=1e-3)


def test_neumann_type_product_reproduces_characteristic(zero_sigma):
    # zeros of lam*tan(lam) = 1 with reference lam*sin(lam) - cos(lam)
    spec = sl.compute_spectrum(zero_sigma, sl.BoundaryData(0.0, 1.0), 80)
    seq = sl.ZeroSequence.from_spectrum(spec)
    for lam in (0.4, 2.1, 5.0):
        want = lam * math.sin(lam) - math.cos(lam)
        assert sl.product_eval(seq, lam) == pytest.approx(want, rel=2e-3)


def test_repeated_zero_raises():
    with pytest.raises(sl.MultipleZeroError):
        sl.ZeroSequence((1.5, 1.5, 4.7), "HalfIntegerCos")


def test_short_sequence_warns_on_derivative():
    zeros = tuple(_head_cos(k) for k in range(1, 11))
    seq = sl.ZeroSequence(zeros, "HalfIntegerCos")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sl.product_derivative_at_zero(seq, 1)
    assert any("50" in str(w.message) for w in caught)


def test_evaluation_beyond_synthesized_range_raises(step_zero_sequence):
    top = step_zero_sequence.zeros[-1]
    with pytest.raises(ValueError):
        sl.product_eval(step_zero_sequence, top + 10.0)
