import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibfsm.words import (
    PotentialWindow,
    fibonacci_number,
    finite_fibonacci,
    floor_alpha,
    reverse,
    substitute,
    v_at,
    window,
)

V_1_55 = "10110-10110-110-10110-10110-110-10110-110-10110-10110-110-10110-101".replace("-", "")


def test_display_string_is_55_letters():
    assert len(V_1_55) == 55


@pytest.mark.parametrize(
    "word, image",
    [("1", "10"), ("", ""), ("10110", "10110101"), ("0", "1")],
)
def test_substitute(word, image):
    assert substitute(word) == image


def test_substitute_length():
    w = "1101011010"
    assert len(substitute(w)) == 2 * w.count("1") + w.count("0")


@pytest.mark.parametrize(
    "k, word",
    [
        (1, "1"),
        (2, "10"),
        (3, "101"),
        (4, "10110"),
        (5, "10110101"),
        (6, "1011010110110"),
    ],
)
def test_finite_fibonacci_listed(k, word):
    assert finite_fibonacci(k) == word


def test_finite_fibonacci_rejects_zero():
    with pytest.raises(ValueError):
        finite_fibonacci(0)


def test_recursion_and_substitution_agree():
    w = "1"
    for k in range(1, 21):
        assert finite_fibonacci(k) == w
        assert len(w) == fibonacci_number(k)
        w = substitute(w)
    for k in range(2, 20):
        assert finite_fibonacci(k + 1) == finite_fibonacci(k) + finite_fibonacci(k - 1)


def test_rotation_formula_matches_limit_word():
    assert window(1, fibonacci_number(20)).letters == finite_fibonacci(20)


@pytest.mark.parametrize("n, letter", [(0, 0), (-1, 1)])
def test_v_at_boundary(n, letter):
    assert v_at(n) == letter


def test_v_at_first_letters():
    assert [v_at(n) for n in range(1, 11)] == [1, 0, 1, 1, 0, 1, 0, 1, 1, 0]


def test_window_examples():
    assert window(1, 55).letters == V_1_55
    assert window(-1, 0).letters == "10"
    w = window(-8, 7)
    for n in range(-8, 8):
        if n not in (-1, 0) and -8 <= -1 - n <= 7:
            assert w[n] == w[-1 - n]


def test_window_rejects_empty():
    with pytest.raises(ValueError):
        window(3, 2)


def test_window_matches_v_at_far_out():
    # exercises the arbitrary-precision branch
    lo = 10**12
    assert window(lo, lo + 30).letters == "".join(str(v_at(n)) for n in range(lo, lo + 31))
    assert window(-lo - 30, -lo).letters == "".join(str(v_at(n)) for n in range(-lo - 30, -lo + 1))


def test_vectorized_floor_near_int64_limit():
    lo = 10**9 - 50
    w = window(lo - 100, lo)
    assert w.letters == "".join(str(v_at(n)) for n in range(lo - 100, lo + 1))


def test_reverse():
    assert reverse("10110") == "01101"
    assert reverse("") == ""
    n = 1000
    assert reverse(window(1, n).letters) == window(-1 - n, -2).letters


@given(st.text(alphabet="01", max_size=50))
def test_reverse_is_involution(w):
    assert reverse(reverse(w)) == w


def test_symmetry_law():
    w = window(-10_001, 10_000)
    assert w[-1] == 1 and w[0] == 0
    for n in range(-10_000, 10_000 + 1):
        if n not in (-1, 0):
            assert w[n] == w[-1 - n]


def test_floor_formula_against_high_precision():
    mpmath.mp.prec = 160
    alpha = (mpmath.sqrt(5) - 1) / 2
    edge = 1 - alpha
    eps = mpmath.mpf(2) ** -120
    w = window(-100_000, 100_000)
    ambiguous = []
    for n in range(-100_000, 100_001):
        t = mpmath.frac(n * alpha)
        if abs(t - edge) < eps or t < eps or 1 - t < eps:
            ambiguous.append(n)
            continue
        assert w[n] == int(t >= edge), n
    # only the two endpoint hits are undecidable numerically
    assert ambiguous == [-1, 0]


@given(st.integers(min_value=-(10**30), max_value=10**30))
def test_floor_alpha_brackets(m):
    # floor(m alpha) = f  iff  f <= m alpha < f + 1, checked in integers:
    # 2f + m <= m sqrt5 < 2f + 2 + m
    f = floor_alpha(m)

    def below_msqrt5(x):  # x < m sqrt(5), exact
        if m >= 0:
            return x < 0 or x * x < 5 * m * m
        return x < 0 and x * x > 5 * m * m

    assert below_msqrt5(2 * f + m) or m == 0
    assert not below_msqrt5(2 * f + 2 + m)


@given(st.integers(min_value=-(10**6), max_value=10**6), st.integers(min_value=1, max_value=60))
def test_no_forbidden_factors(start, length):
    letters = window(start, start + length).letters
    assert "00" not in letters and "111" not in letters


def test_potential_window_indexing():
    w = PotentialWindow(-3, "0110")
    assert w.stop == 0 and len(w) == 4
    assert w[-2] == 1 and w.slice(-2, -1) == "11"
    with pytest.raises(IndexError):
        w[1]
    with pytest.raises(ValueError):
        PotentialWindow(0, "012")
