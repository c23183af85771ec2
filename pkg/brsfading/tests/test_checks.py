import math

from ..checks import (
    at_least,
    is_finite,
    is_grid,
    is_non_negative,
    is_positive,
    is_probability,
)


class TestValueCheckUtilities:
    def test_is_positive(self):
        assert is_positive(1)
        assert not is_positive(-1)
        assert not is_positive(0.0)
        assert not is_positive(None)

    def test_is_non_negative(self):
        assert is_non_negative(1)
        assert not is_non_negative(-1)
        assert is_non_negative(0.0)
        assert not is_non_negative(None)

    def test_is_finite(self):
        assert is_finite(1e300)
        assert not is_finite(math.inf)
        assert not is_finite(math.nan)
        assert not is_finite("1.0")

    def test_is_probability(self):
        assert is_probability(0.0)
        assert is_probability(1.0)
        assert is_probability(0.3)
        assert not is_probability(1.0000001)
        assert not is_probability(-0.1)
        assert not is_probability(None)

    def test_at_least(self):
        check = at_least(0.5)
        assert check(0.5)
        assert check(20)
        assert not check(0.49)
        assert not check(None)
        assert check.__name__ == "at_least(0.5)"

    def test_is_grid(self):
        assert is_grid((0.0, 1.0, 2.0))
        assert is_grid([3.0])
        assert not is_grid(())
        assert not is_grid((0.0, math.nan))
        assert not is_grid(3.0)
