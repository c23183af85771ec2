import pytest

from ..withmeta import WithMeta
from ..checks import NoneType, at_least, is_finite, is_positive


class TestWithMeta:
    def test_init(self):
        x = WithMeta(1)
        assert x.value == 1

    def test_doc(self):
        x = WithMeta(3.0, doc="Rician factor K")
        assert x.doc == "Rician factor K"

    def test_str_default(self):
        # a str default is a plain value, never a reference to another option
        x = WithMeta("figures", value_type=str)
        assert x.evaluate_expression({"figures": "elsewhere"}) == "figures"
        x = WithMeta("out.csv", value_type=[str, NoneType])
        assert x.evaluate_expression({"out.csv": 1.0}) == "out.csv"
        with pytest.raises(TypeError):
            WithMeta("sigma2", value_type=float).evaluate_expression({"sigma2": 4.0})

    def test_expression_default(self):
        x = WithMeta(
            lambda options: 10.0 ** (options["gamma_bar_db"] / 10.0)
            / (1.0 + options["k_factor"])
        )
        assert x.evaluate_expression({"gamma_bar_db": 10.0, "k_factor": 9.0}) == 1.0
        with pytest.raises(KeyError):
            x.evaluate_expression({"k_factor": 9.0})

    def test_float_conversion(self):
        x = WithMeta(3, value_type=float)
        assert x.value == 3.0
        assert isinstance(x.evaluate_expression({}), float)

        x.value = 2
        assert isinstance(x.evaluate_expression({}), float)

    def test_bool_is_not_converted(self):
        x = WithMeta(True, value_type=float)
        with pytest.raises(TypeError):
            x.evaluate_expression({})

    def test_tuple_conversion(self):
        x = WithMeta([1, 2, 5], value_type=tuple)
        assert x.evaluate_expression({}) == (1.0, 2.0, 5.0)

    def test_value_type_sequence(self):
        x = WithMeta(3.0, value_type=[float, NoneType])
        assert x.evaluate_expression({}) == 3.0

        x.value = None
        assert x.evaluate_expression({}) is None

        x.value = 3
        with pytest.raises(TypeError):
            x.evaluate_expression({})

    def test_allowed(self):
        x = WithMeta("rho", allowed=["rho", "outage", "lcr", "afd"])
        assert x.allowed == ("rho", "outage", "lcr", "afd")
        assert x.evaluate_expression({}) == "rho"
        x.value = "pdf"
        with pytest.raises(ValueError):
            x.evaluate_expression({})

    def test_allowed_and_check_all(self):
        with pytest.raises(ValueError):
            WithMeta(1.0, allowed=[1.0], check_all=is_positive)

    def test_check_all(self):
        x = WithMeta(2.0, value_type=float, check_all=(is_finite, at_least(0.5)))
        assert x.evaluate_expression({}, name="m") == 2.0
        x.value = 0.25
        with pytest.raises(ValueError, match="key=m"):
            x.evaluate_expression({}, name="m")

    def test_check_all_not_callable(self):
        with pytest.raises(ValueError):
            WithMeta(1.0, check_all=[is_positive, 3.0])

    def test_expression_check_all(self):
        x = WithMeta(lambda options: 1.0 - options["rho"], check_all=is_positive)
        assert x.evaluate_expression({"rho": 0.25}) == 0.75
        with pytest.raises(ValueError):
            x.evaluate_expression({"rho": 1.0})

    def test_copy(self):
        x = WithMeta(1.0, doc="K", value_type=float, check_all=is_positive)
        y = WithMeta(x)
        assert y == x
        assert y is not x
        with pytest.raises(ValueError):
            WithMeta(x, doc="other")

    def test_equality(self):
        assert WithMeta(1.0, doc="a") == WithMeta(1.0, doc="a")
        assert WithMeta(1.0, doc="a") != WithMeta(1.0, doc="b")
        assert WithMeta(1.0) != 1.0
