from collections.abc import Sequence

from ._utils import _checked, _is_real


def _as_tuple(value):
    if (not isinstance(value, Sequence)) or isinstance(value, str):
        return (value,)
    return tuple(value)


class WithMeta:
    """Default value or expression for an option, together with its metadata"""

    def __init__(
        self, value, *, doc=None, value_type=None, allowed=None, check_all=None
    ):
        """
        Parameters
        ----------
        value : expression, value, or WithMeta
            - A callable is evaluated as ``value(options)`` to give the default, so a
              default can depend on other options
            - Anything else is used as the default directly
            - A WithMeta is copied, in which case no other argument may be given
        doc : str, optional
            Help text, shown in the CLI help table
        value_type : type or sequence of types, optional
            Required type of the value. Numbers are converted when value_type is
            float, lists are converted when value_type is tuple
        allowed : value or sequence of values, optional
            The value must be one of these. Cannot be combined with check_all
        check_all : callable or sequence of callables, optional
            Each must return True for the value
        """
        if isinstance(value, WithMeta):
            if any(x is not None for x in (doc, value_type, allowed, check_all)):
                raise ValueError(
                    f"doc={doc}, value_type={value_type}, allowed={allowed} and "
                    f"check_all={check_all} must be None when copying a WithMeta"
                )
            self.value = value.value
            self.doc = value.doc
            self.value_type = value.value_type
            self.allowed = value.allowed
            self.check_all = value.check_all
            return

        if allowed is not None and check_all is not None:
            raise ValueError("Cannot set both 'allowed' and 'check_all'")

        self.value = float(value) if value_type is float and _is_real(value) else value
        self.doc = doc
        self.value_type = (
            tuple(value_type) if isinstance(value_type, Sequence) else value_type
        )
        self.allowed = None if allowed is None else _as_tuple(allowed)

        if check_all is None:
            self.check_all = None
        else:
            self.check_all = _as_tuple(check_all)
            for check in self.check_all:
                if not callable(check):
                    raise ValueError(
                        f"check {check} passed in check_all is not callable"
                    )

    def __eq__(self, other):
        if not isinstance(other, WithMeta):
            return False
        return (
            self.value == other.value
            and self.doc == other.doc
            and self.value_type == other.value_type
            and self.allowed == other.allowed
            and self.check_all == other.check_all
        )

    def __repr__(self):
        return (
            f"WithMeta({self.value}, doc={self.doc}, value_type={self.value_type}, "
            f"allowed={self.allowed}, check_all={self.check_all})"
        )

    __str__ = __repr__

    def evaluate_expression(self, options, *, name=None):
        default = self.value
        if callable(default):
            default = default(options)
        return _checked(default, meta=self, name=name)
