import math
import os
from collections.abc import Sequence
from numbers import Number

import numpy as np


def _is_real(value):
    return isinstance(value, Number) and not isinstance(value, bool)


def _allows_bool(value_type):
    types = value_type if isinstance(value_type, tuple) else (value_type,)
    return bool in types or object in types


def _checked(value, *, meta=None, name=None):
    """Convert and validate ``value`` against the metadata of option ``name``"""
    where = "" if name is None else f" for key={name}"
    if meta is None:
        return value
    if meta.value_type is float and _is_real(value):
        value = float(value)
    elif meta.value_type is tuple and isinstance(value, (list, np.ndarray)):
        value = tuple(float(v) for v in value)

    if meta.value_type is not None and (
        not isinstance(value, meta.value_type)
        # bool is a subclass of int
        or (isinstance(value, bool) and not _allows_bool(meta.value_type))
    ):
        raise TypeError(
            f"{value} is not of type {_stringify_sequence_of_types(meta.value_type)}"
            f"{where}"
        )

    if meta.allowed is not None and value not in meta.allowed:
        raise ValueError(f"{value} is not in the allowed values {meta.allowed}{where}")

    if meta.check_all is not None:
        for check in meta.check_all:
            if not check(value):
                raise ValueError(
                    f"The value {value}{where} fails the check "
                    f"{getattr(check, '__name__', check)}"
                )
    return value


def _options_table_string(options):
    """Return a string containing a table of options set"""
    formatstring = "{:<50}|  {:<27}\n"
    result = (
        "\nOptions\n=======\n" + formatstring.format("Name", "Value") + "=" * 80 + "\n"
    )

    def subsection(options, title):
        text = ""
        if title is not None:
            text += "-" * 80 + "\n" + "{:<80}\n".format(title) + "-" * 80 + "\n"
        sections = list(options.get_subsections())
        for key, value in sorted(options.items()):
            if key in sections:
                continue
            value_string = str(value)
            if options.is_default(key):
                value_string = "{:<15} (default) ".format(value_string)
            text += formatstring.format(key, value_string)
        for key in sections:
            text += subsection(options[key], key if title is None else f"{title}:{key}")
        return text

    return result + subsection(options, None)


def _stringify_sequence_of_types(types):
    if isinstance(types, Sequence):
        return tuple(_stringify_sequence_of_types(t) for t in types)
    return types.__name__


def parse_grid(text):
    """Parse ``start:step:stop`` (stop included) or a comma separated list

    Returns a tuple of floats.
    """
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must have the form start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"grid {text!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + i * step) for i in range(count))
    values = tuple(float(v) for v in text.split(",") if v.strip())
    if not values:
        raise ValueError(f"grid {text!r} is empty")
    return values


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def worker_count(requested=None):
    """Number of worker threads, capped by the BRS_THREADS environment variable"""
    count = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("BRS_THREADS")
    if cap is not None:
        try:
            count = min(count, int(cap))
        except ValueError:
            raise ValueError(f"BRS_THREADS={cap!r} is not an integer")
    return max(1, int(count))
