from copy import deepcopy
from pathlib import Path

from ._utils import _checked, _options_table_string
from .withmeta import WithMeta


class OptionsFactory:
    """Factory to create Options instances"""

    def __init__(self, *args, **kwargs):
        """Define the members of Options instances that this factory will create

        Parameters
        ----------
        *args : OptionsFactory
            Factories whose options are merged into this one, so that e.g. the CLI
            factory can collect the BrsParams options and the Monte Carlo options.
            A key may only be repeated with an identical definition.
        **kwargs : key=[WithMeta, OptionsFactory, value or expression]
            Keys are the option names. A value is used as the default; a callable
            is evaluated with the Options being created as its argument, e.g.

                factory = OptionsFactory(
                    k_factor=WithMeta(1.0, value_type=float, check_all=is_non_negative),
                    gamma_bar_db=0.0,
                    sigma2=lambda options: (
                        10.0 ** (options.gamma_bar_db / 10.0) / (1.0 + options.k_factor)
                    ),
                    mc=OptionsFactory(seed=WithMeta(7, value_type=int)),
                )

            An OptionsFactory value creates a subsection.
        """
        self.__defaults = {}
        for a in args:
            if not isinstance(a, OptionsFactory):
                raise ValueError(
                    f"Positional arguments to OptionsFactory must be OptionsFactory "
                    f"instances, was passed a {type(a)}"
                )
            for key, value in a.defaults.items():
                if key in self.__defaults and value != self.__defaults[key]:
                    raise ValueError(
                        f"{key} has been passed more than once with different values"
                    )
                self.__defaults[key] = value
        for key, value in kwargs.items():
            if key in self.__defaults:
                raise ValueError(f"{key} has been passed more than once")
            self.__defaults[key] = (
                value if isinstance(value, OptionsFactory) else WithMeta(value)
            )

    def __eq__(self, other):
        return isinstance(other, OptionsFactory) and self.defaults == other.defaults

    @property
    def defaults(self):
        """Get the default values defined for this OptionsFactory"""
        return deepcopy(self.__defaults)

    @property
    def doc(self):
        """Get the documentation for the options defined for this OptionsFactory"""
        return {
            key: value.doc
            for key, value in self.__defaults.items()
            if isinstance(value, WithMeta)
        }

    def __contains__(self, key):
        return key in self.__defaults

    def create(self, values=None):
        """Create an Options instance

        Parameters
        ----------
        values : dict or Options, optional
            Non-default values. Keys that are not options of this factory raise a
            KeyError, so that misspelled entries in a config file are reported.
        """
        return OptionsFactory.Options(_Resolver(self.__defaults, values))

    def create_from_file(self, path):
        """Create an Options instance from a JSON or YAML file

        Parameters
        ----------
        path : str or Path
            ``.yaml``/``.yml`` files need the optional PyYAML dependency, anything
            else is read as JSON
        """
        return self.create(load_config(path))

    def get_help_table(self, prefix=""):
        """Return a ReStructuredText table of the options with their help text and
        default values"""
        resolver = _Resolver(self.__defaults, None)
        rows = []

        def collect(resolver, defaults, section):
            for key in sorted(defaults):
                value = defaults[key]
                name = key if section is None else f"{section}.{key}"
                if isinstance(value, OptionsFactory):
                    collect(resolver[key], value.defaults, name)
                    continue
                try:
                    default = resolver[key]
                except (ValueError, TypeError, KeyError):
                    default = "*Required*"
                rows.append((name, str(value.doc), str(default)))

        collect(resolver, self.__defaults, None)

        headings = ("Option", "Description", "Default")
        widths = [
            max([len(headings[i])] + [len(row[i]) for row in rows]) for i in range(3)
        ]

        def line(char):
            return prefix + "+" + "+".join(char * w for w in widths) + "+\n"

        def row_text(row):
            cells = (cell.ljust(w) for cell, w in zip(row, widths))
            return prefix + "|" + "|".join(cells) + "|\n"

        table = line("-") + row_text(headings) + line("=")
        for row in rows:
            table += row_text(row) + line("-")
        return table

    class Options:
        """Options with values fixed when the instance is created"""

        __frozen = False

        def __init__(self, resolver):
            self.__data = {}
            for key in resolver.keys():
                value = resolver[key]
                if isinstance(value, _Resolver):
                    value = OptionsFactory.Options(value)
                self.__data[key] = value
            self.__doc = resolver.doc
            self.__is_default = {
                key: resolver.is_default(key) for key in resolver.keys()
            }
            self.__frozen = True

        @property
        def doc(self):
            return deepcopy(self.__doc)

        def as_table(self):
            """Return a string with a formatted table of the settings"""
            return _options_table_string(self)

        def to_dict(self, with_defaults=True):
            """Convert to a (nested) dict

            Parameters
            ----------
            with_defaults : bool, default True
                Include values that were not set explicitly
            """
            result = {}
            for key, value in self.items():
                if isinstance(value, OptionsFactory.Options):
                    result[key] = value.to_dict(with_defaults)
                elif with_defaults or not self.is_default(key):
                    result[key] = value
            return result

        def get_subsections(self):
            for key, value in self.__data.items():
                if isinstance(value, OptionsFactory.Options):
                    yield key

        def __getitem__(self, key):
            try:
                return deepcopy(self.__data[key])
            except KeyError:
                raise KeyError(f"This Options does not contain {key}")

        def __setitem__(self, key, value):
            raise TypeError("Options does not allow assigning to keys")

        def __getattr__(self, key):
            if key == "_Options__data":
                # __data is looked up before it exists while unpickling
                raise AttributeError(key)
            if key in self.__data:
                return self.__getitem__(key)
            raise AttributeError(f"This Options has no attribute {key}.")

        def __setattr__(self, key, value):
            if self.__frozen:
                raise TypeError("Options does not allow assigning to attributes")
            super().__setattr__(key, value)

        def __getstate__(self):
            return vars(self)

        def __setstate__(self, state):
            vars(self).update(state)

        def is_default(self, key):
            try:
                value = self.__is_default[key]
            except KeyError:
                raise KeyError(f"{key} is not in this Options")
            return value

        def __contains__(self, key):
            return key in self.__data

        def __len__(self):
            return len(self.__data)

        def __iter__(self):
            return iter(self.keys())

        def keys(self):
            return self.__data.keys()

        def values(self):
            for value in self.__data.values():
                yield deepcopy(value)

        def items(self):
            return zip(self.keys(), self.values())


class _Resolver:
    """Evaluates defaults of one section, detecting circular definitions"""

    def __init__(self, defaults, values, parent=None):
        values = {} if values is None else dict(values)
        unknown = sorted(set(values) - set(defaults))
        if unknown:
            raise KeyError(f"{unknown} are not options of this section")
        self.parent = parent
        self.doc = {}
        self.__defaults = {}
        self.__data = {}
        self.__cache = {}
        self.__chain = []
        for key, meta in defaults.items():
            if isinstance(meta, OptionsFactory):
                section_values = values.pop(key, None)
                if section_values is not None and not isinstance(section_values, dict):
                    section_values = dict(section_values.to_dict(with_defaults=False))
                self.__data[key] = _Resolver(meta.defaults, section_values, self)
            else:
                self.__defaults[key] = meta
                self.doc[key] = meta.doc
        for key, value in values.items():
            self.__data[key] = _checked(value, meta=self.__defaults[key], name=key)

    def keys(self):
        return list(self.__defaults) + [
            key for key in self.__data if key not in self.__defaults
        ]

    def is_default(self, key):
        value = self[key]
        if isinstance(value, _Resolver):
            return {k: value.is_default(k) for k in value.keys()}
        return key not in self.__data

    def __contains__(self, key):
        return key in self.__defaults or key in self.__data

    def __getattr__(self, key):
        if key.startswith("_"):
            raise AttributeError(key)
        try:
            return self[key]
        except KeyError:
            raise AttributeError(f"This Options has no attribute {key}.")

    def __getitem__(self, key):
        if key in self.__data:
            return self.__data[key]
        if key in self.__cache:
            return self.__cache[key]
        if key not in self.__defaults:
            if self.parent is not None:
                # expressions in a section may refer to options of enclosing sections
                return self.parent[key]
            raise KeyError(f"This Options does not contain {key}")
        if key in self.__chain:
            chain = self.__chain[self.__chain.index(key) :]
            self.__chain = []
            raise ValueError(
                f"Circular definition of default values. At least one of {chain} "
                f"must have a definite value"
            )
        self.__chain.append(key)
        try:
            value = self.__defaults[key].evaluate_expression(self, name=key)
        finally:
            if self.__chain:
                self.__chain.pop()
        self.__cache[key] = value
        return value


def load_config(path):
    """Read a JSON or YAML config file into a dict"""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        if path.suffix.lower() in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(f)
        else:
            import json

            data = json.load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must contain a mapping at top level")
    return data
