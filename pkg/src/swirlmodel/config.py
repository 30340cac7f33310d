"""Run configuration: an INI-style document with a fixed, typed schema.

Sections are ``[model]``, ``[grid]``, ``[init]``, ``[output]`` and
``[sweep]``; ``#`` starts a comment.  Unknown sections or keys are errors.
:func:`emit` writes every key (defaults included) so that
``parse_config(emit(doc)) == doc``.
"""

import configparser
import math
from dataclasses import dataclass, field

from .errors import SwirlModelError

MODEL_KINDS = ("ode", "rd", "euler1d", "lagrangian")
INIT_KINDS = ("auto", "rd", "gaussian", "scaled")
SCHEMES = ("auto", "imex", "rk2", "rk3")


class ConfigError(SwirlModelError, ValueError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownKey(ConfigError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown key {name!r}")


class BadValue(ConfigError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"bad value for {key!r}: {message}")


def _float(text):
    x = float(text)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true/false")


def _floats(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(_float(p) for p in text.split(","))


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    return str(value)


# section -> key -> (parser, default)
SCHEMA = {
    "model": {
        "kind": (_choice(MODEL_KINDS), "euler1d"),
        "nu": (_float, 1.0),
        "sign": (int, 1),
        "dealias": (_bool, True),
        "scheme": (_choice(SCHEMES), "auto"),
        "cfl": (_float, 0.25),
        "cap": (_float, 0.01),
        "dt0": (_float, 0.0),
        "dt_min": (_float, 1e-13),
        "t_end": (_float, 0.01),
        "d": (_float, 2.0),
        "u0": (_float, 1e-3),
        "v0": (_float, -1e3),
    },
    "grid": {
        "n": (int, 4096),
    },
    "init": {
        "kind": (_choice(INIT_KINDS), "auto"),
        "eps": (_float, 0.0),
        "a": (_float, 1.0),
        "m": (int, 1),
        "profile_u": (str, "sin"),
        "profile_psi": (str, "sin"),
    },
    "output": {
        "dir": (str, "out"),
        "record_every": (int, 1),
        "snapshot_times": (_floats, ()),
        "snapshot_every": (int, 0),
    },
    "sweep": {
        "param": (str, ""),
        "values": (_floats, ()),
    },
}


def _validate(sections):
    m = sections["model"]
    checks = [
        ("nu", m["nu"] >= 0, "must be >= 0"),
        ("sign", m["sign"] in (1, -1), "must be 1 or -1"),
        ("cfl", m["cfl"] > 0, "must be positive"),
        ("cap", m["cap"] > 0, "must be positive"),
        ("dt0", m["dt0"] >= 0, "must be >= 0 (0 selects the default)"),
        ("dt_min", m["dt_min"] > 0, "must be positive"),
        ("t_end", m["t_end"] >= 0, "must be >= 0"),
        ("d", m["d"] >= 0, "must be >= 0"),
        ("scheme", not (m["scheme"] in ("rk2", "rk3") and m["nu"] != 0),
         "explicit Runge-Kutta schemes need nu = 0"),
    ]
    n = sections["grid"]["n"]
    checks.append(("n", n >= 8 and n & (n - 1) == 0, "must be a power of two >= 8"))
    i = sections["init"]
    checks += [
        ("eps", i["eps"] >= 0, "must be >= 0 (0 selects the default)"),
        ("a", i["a"] > 0, "must be positive"),
        ("m", i["m"] >= 1, "must be a positive integer"),
    ]
    o = sections["output"]
    checks += [
        ("record_every", o["record_every"] >= 1, "must be >= 1"),
        ("snapshot_every", o["snapshot_every"] >= 0, "must be >= 0"),
        ("snapshot_times", all(t >= 0 for t in o["snapshot_times"]), "times must be >= 0"),
    ]
    sw = sections["sweep"]
    if sw["param"]:
        sec, _, key = sw["param"].partition(".")
        ok = sec in SCHEMA and key in SCHEMA[sec] and SCHEMA[sec][key][0] in (_float, int)
        checks.append(("param", ok, "must name a numeric key as section.key"))
    for key, ok, msg in checks:
        if not ok:
            raise BadValue(key, msg)


@dataclass(frozen=True)
class ConfigDocument:
    """Validated configuration, every key present."""

    sections: dict = field(default_factory=dict)

    def __getitem__(self, section):
        return self.sections[section]

    def get(self, dotted):
        sec, _, key = dotted.partition(".")
        return self.sections[sec][key]

    def replace(self, dotted, value):
        """A new document with one key changed (and revalidated)."""
        sec, _, key = dotted.partition(".")
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise UnknownKey(dotted)
        sections = {s: dict(v) for s, v in self.sections.items()}
        parser = SCHEMA[sec][key][0]
        sections[sec][key] = int(value) if parser is int else value
        _validate(sections)
        return ConfigDocument(sections)


def defaults():
    return ConfigDocument({s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()})


def parse_config(text):
    """Parse and validate a configuration document.

    Raises:
        ParseError: malformed line (with its line number).
        UnknownKey: a section or key outside the schema.
        BadValue: a value of the wrong type or out of range.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",),
                                   interpolation=None, strict=True, empty_lines_in_values=False)
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError(exc.lineno, "key outside of a [section]") from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else 0
        raise ParseError(line, "expected 'key = value'") from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.lineno or 0, str(exc).split(":", 1)[-1].strip()) from None
    doc = defaults()
    sections = doc.sections
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise UnknownKey(f"[{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise UnknownKey(f"{sec}.{key}")
            parser = SCHEMA[sec][key][0]
            try:
                sections[sec][key] = parser(raw)
            except ValueError as exc:
                raise BadValue(key, f"{raw!r} ({exc})") from None
    _validate(sections)
    return ConfigDocument(sections)


def emit(doc):
    """Serialize every key of ``doc``; floats use repr so values round-trip exactly."""
    lines = []
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for key in keys:
            lines.append(f"{key} = {_fmt(doc.sections[sec][key])}")
        lines.append("")
    return "\n".join(lines)
