"""Scenario files: INI-style sections of typed key/value pairs.

A file holds one or more sections whose names start with ``scenario``::

    [scenario fig7]
    kind = dynamics
    N = 40
    mu_abs = 1
    kappa_tilde = 0, 0.01, 0.1
    g_ratio = 1
    tau_max = 50
    tau_points = 5000
    observables = g2

At most one of ``N``, ``mu_abs``, ``mu_phase``, ``kappa_tilde`` and ``g_ratio``
may hold a list; that list is the sweep axis.  ``linspace(a, b, n)`` and
``range(a, b)`` (inclusive of ``b``) expand to lists.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .algebra import Convention

N_CAP = 200
TAU_POINTS_CAP = 10**6
SWEEPABLE = ("N", "mu_abs", "mu_phase", "kappa_tilde", "g_ratio")
STATE_OBSERVABLES = ("means", "g2", "mandel", "identity_check")
DYNAMIC_OBSERVABLES = ("occupations", "means", "g2", "mandel", "squeezing", "entropy")
KINDS = ("state", "dynamics")


class ConfigError(ValueError):
    """Invalid scenario file; the message names the file, line and field."""


@dataclass(frozen=True)
class Scenario:
    name: str
    N: int | list[int]
    mu_abs: float | list[float] = 1.0
    mu_phase: float | list[float] = 0.0
    kappa_tilde: float | list[float] = 0.0
    g_ratio: float | list[float] = 1.0
    tau_max: float = 50.0
    tau_points: int = 5000
    convention: Convention = Convention.OPERATOR
    kind: str = "dynamics"
    observables: tuple[str, ...] = field(default_factory=tuple)

    @property
    def axis(self) -> str:
        """Name of the list-valued parameter (``kappa_tilde`` if none is a list)."""
        lists = [k for k in SWEEPABLE if isinstance(getattr(self, k), list)]
        return lists[0] if lists else "kappa_tilde"

    @property
    def axis_values(self) -> list:
        value = getattr(self, self.axis)
        return list(value) if isinstance(value, list) else [value]

    def point(self, value) -> "Scenario":
        """The scenario with its sweep axis pinned to ``value``."""
        return replace(self, **{self.axis: value})

    def resolved(self) -> dict:
        out = asdict(self)
        out["convention"] = self.convention.value
        out["observables"] = list(self.observables)
        out["axis"] = self.axis
        return out


_LIST_FN = re.compile(r"^\s*(linspace|range)\s*\((.*)\)\s*$")


def _locate(text: str, section: str, key: str) -> int | None:
    in_section = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            in_section = stripped[1:-1].strip() == section
        elif in_section and re.match(rf"^{re.escape(key)}\s*[=:]", stripped, re.IGNORECASE):
            return lineno
    return None


def _split_list(raw: str) -> list[str]:
    m = _LIST_FN.match(raw)
    if m:
        args = [a.strip() for a in m.group(2).split(",")]
        if m.group(1) == "linspace":
            if len(args) != 3:
                raise ValueError("linspace needs (start, stop, count)")
            return [repr(float(v)) for v in np.linspace(float(args[0]), float(args[1]), int(args[2]))]
        if len(args) != 2:
            raise ValueError("range needs (start, stop)")
        return [str(v) for v in range(int(args[0]), int(args[1]) + 1)]
    return [p.strip() for p in raw.split(",")]


def _parse_scalar_or_list(raw: str, cast, allow_list: bool):
    items = _split_list(raw)
    is_list = _LIST_FN.match(raw) is not None or len(items) > 1
    if is_list and not allow_list:
        raise ValueError("a single value is required")
    if any(item == "" for item in items):
        raise ValueError("empty list entry")
    values = [cast(item) for item in items]
    if is_list:
        if not values:
            raise ValueError("empty list")
        return values
    return values[0]


def _as_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _parse_section(name: str, sec, text: str, source: str, overrides: dict) -> Scenario:
    def fail(key, message):
        line = _locate(text, name, key)
        where = f"{source}:{line}" if line else source
        raise ConfigError(f"{where}: [{name}] field '{key}': {message}")

    known = {
        "name", "n", "mu_abs", "mu_phase", "kappa_tilde", "g_ratio", "tau_max",
        "tau_points", "convention", "kind", "observables",
    }
    for key in sec:
        if key not in known:
            fail(key, "unknown field")

    def get(key, cast, default=None, required=False, allow_list=False):
        if key.lower() not in sec:
            if required:
                fail(key, "missing required field")
            return default
        raw = sec[key.lower()]
        if raw.strip() == "":
            fail(key, "empty value")
        try:
            return _parse_scalar_or_list(raw, cast, allow_list)
        except (ValueError, TypeError) as exc:
            fail(key, str(exc))

    label = name.split(None, 1)[1].strip() if len(name.split(None, 1)) > 1 else "scenario"
    values = {
        "name": get("name", str, default=label),
        "N": get("N", _as_int, required=True, allow_list=True),
        "mu_abs": get("mu_abs", float, default=1.0, allow_list=True),
        "mu_phase": get("mu_phase", float, default=0.0, allow_list=True),
        "kappa_tilde": get("kappa_tilde", float, default=0.0, allow_list=True),
        "g_ratio": get("g_ratio", float, default=1.0, allow_list=True),
        "tau_max": get("tau_max", float, default=50.0),
        "tau_points": get("tau_points", _as_int, default=5000),
        "kind": overrides.get("kind") or get("kind", str, default="dynamics"),
    }
    if not re.fullmatch(r"[A-Za-z0-9_.\-]+", values["name"]):
        fail("name", "use letters, digits, '_', '-' or '.' only")
    try:
        values["convention"] = Convention.parse(overrides.get("convention") or get("convention", str, default="operator"))
    except ValueError as exc:
        fail("convention", str(exc))

    kind = values["kind"]
    if kind not in KINDS:
        fail("kind", f"must be one of {', '.join(KINDS)}")
    allowed = STATE_OBSERVABLES if kind == "state" else DYNAMIC_OBSERVABLES
    obs_raw = overrides.get("observables") or sec.get("observables", "")
    observables = tuple(o.strip() for o in obs_raw.split(",") if o.strip()) or (allowed[:3] if kind == "state" else ("occupations",))
    for o in observables:
        if o not in allowed:
            fail("observables", f"'{o}' is not available for kind '{kind}' (choose from {', '.join(allowed)})")
    values["observables"] = observables

    lists = [k for k in SWEEPABLE if isinstance(values[k], list)]
    if len(lists) > 1:
        fail(lists[1], f"only one list-valued axis is allowed, found {', '.join(lists)}")

    def each(key):
        v = values[key]
        return v if isinstance(v, list) else [v]

    if any(n < 0 or n > N_CAP for n in each("N")):
        fail("N", f"must lie in [0, {N_CAP}]")
    if any(not (m >= 0 and np.isfinite(m)) for m in each("mu_abs")):
        fail("mu_abs", "must be finite and >= 0")
    if any(not np.isfinite(p) for p in each("mu_phase")):
        fail("mu_phase", "must be finite")
    if any(not (k >= 0 and np.isfinite(k)) for k in each("kappa_tilde")):
        fail("kappa_tilde", "must be finite and >= 0")
    if any(not (g > 0 and np.isfinite(g)) for g in each("g_ratio")):
        fail("g_ratio", "must be finite and > 0")
    if not (values["tau_max"] > 0 and np.isfinite(values["tau_max"])):
        fail("tau_max", "must be finite and > 0")
    if not 2 <= values["tau_points"] <= TAU_POINTS_CAP:
        fail("tau_points", f"must lie in [2, {TAU_POINTS_CAP}]")
    return Scenario(**values)


def parse_scenarios(
    text: str,
    source: str = "<config>",
    convention: str | None = None,
    kind: str | None = None,
    observables: str | None = None,
) -> list[Scenario]:
    """Parse every ``[scenario ...]`` section; keyword arguments override file values."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    sections = [s for s in parser.sections() if s.split()[0] == "scenario"]
    if not sections:
        raise ConfigError(f"{source}: no [scenario ...] section found")
    for s in parser.sections():
        if s not in sections:
            raise ConfigError(f"{source}:{_locate_section(text, s)}: unknown section [{s}]")
    overrides = {"convention": convention, "kind": kind, "observables": observables}
    scenarios = [_parse_section(s, parser[s], text, source, overrides) for s in sections]
    names = [sc.name for sc in scenarios]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ConfigError(f"{source}: duplicate scenario name(s) {', '.join(sorted(dup))}")
    return scenarios


def _locate_section(text, section):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return lineno
    return "?"


def load_scenarios(path: str | Path, **overrides) -> list[Scenario]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_scenarios(text, str(path), **overrides)
