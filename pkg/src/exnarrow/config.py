"""Run configuration: a sectioned key-value (INI) file.

Example::

    # energies in units of Omega, times in units of 1/Omega
    [physical]
    bath = lorentzian         ; lorentzian | markovian
    n_monomers = 2, 3, 6
    site_energy = 0
    coupling = 0, -0.25, -0.5, -1, -2
    huang_rhys = 0.3
    width = 0.4
    center_frequency = 1

    [numerical]
    max_quanta = auto
    dt = auto

    [output]
    directory = results
    formats = csv, json

Every key in [numerical] also accepts ``auto``, which selects the
documented default rule.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigurationError
from .model import Boundary, LorentzianBath, MarkovianBath
from .pipeline import NumericalOptions

BATH_KINDS = ("lorentzian", "markovian")
FORMATS = ("csv", "json")

_PHYSICAL = {"bath", "n_monomers", "site_energy", "coupling", "boundary", "center_frequency",
             "huang_rhys", "width", "markovian_rate"}
_NUMERICAL = {"max_quanta", "m_start", "m_limit", "m_tol", "dt", "t_max", "tol", "floor", "dnu",
              "nu_halfwidth", "series_tol", "max_dimension", "workers", "certify"}
_OUTPUT = {"directory", "formats", "dump_traces"}
_SECTIONS = {"physical": _PHYSICAL, "numerical": _NUMERICAL, "output": _OUTPUT}


@dataclass(frozen=True)
class RunConfig:
    bath_kind: str = "lorentzian"
    n_monomers: tuple[int, ...] = (1,)
    site_energy: float = 0.0
    couplings: tuple[float, ...] = (0.0,)
    boundary: str = "auto"
    center_frequency: float = 1.0
    huang_rhys: tuple[float, ...] = (0.3,)
    widths: tuple[float, ...] = (0.4,)
    markovian_rate: float | None = None
    numerics: NumericalOptions = field(default_factory=NumericalOptions)
    series_tol: float = 1e-12
    workers: int = 1
    directory: str = "results"
    formats: tuple[str, ...] = ("csv", "json")
    dump_traces: bool = False
    source: str | None = None

    def __post_init__(self):
        if self.bath_kind not in BATH_KINDS:
            raise ConfigurationError(f"bath must be one of {BATH_KINDS}, got {self.bath_kind!r}")
        if self.bath_kind == "markovian" and self.markovian_rate is None:
            raise ConfigurationError("bath = markovian requires markovian_rate")
        if any(n < 1 for n in self.n_monomers):
            raise ConfigurationError("n_monomers must be positive")
        if self.boundary != "auto":
            for n in self.n_monomers:
                if Boundary.for_size(n).value != self.boundary:
                    raise ConfigurationError(f"boundary {self.boundary!r} is invalid for N={n}")
        for f in self.formats:
            if f not in FORMATS:
                raise ConfigurationError(f"unknown output format {f!r}; choose from {FORMATS}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if not self.series_tol > 0:
            raise ConfigurationError("series_tol must be positive")
        self.bath()  # validates bath parameters

    def bath(self, huang_rhys: float | None = None, width: float | None = None):
        """The configured bath; for a Lorentzian the first (X, gamma) pair unless given."""
        if self.bath_kind == "markovian":
            return MarkovianBath(self.markovian_rate)
        x = self.huang_rhys[0] if huang_rhys is None else huang_rhys
        g = self.widths[0] if width is None else width
        if not g > 0:
            raise ConfigurationError("width must be > 0 for a Lorentzian bath")
        return LorentzianBath(x, g, self.center_frequency)

    def resolved(self) -> dict:
        """Nested plain-data view of every setting, defaults included."""
        return {
            "physical": {
                "bath": self.bath_kind,
                "n_monomers": list(self.n_monomers),
                "site_energy": self.site_energy,
                "coupling": list(self.couplings),
                "boundary": self.boundary,
                "center_frequency": self.center_frequency,
                "huang_rhys": list(self.huang_rhys),
                "width": list(self.widths),
                "markovian_rate": self.markovian_rate,
            },
            "numerical": dict(self.numerics.as_dict(), series_tol=self.series_tol, workers=self.workers),
            "output": {
                "directory": self.directory,
                "formats": list(self.formats),
                "dump_traces": self.dump_traces,
            },
        }


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]", s)
        if m:
            current = m.group(1).strip().lower()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return lineno
    return None


class _Reader:
    def __init__(self, parser, text, origin):
        self.parser, self.text, self.origin = parser, text, origin

    def fail(self, section, key, msg):
        line = _line_of(self.text, section, key)
        where = f"{self.origin}:{line}" if line else self.origin
        raise ConfigurationError(f"{where}: [{section}] {key}: {msg}")

    def raw(self, section, key):
        if not self.parser.has_option(section, key):
            return None
        value = self.parser.get(section, key).strip()
        return None if value.lower() in ("", "auto") else value

    def number(self, section, key, default, cast=float, positive=False, allow_zero=False):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            out = cast(value)
        except ValueError:
            self.fail(section, key, f"cannot parse {value!r} as {cast.__name__}")
        if isinstance(out, float) and not math.isfinite(out):
            self.fail(section, key, "must be finite")
        if positive and not (out > 0 or (allow_zero and out == 0)):
            self.fail(section, key, f"must be {'>= 0' if allow_zero else '> 0'}, got {value}")
        return out

    def numbers(self, section, key, default, cast=float):
        value = self.raw(section, key)
        if value is None:
            return default
        items = [v.strip() for v in re.split(r"[,\s]+", value) if v.strip()]
        try:
            return tuple(cast(v) for v in items)
        except ValueError:
            self.fail(section, key, f"cannot parse {value!r} as a list of {cast.__name__}")

    def flag(self, section, key, default):
        if not self.parser.has_option(section, key):
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            self.fail(section, key, "expected yes/no")


def parse_config(text: str, origin: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigurationError(f"{origin}: {exc}") from exc
    r = _Reader(parser, text, origin)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigurationError(f"{origin}: unknown section [{section}]")
        for key in parser.options(section):
            if key not in _SECTIONS[section]:
                r.fail(section, key, "unknown key")

    P, N, O = "physical", "numerical", "output"
    bath = (r.raw(P, "bath") or "lorentzian").lower()
    if bath not in BATH_KINDS:
        r.fail(P, "bath", f"must be one of {', '.join(BATH_KINDS)}")
    defaults = NumericalOptions()
    numerics = replace(
        defaults,
        max_quanta=r.number(N, "max_quanta", None, int, positive=True, allow_zero=True),
        m_start=r.number(N, "m_start", defaults.m_start, int, positive=True, allow_zero=True),
        m_limit=r.number(N, "m_limit", defaults.m_limit, int, positive=True),
        m_tol=r.number(N, "m_tol", defaults.m_tol, positive=True),
        dt=r.number(N, "dt", None, positive=True),
        t_max=r.number(N, "t_max", None, positive=True),
        tol=r.number(N, "tol", defaults.tol, positive=True),
        floor=r.number(N, "floor", defaults.floor, positive=True),
        dnu=r.number(N, "dnu", None, positive=True),
        nu_halfwidth=r.number(N, "nu_halfwidth", defaults.nu_halfwidth, positive=True),
        max_dimension=r.number(N, "max_dimension", defaults.max_dimension, int, positive=True),
        certify=r.flag(N, "certify", True),
    )
    n_list = r.numbers(P, "n_monomers", (1,), int)
    if any(n < 1 for n in n_list):
        r.fail(P, "n_monomers", "values must be >= 1")
    x_list = r.numbers(P, "huang_rhys", (0.3,))
    if any(not (x >= 0) for x in x_list):
        r.fail(P, "huang_rhys", "values must be >= 0")
    widths = r.numbers(P, "width", (0.4,))
    if any(not (g > 0) for g in widths):
        r.fail(P, "width", "values must be > 0")
    rate = r.number(P, "markovian_rate", None, positive=True)
    if bath == "markovian" and rate is None:
        r.fail(P, "markovian_rate", "required when bath = markovian")
    boundary = (r.raw(P, "boundary") or "auto").lower()
    if boundary != "auto" and boundary not in {b.value for b in Boundary}:
        r.fail(P, "boundary", f"unknown boundary {boundary!r}")
    formats = tuple(f.lower() for f in r.numbers(O, "formats", ("csv", "json"), str))
    for f in formats:
        if f not in FORMATS:
            r.fail(O, "formats", f"unknown format {f!r}")
    try:
        return RunConfig(
            bath_kind=bath,
            n_monomers=n_list,
            site_energy=r.number(P, "site_energy", 0.0),
            couplings=r.numbers(P, "coupling", (0.0,)),
            boundary=boundary,
            center_frequency=r.number(P, "center_frequency", 1.0, positive=True),
            huang_rhys=x_list,
            widths=widths,
            markovian_rate=rate,
            numerics=numerics,
            series_tol=r.number(N, "series_tol", 1e-12, positive=True),
            workers=r.number(N, "workers", 1, int, positive=True),
            directory=r.raw(O, "directory") or "results",
            formats=formats,
            dump_traces=r.flag(O, "dump_traces", False),
            source=origin,
        )
    except ConfigurationError as exc:
        raise ConfigurationError(f"{origin}: {exc}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
