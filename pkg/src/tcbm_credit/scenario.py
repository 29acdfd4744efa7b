"""Scenario files: a sectioned ``key = value`` format read with configparser.

Every key is checked against a schema; unknown keys and sections are errors
and carry the line number they were read from. Parsed values are kept verbatim
(``L0``, ``sigma2`` rather than ``x``, ``sigma``) so that ``emit`` followed by
``parse_scenario`` reproduces a scenario exactly.
"""
from __future__ import annotations

import configparser
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .brownian import BrownianParams
from .credit import DEFAULT_LEG_FACTORS, FirmCredit
from .errors import DomainError, ScenarioError
from .montecarlo import SimConfig
from .portfolio import FirmFactorSpec, PortfolioSpec
from .quadrature import QuadratureConfig
from .timechange import (
    DeterministicClock,
    ExponentialSubordinator,
    GammaSubordinator,
    IGSubordinator,
    IntegratedCIR,
    IntegratedOUJump,
    TimeChange,
)

LEVY_FAMILIES = ("exponential", "gamma", "ig", "deterministic")
ALL_FAMILIES = LEVY_FAMILIES + ("cir", "oujump")
FAMILY_KEYS = {
    "exponential": ("a", "b", "c"),
    "gamma": ("a", "b", "c"),
    "ig": ("beta_tilde", "gamma_tilde"),
    "deterministic": ("rate",),
    "cir": ("a", "b", "c", "lambda0"),
    "oujump": ("a", "b", "c", "lambda0"),
}
SPACINGS = ("linear", "log")
TARGET_ANNUAL_VARIANCE = 0.09
VARIANCE_TOL = 1e-3

_FIRM_RE = re.compile(r"^portfolio\.firm\.([A-Za-z0-9_-]+)$")
_IDIO_RE = re.compile(r"^portfolio\.firm\.([A-Za-z0-9_-]+)\.idio$")


class ScenarioWarning(UserWarning):
    pass


# ---------------------------------------------------------------- value types

@dataclass(frozen=True)
class ClockSpec:
    family: str
    params: tuple[tuple[str, float], ...]
    normalized: bool = False

    def value(self, key):
        return dict(self.params)[key]

    def build(self) -> TimeChange:
        p = dict(self.params)
        n = self.normalized
        if self.family == "exponential":
            return ExponentialSubordinator(p["a"], p["b"], p["c"], n)
        if self.family == "gamma":
            return GammaSubordinator(p["a"], p["b"], p["c"], n)
        if self.family == "ig":
            return IGSubordinator(p["beta_tilde"], p["gamma_tilde"], n)
        if self.family == "deterministic":
            return DeterministicClock(p["rate"])
        if self.family == "cir":
            return IntegratedCIR(p["a"], p["b"], p["c"], p["lambda0"], n)
        if self.family == "oujump":
            return IntegratedOUJump(p["a"], p["b"], p["c"], p["lambda0"], n)
        raise DomainError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class GridSpec:
    start: float = 0.05
    stop: float = 30.0
    count: int = 120
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in SPACINGS:
            raise DomainError(f"spacing must be one of {SPACINGS}")
        if self.count < 1:
            raise DomainError("count must be >= 1")
        if not 0 <= self.start <= self.stop:
            raise DomainError("grid needs 0 <= start <= stop")
        if self.spacing == "log" and self.start <= 0:
            raise DomainError("log spacing needs start > 0")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def from_string(cls, text: str) -> "GridSpec":
        """Parse ``start,stop,count,linear|log``."""
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 4:
            raise DomainError("maturity grid must be start,stop,count,linear|log")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])
        except ValueError as exc:
            raise DomainError(f"bad maturity grid {text!r}: {exc}") from None


@dataclass(frozen=True)
class WeightedClock:
    weight: float
    clock: ClockSpec


@dataclass(frozen=True)
class PortfolioFirm:
    name: str
    L0: float
    sigma2: float
    beta: float
    alpha: float
    loss: float = 1.0
    idio: ClockSpec | None = None

    def build(self) -> FirmFactorSpec:
        p = BrownianParams(self.L0, math.sqrt(self.sigma2), self.beta)
        return FirmFactorSpec(p, self.alpha, self.idio.build() if self.idio else None, self.loss)


@dataclass(frozen=True)
class PortfolioSection:
    horizon: float
    common: ClockSpec
    firms: tuple[PortfolioFirm, ...]
    n_y: int = 2048
    k_std: float = 12.0
    loss_unit: float = 1.0


@dataclass(frozen=True)
class Scenario:
    name: str
    L0: float
    sigma2: float
    beta: float
    levy: WeightedClock | None = None
    cir: WeightedClock | None = None
    oujump: WeightedClock | None = None
    annual_variance: float | None = None
    rate_model: str = "constant"
    rate_params: tuple[tuple[str, float], ...] = (("r", 0.0),)
    m1: float = 0.0
    m2: float = 0.0
    recovery: float = 0.0
    default_leg: str = "treasury"
    grid: GridSpec = field(default_factory=GridSpec)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    mc: SimConfig = field(default_factory=SimConfig)
    portfolio: PortfolioSection | None = None

    @property
    def brownian(self) -> BrownianParams:
        return BrownianParams(self.L0, math.sqrt(self.sigma2), self.beta)

    def rate_base(self) -> TimeChange:
        p = dict(self.rate_params)
        if self.rate_model == "cir":
            return IntegratedCIR(p["a"], p["b"], p["c"], p["r0"])
        return DeterministicClock(p["r"])

    def firm(self) -> FirmCredit:
        def weight(w):
            return w.weight if w else 0.0

        return FirmCredit(
            self.brownian,
            (weight(self.cir), weight(self.oujump), weight(self.levy)),
            self.cir.clock.build() if self.cir else None,
            self.oujump.clock.build() if self.oujump else None,
            self.levy.clock.build() if self.levy else None,
            self.rate_base(),
            self.m1,
            self.m2,
            self.recovery,
            self.default_leg,
        )

    def time_change(self) -> TimeChange:
        return self.firm().time_change

    def portfolio_spec(self) -> PortfolioSpec:
        if self.portfolio is None:
            raise ScenarioError("scenario has no [portfolio] section")
        ps = self.portfolio
        return PortfolioSpec(ps.common.build(), tuple(f.build() for f in ps.firms),
                             ps.n_y, ps.k_std, ps.loss_unit)


# ---------------------------------------------------------------- parsing

def _line_index(text: str):
    """Map sections and (section, key) pairs to 1-based line numbers."""
    sections: dict[str, int] = {}
    keys: dict[tuple[str, str], int] = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            sections.setdefault(current, n)
            continue
        if current is not None:
            m = re.match(r"^([^=:]+?)\s*[=:]", line)
            if m:
                keys.setdefault((current, m.group(1).strip()), n)
    return sections, keys


class _Section:
    def __init__(self, name, items, sections, keys):
        self.name = name
        self.items = dict(items)
        self.line = sections.get(name)
        self._keys = keys
        self.used = set()

    def line_of(self, key):
        return self._keys.get((self.name, key), self.line)

    def error(self, msg, key=None):
        where = f"{self.name}.{key}" if key else self.name
        return ScenarioError(msg, self.line_of(key) if key else self.line, where)

    def has(self, key):
        return key in self.items

    def _raw(self, key, default, required):
        if key in self.items:
            self.used.add(key)
            return self.items[key]
        if required:
            raise self.error(f"missing required key {key!r}")
        return default

    def float(self, key, default=None, required=True):
        raw = self._raw(key, default, required)
        if raw is None or not isinstance(raw, str):
            return raw
        try:
            value = float(raw)
        except ValueError:
            raise self.error(f"expected a number, got {raw!r}", key) from None
        if not math.isfinite(value):
            raise self.error(f"value must be finite, got {raw!r}", key)
        return value

    def int(self, key, default=None, required=True):
        raw = self._raw(key, default, required)
        if not isinstance(raw, str):
            return raw
        try:
            return int(raw)
        except ValueError:
            raise self.error(f"expected an integer, got {raw!r}", key) from None

    def bool(self, key, default=False):
        raw = self._raw(key, default, False)
        if not isinstance(raw, str):
            return raw
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise self.error(f"expected a boolean, got {raw!r}", key)

    def choice(self, key, choices, default=None, required=True):
        raw = self._raw(key, default, required)
        if raw not in choices:
            raise self.error(f"must be one of {', '.join(choices)}; got {raw!r}", key)
        return raw

    def str(self, key, default=None, required=True):
        return self._raw(key, default, required)

    def finish(self):
        extra = [k for k in self.items if k not in self.used]
        if extra:
            raise self.error(f"unknown key {extra[0]!r}", extra[0])


def _clock(sec: _Section, families) -> ClockSpec:
    if not sec.has("family"):
        needed = "; ".join(f"{f}: {', '.join(FAMILY_KEYS[f])}" for f in families)
        raise sec.error(f"missing required keys: family (one of {', '.join(families)}) "
                        f"plus the family's parameters ({needed})")
    family = sec.choice("family", families)
    missing = [k for k in FAMILY_KEYS[family] if not sec.has(k)]
    if missing:
        raise sec.error(f"{family} clock is missing required keys: {', '.join(missing)}")
    params = tuple((k, sec.float(k)) for k in FAMILY_KEYS[family])
    normalized = sec.bool("normalized", False) if family != "deterministic" else False
    spec = ClockSpec(family, params, normalized)
    try:
        spec.build()
    except DomainError as exc:
        raise sec.error(str(exc)) from None
    return spec


def _read_config(text: str, overrides):
    cp = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ScenarioError(exc.message.splitlines()[0] if hasattr(exc, "message") else str(exc), line) from None
    for item in overrides:
        target, sep, value = item.partition("=")
        section, dot, key = target.strip().rpartition(".")
        if not sep or not dot or not section or not key:
            raise ScenarioError(f"override {item!r} must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value.strip())
    return cp


def parse_scenario(text: str, overrides=()) -> Scenario:
    """Parse and validate scenario text.

    ``overrides`` holds ``section.key=value`` strings applied on top of the
    text before validation.
    """
    cp = _read_config(text, overrides)
    sections, keys = _line_index(text)

    def sec(name):
        return _Section(name, cp.items(name) if cp.has_section(name) else {}, sections, keys)

    seen = set()
    known = {"scenario", "brownian", "timechange", "timechange.levy", "timechange.cir",
             "timechange.oujump", "rates", "recovery", "grid", "quadrature", "mc",
             "portfolio", "portfolio.common"}
    firm_ids = []
    for name in cp.sections():
        if name in known:
            continue
        m = _FIRM_RE.match(name) or _IDIO_RE.match(name)
        if m is None:
            raise ScenarioError(f"unknown section [{name}]", sections.get(name), name)
        if _FIRM_RE.match(name):
            firm_ids.append(m.group(1))
    if cp.has_section("timechange") and cp.has_section("timechange.levy"):
        raise ScenarioError("[timechange] and [timechange.levy] are the same section",
                            sections.get("timechange"), "timechange")

    s = sec("scenario")
    name = s.str("name", "unnamed", required=False)
    s.finish()

    if not cp.has_section("brownian"):
        raise ScenarioError("missing [brownian] section (keys: L0, sigma2, beta)", None, "brownian")
    b = sec("brownian")
    L0 = b.float("L0")
    sigma2 = b.float("sigma2")
    beta = b.float("beta")
    annual = b.float("annual_variance", None, required=False)
    b.finish()
    if L0 <= 0:
        raise b.error("L0 must be > 0", "L0")
    if sigma2 <= 0:
        raise b.error("sigma2 must be > 0", "sigma2")
    if beta >= 0:
        raise b.error("beta must be < 0", "beta")

    clock_sections = [n for n in ("timechange", "timechange.levy", "timechange.cir", "timechange.oujump")
                      if cp.has_section(n)]
    if not clock_sections:
        raise ScenarioError("no time change: add [timechange.levy], [timechange.cir] "
                            "or [timechange.oujump]", None, "timechange")
    lone = len(clock_sections) == 1
    clocks = {}
    for n in clock_sections:
        c = sec(n)
        kind = {"timechange.cir": "cir", "timechange.oujump": "oujump"}.get(n, "levy")
        families = LEVY_FAMILIES if kind == "levy" else (kind,)
        if kind != "levy" and not c.has("family"):
            c.items["family"] = kind
        weight = c.float("weight", 1.0 if lone else None, required=not lone)
        spec = _clock(c, families)
        c.finish()
        clocks[kind] = WeightedClock(weight, spec)

    r = sec("rates")
    rate_model = r.choice("model", ("constant", "cir"), "constant", required=False)
    rate_keys = ("r",) if rate_model == "constant" else ("r0", "a", "b", "c")
    rate_params = tuple((k, r.float(k, 0.0 if k == "r" else None, required=k != "r")) for k in rate_keys)
    m1 = r.float("m1", 0.0, required=False)
    m2 = r.float("m2", 0.0, required=False)
    r.finish()

    rc = sec("recovery")
    recovery = rc.float("R", 0.0, required=False)
    leg = rc.choice("default_leg", DEFAULT_LEG_FACTORS, "treasury", required=False)
    rc.finish()

    g = sec("grid")
    grid_args = (g.float("start", 0.05, False), g.float("stop", 30.0, False),
                 g.int("count", 120, False), g.choice("spacing", SPACINGS, "log", False))
    g.finish()
    grid = _build(g, GridSpec, *grid_args)

    qs = sec("quadrature")
    quad = _build(qs, QuadratureConfig, qs.float("abs_tol", 1e-9, False),
                  qs.int("max_panels", 4000, False), qs.int("acceleration_order", 10, False))
    qs.finish()

    ms = sec("mc")
    sim = _build(ms, SimConfig, ms.int("seed", 12345, False), ms.int("n_paths", 100_000, False),
                 ms.float("dt", 1.0 / 250.0, False), ms.bool("antithetic", False))
    ms.finish()

    portfolio = _parse_portfolio(cp, sec, firm_ids, sections)

    scen = Scenario(name, L0, sigma2, beta, clocks.get("levy"), clocks.get("cir"), clocks.get("oujump"),
                    annual, rate_model, rate_params, m1, m2, recovery, leg, grid, quad, sim, portfolio)
    try:
        scen.firm()
    except DomainError as exc:
        raise ScenarioError(str(exc)) from None
    if portfolio is not None:
        try:
            scen.portfolio_spec()
        except DomainError as exc:
            raise ScenarioError(str(exc), sections.get("portfolio"), "portfolio") from None
    _check_variance(scen)
    return scen


def _build(section, cls, *args):
    try:
        return cls(*args)
    except DomainError as exc:
        raise section.error(str(exc)) from None


def _parse_portfolio(cp, sec, firm_ids, sections):
    has_firms = bool(firm_ids)
    if not cp.has_section("portfolio"):
        if has_firms or cp.has_section("portfolio.common"):
            raise ScenarioError("portfolio firms given without a [portfolio] section", None, "portfolio")
        return None
    p = sec("portfolio")
    horizon = p.float("horizon")
    n_y = p.int("n_y", 2048, False)
    k_std = p.float("k_std", 12.0, False)
    unit = p.float("loss_unit", 1.0, False)
    p.finish()
    if horizon <= 0:
        raise p.error("horizon must be > 0", "horizon")
    if not cp.has_section("portfolio.common"):
        raise ScenarioError("missing [portfolio.common] clock section", sections.get("portfolio"),
                            "portfolio.common")
    c = sec("portfolio.common")
    common = _clock(c, ALL_FAMILIES)
    c.finish()
    if not has_firms:
        raise p.error("portfolio needs at least one [portfolio.firm.<id>] section")
    firms = []
    for fid in firm_ids:
        f = sec(f"portfolio.firm.{fid}")
        vals = dict(L0=f.float("L0"), sigma2=f.float("sigma2"), beta=f.float("beta"),
                    alpha=f.float("alpha"), loss=f.float("loss", 1.0, False))
        f.finish()
        if vals["L0"] <= 0 or vals["sigma2"] <= 0:
            raise f.error("L0 and sigma2 must be > 0")
        idio = None
        idio_name = f"portfolio.firm.{fid}.idio"
        if cp.has_section(idio_name):
            i = sec(idio_name)
            idio = _clock(i, ALL_FAMILIES)
            i.finish()
        elif vals["alpha"] < 1.0:
            raise f.error(f"alpha < 1 needs an [{idio_name}] section", "alpha")
        firm = PortfolioFirm(fid, idio=idio, **vals)
        try:
            firm.build()
        except DomainError as exc:
            raise f.error(str(exc)) from None
        firms.append(firm)
    for name in cp.sections():
        m = _IDIO_RE.match(name)
        if m and m.group(1) not in firm_ids:
            raise ScenarioError(f"idiosyncratic clock for unknown firm {m.group(1)!r}",
                                sections.get(name), name)
    return PortfolioSection(horizon, common, tuple(firms), n_y, k_std, unit)


def annualized_variance(scen: Scenario) -> float | None:
    """``sigma^2 + beta^2 sigma^4 (2/a + 1)`` for a pure gamma clock."""
    if scen.cir or scen.oujump or scen.levy is None or scen.levy.clock.family != "gamma":
        return None
    a = scen.levy.clock.value("a")
    return scen.sigma2 + scen.beta**2 * scen.sigma2**2 * (2.0 / a + 1.0)


def _check_variance(scen: Scenario):
    value = annualized_variance(scen)
    if value is None:
        return
    target = TARGET_ANNUAL_VARIANCE if scen.annual_variance is None else scen.annual_variance
    if abs(value - target) > VARIANCE_TOL:
        warnings.warn(
            f"scenario {scen.name!r}: annualized variance {value:.6g} differs from "
            f"{target:.6g} by more than {VARIANCE_TOL:g}",
            ScenarioWarning,
            stacklevel=3,
        )


# ---------------------------------------------------------------- emitting

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _clock_lines(spec: ClockSpec, weight=None, with_family=True):
    lines = []
    if weight is not None:
        lines.append(f"weight = {_fmt(weight)}")
    if with_family:
        lines.append(f"family = {spec.family}")
    lines += [f"{k} = {_fmt(v)}" for k, v in spec.params]
    if spec.normalized:
        lines.append("normalized = true")
    return lines


def emit(scen: Scenario) -> str:
    """Serialise a scenario to text that parses back to an equal value."""
    out = [f"[scenario]\nname = {scen.name}\n"]
    b = [f"L0 = {_fmt(scen.L0)}", f"sigma2 = {_fmt(scen.sigma2)}", f"beta = {_fmt(scen.beta)}"]
    if scen.annual_variance is not None:
        b.append(f"annual_variance = {_fmt(scen.annual_variance)}")
    out.append("[brownian]\n" + "\n".join(b) + "\n")
    for key, wc in (("levy", scen.levy), ("cir", scen.cir), ("oujump", scen.oujump)):
        if wc is not None:
            body = _clock_lines(wc.clock, wc.weight, with_family=key == "levy")
            out.append(f"[timechange.{key}]\n" + "\n".join(body) + "\n")
    rates = [f"model = {scen.rate_model}"] + [f"{k} = {_fmt(v)}" for k, v in scen.rate_params]
    rates += [f"m1 = {_fmt(scen.m1)}", f"m2 = {_fmt(scen.m2)}"]
    out.append("[rates]\n" + "\n".join(rates) + "\n")
    out.append(f"[recovery]\nR = {_fmt(scen.recovery)}\ndefault_leg = {scen.default_leg}\n")
    g = scen.grid
    out.append(f"[grid]\nstart = {_fmt(g.start)}\nstop = {_fmt(g.stop)}\n"
               f"count = {g.count}\nspacing = {g.spacing}\n")
    q = scen.quadrature
    out.append(f"[quadrature]\nabs_tol = {_fmt(q.abs_tol)}\nmax_panels = {q.max_panels}\n"
               f"acceleration_order = {q.acceleration_order}\n")
    m = scen.mc
    out.append(f"[mc]\nseed = {m.seed}\nn_paths = {m.n_paths}\ndt = {_fmt(m.dt)}\n"
               f"antithetic = {_fmt(m.antithetic)}\n")
    if scen.portfolio is not None:
        ps = scen.portfolio
        out.append(f"[portfolio]\nhorizon = {_fmt(ps.horizon)}\nn_y = {ps.n_y}\n"
                   f"k_std = {_fmt(ps.k_std)}\nloss_unit = {_fmt(ps.loss_unit)}\n")
        out.append("[portfolio.common]\n" + "\n".join(_clock_lines(ps.common)) + "\n")
        for f in ps.firms:
            out.append(f"[portfolio.firm.{f.name}]\nL0 = {_fmt(f.L0)}\nsigma2 = {_fmt(f.sigma2)}\n"
                       f"beta = {_fmt(f.beta)}\nalpha = {_fmt(f.alpha)}\nloss = {_fmt(f.loss)}\n")
            if f.idio is not None:
                out.append(f"[portfolio.firm.{f.name}.idio]\n" + "\n".join(_clock_lines(f.idio)) + "\n")
    return "\n".join(out)


# ---------------------------------------------------------------- built-ins

_MODEL_TEMPLATE = """\
[scenario]
name = {name}

[brownian]
L0 = 1.5
sigma2 = {sigma2}
beta = -0.5

[timechange.levy]
family = {family}
a = {a}
b = {b}
c = {c}
normalized = true

[rates]
model = constant
r = 0.0

[recovery]
R = 0.0

[grid]
start = 0.05
stop = 30.0
count = 120
spacing = log
"""

BUILTINS = {
    "modelA": _MODEL_TEMPLATE.format(name="modelA", family="exponential", a=1.0, b=1.0, c=0.0, sigma2=0.09),
    "modelB": _MODEL_TEMPLATE.format(name="modelB", family="gamma", a=1.0, b=0.0, c=1.0, sigma2=0.0846),
    "modelC": _MODEL_TEMPLATE.format(name="modelC", family="gamma", a=10.0, b=0.0, c=10.0, sigma2=0.0877),
    "modelD": _MODEL_TEMPLATE.format(name="modelD", family="gamma", a=100.0, b=0.0, c=100.0, sigma2=0.0880),
}

BUILTINS["portfolio5"] = BUILTINS["modelB"].replace("name = modelB", "name = portfolio5") + """
[portfolio]
horizon = 5.0
n_y = 2048
k_std = 12.0
loss_unit = 1.0

[portfolio.common]
family = gamma
a = 1.0
b = 0.0
c = 1.0
normalized = true
""" + "".join(
    f"""
[portfolio.firm.f{i}]
L0 = {L0}
sigma2 = {s2}
beta = -0.5
alpha = 0.7
loss = {loss}

[portfolio.firm.f{i}.idio]
family = {fam}
{params}
normalized = true
"""
    for i, (L0, s2, loss, fam, params) in enumerate(
        [
            (1.3, 0.0846, 1.0, "gamma", "a = 2.0\nb = 0.0\nc = 2.0"),
            (1.5, 0.09, 2.0, "gamma", "a = 1.0\nb = 0.0\nc = 1.0"),
            (1.8, 0.0846, 1.0, "ig", "beta_tilde = 1.5\ngamma_tilde = 1.5"),
            (2.2, 0.12, 3.0, "exponential", "a = 2.0\nb = 0.5\nc = 1.0"),
            (1.4, 0.06, 1.0, "gamma", "a = 5.0\nb = 0.0\nc = 5.0"),
        ],
        start=1,
    )
)


def load_scenario(source: str, overrides=()) -> Scenario:
    """Parse a built-in name or a path to a scenario file."""
    if source in BUILTINS:
        return parse_scenario(BUILTINS[source], overrides)
    path = Path(source)
    if not path.is_file():
        raise ScenarioError(f"no built-in scenario or file named {source!r} "
                            f"(built-ins: {', '.join(BUILTINS)})")
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"scenario file is not UTF-8: {exc}") from None
    return parse_scenario(text, overrides)
