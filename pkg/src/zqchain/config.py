"""Scenario configuration: YAML files, flag overrides, validation.

A scenario is one simulation or spectrum run. Config files are YAML
mappings whose keys mirror the CLI flag names; flags override file values.
Every validation failure names the offending field and, when the value
came from a file, the file and line it was set on.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .hamiltonians import AliphaticParams, XYParams
from .dynamics import InitialPattern
from .spinops import ProductLabel, parse_label

DEFAULT_DT = 0.005
DEFAULT_HORIZON = 20.0
DEFAULT_TAU = 5.0
DEFAULT_ZERO_PAD = 4

# hard dimension guards: exponential growth must be an explicit decision
MAX_FULL_DIM = 4096        # alpha/beta spaces (xy chains, full engine)
MAX_RESTRICTED_DIM = 16384  # {T0,S0} fictitious-spin spaces


class ConfigError(ValueError):
    """Invalid scenario field; message carries field name and file location."""

    def __init__(self, fld: str, message: str, path: str | None = None,
                 line: int | None = None):
        self.field = fld
        loc = ""
        if path is not None:
            loc = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{loc}{fld}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    model: str = "xy"
    n: int = 4
    couplings: dict = field(default_factory=dict)
    flips: tuple[int, ...] = ()
    t0_sites: tuple[int, ...] = ()
    signs: tuple[float, ...] = ()
    observe: tuple = ("all",)
    dt: float = DEFAULT_DT
    horizon: float = DEFAULT_HORIZON
    tau: float = DEFAULT_TAU
    zero_pad: int = DEFAULT_ZERO_PAD
    engine: str = "restricted"

    # -- derived accessors -------------------------------------------------

    def xy_params(self) -> XYParams:
        return XYParams(self.n, float(self.couplings["J"]))

    def aliphatic_params(self) -> AliphaticParams:
        c = self.couplings
        return AliphaticParams(self.n, float(c["J_gem"]),
                               float(c["J_gauche"]), float(c["J_anti"]))

    def initial_pattern(self) -> InitialPattern:
        sites = self.flips if self.model == "xy" else self.t0_sites
        return InitialPattern(self.n, frozenset(sites))

    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def observables(self) -> list[tuple[str, object]]:
        """Expand the observe field to (id, site-or-label) pairs."""
        out = []
        targets = self.observe
        if targets == ("all",) or targets == "all":
            targets = tuple(range(1, self.n + 1))
        for item in targets:
            if isinstance(item, int):
                out.append((f"site{item}", item))
            else:
                label = parse_label(str(item), "st2")
                out.append((str(label), label))
        return out


_FIELD_TYPES = {
    "model": str, "n": int, "couplings": dict, "observe": (list, str),
    "dt": (int, float), "horizon": (int, float), "tau": (int, float),
    "zero_pad": int, "engine": str,
}


def validate(cfg: ScenarioConfig, path: str | None = None,
             source_text: str | None = None) -> ScenarioConfig:
    """Check every field, raising ConfigError naming the first bad one."""

    def fail(fld, msg):
        raise ConfigError(fld, msg, path, _field_line(source_text, fld))

    if cfg.model not in ("xy", "aliphatic"):
        fail("model", f"must be 'xy' or 'aliphatic', got {cfg.model!r}")
    if cfg.n < 2:
        fail("n", f"chain length must be >= 2, got {cfg.n}")

    if cfg.model == "xy":
        if "J" not in cfg.couplings:
            fail("couplings", "xy model needs coupling J (Hz)")
        if 2 ** cfg.n > MAX_FULL_DIM:
            fail("n", f"2^{cfg.n} exceeds the {MAX_FULL_DIM}-dim full-matrix "
                      f"limit (n <= 12)")
        for s in cfg.flips:
            if not 1 <= s <= cfg.n:
                fail("flips", f"site {s} outside 1..{cfg.n}")
        if cfg.t0_sites:
            fail("t0_sites", "only meaningful for the aliphatic model")
    else:
        missing = [k for k in ("J_gem", "J_gauche", "J_anti")
                   if k not in cfg.couplings]
        if missing:
            fail("couplings", f"aliphatic model needs {missing} (Hz)")
        if cfg.engine not in ("restricted", "full"):
            fail("engine", f"must be 'restricted' or 'full', got {cfg.engine!r}")
        if cfg.engine == "full" and 4 ** cfg.n > MAX_FULL_DIM:
            fail("n", f"4^{cfg.n} exceeds the {MAX_FULL_DIM}-dim full-engine "
                      f"limit (n <= 6); use engine=restricted")
        if cfg.engine == "restricted" and 2 ** cfg.n > MAX_RESTRICTED_DIM:
            fail("n", f"2^{cfg.n} exceeds the {MAX_RESTRICTED_DIM}-dim "
                      f"restricted-engine limit (n <= 14)")
        if not cfg.t0_sites:
            fail("t0_sites", "aliphatic model needs at least one T0 site")
        for s in cfg.t0_sites:
            if not 1 <= s <= cfg.n:
                fail("t0_sites", f"site {s} outside 1..{cfg.n}")
        if len(cfg.signs) != len(cfg.t0_sites):
            fail("signs", f"{len(cfg.t0_sites)} t0_sites need "
                          f"{len(cfg.t0_sites)} signs, got {len(cfg.signs)}")
        if any(s not in (1.0, -1.0) for s in cfg.signs):
            fail("signs", "entries must be +1 or -1")
        if cfg.flips:
            fail("flips", "only meaningful for the xy model")

    if not cfg.dt > 0:
        fail("dt", f"must be positive, got {cfg.dt}")
    if not cfg.horizon >= cfg.dt:
        fail("horizon", f"must be >= dt, got {cfg.horizon}")
    if not cfg.tau > 0:
        fail("tau", f"must be positive, got {cfg.tau}")
    if cfg.zero_pad < 1:
        fail("zero_pad", f"must be >= 1, got {cfg.zero_pad}")

    # observable expansion performs its own symbol validation
    try:
        obs = cfg.observables()
    except ValueError as exc:
        fail("observe", str(exc))
    for obs_id, target in obs:
        if isinstance(target, int) and not 1 <= target <= cfg.n:
            fail("observe", f"site {target} outside 1..{cfg.n}")
        if isinstance(target, ProductLabel):
            if cfg.model != "aliphatic":
                fail("observe", "product-state labels need the aliphatic model")
            if len(target) != cfg.n:
                fail("observe", f"label {target} has {len(target)} sites, "
                                f"chain has {cfg.n}")
    return cfg


def _field_line(source_text: str | None, fld: str) -> int | None:
    """Best-effort line reference: first line mentioning the field key."""
    if source_text is None:
        return None
    for i, line in enumerate(source_text.splitlines(), start=1):
        stripped = line.split("#", 1)[0]
        if stripped.strip().startswith(fld):
            return i
    return None


def _coerce(raw: dict, path: str | None, text: str | None) -> ScenarioConfig:
    known = {f for f in ScenarioConfig.__dataclass_fields__}
    unknown = set(raw) - known - {"initial"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field", path,
                          _field_line(text, sorted(unknown)[0]))

    data = dict(raw)
    initial = data.pop("initial", None)
    if initial is not None:
        if not isinstance(initial, dict):
            raise ConfigError("initial", "must be a mapping", path,
                              _field_line(text, "initial"))
        for key in ("flips", "t0_sites", "signs"):
            if key in initial:
                data[key] = initial[key]
        stray = set(initial) - {"flips", "t0_sites", "signs"}
        if stray:
            raise ConfigError("initial", f"unknown keys {sorted(stray)}", path,
                              _field_line(text, "initial"))

    try:
        cfg = ScenarioConfig(
            model=str(data.get("model", "xy")),
            n=int(data.get("n", 4)),
            couplings=dict(data.get("couplings", {})),
            flips=tuple(int(s) for s in data.get("flips", ())),
            t0_sites=tuple(int(s) for s in data.get("t0_sites", ())),
            signs=tuple(float(s) for s in data.get("signs", ())),
            observe=_norm_observe(data.get("observe", "all")),
            dt=float(data.get("dt", DEFAULT_DT)),
            horizon=float(data.get("horizon", DEFAULT_HORIZON)),
            tau=float(data.get("tau", DEFAULT_TAU)),
            zero_pad=int(data.get("zero_pad", DEFAULT_ZERO_PAD)),
            engine=str(data.get("engine", "restricted")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("config", f"malformed value: {exc}", path) from exc
    return cfg


def _norm_observe(value) -> tuple:
    if value in ("all", ("all",), ["all"]):
        return ("all",)
    if isinstance(value, (str, int)):
        value = [value]
    out = []
    for item in value:
        out.append(int(item) if str(item).lstrip("+-").isdigit() else str(item))
    return tuple(out)


def load_config(path: str, overrides: dict | None = None) -> ScenarioConfig:
    """Read a YAML scenario file, apply overrides, validate."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"not valid YAML: {exc}", path) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping", path)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate(_coerce(raw, path, text), path, text)


def config_from_overrides(overrides: dict) -> ScenarioConfig:
    """Build a scenario purely from CLI flags."""
    raw = {k: v for k, v in overrides.items() if v is not None}
    return validate(_coerce(raw, None, None))
