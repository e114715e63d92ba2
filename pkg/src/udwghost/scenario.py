"""Scenario files: TOML in, validated frozen dataclasses out.

Schema (every section optional except ``detectors``)::

    name = "table1"
    description = "..."

    [model]       d, m, pump
    [spdc]        theta, beta_scale
    [register]    tau
    [protocol]    alice, bob (1-based detector indices), prep_g, prep_e,
                  postselect, bob_initial (one g/e letter per detector),
                  probe (1-based index of the reported Bob detector)
    [sweep]       tau = [...]
    [quadrature]  radial_nodes, angular_nodes, azimuthal_nodes, radial_cutoff,
                  cutoff_sigmas, partition_order, error_estimate,
                  companion_fraction, tolerance
    [output]      dir, stem
    [[detectors]] name, lam, omega, sigma, norm, worldline ("inertial" or
                  "rindler"), position (inertial), acceleration and
                  transverse (rindler)

Unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import tomli

from .errors import ConfigError
from .kinematics import Detector, Inertial, ModelConfig, Rindler, SmearingProfile
from .quadrature import QuadratureSpec
from .spdc import SpdcConfig

PRESET_PACKAGE = "udwghost.presets"


@dataclass(frozen=True)
class ProtocolConfig:
    """Who prepares what; indices are 0-based once loaded."""

    alice: tuple = (0,)
    bob: tuple = (1,)
    prep_g: str = "g"
    prep_e: str = "e"
    postselect: str = "g"
    bob_initial: str = "g"
    probe: int = 1

    def validate(self, n: int):
        both = list(self.alice) + list(self.bob)
        if sorted(both) != list(range(n)):
            raise ConfigError(f"protocol: alice {self.alice} and bob {self.bob} must partition detectors 1..{n}")
        for key in ("prep_g", "prep_e", "postselect"):
            val = getattr(self, key)
            if len(val) != len(self.alice) or set(val) - {"g", "e"}:
                raise ConfigError(f"protocol.{key}: need one g/e letter per Alice detector, got {val!r}")
        if len(self.bob_initial) != len(self.bob) or set(self.bob_initial) - {"g", "e"}:
            raise ConfigError(f"protocol.bob_initial: need one g/e letter per Bob detector, got {self.bob_initial!r}")
        if self.probe not in self.bob:
            raise ConfigError(f"protocol.probe: detector {self.probe + 1} is not one of Bob's")
        if self.prep_g[0] != "g" or self.prep_e[0] != "e":
            raise ConfigError("protocol: prep_g/prep_e must put Alice's first detector in g/e respectively")

    def initial_state(self, prep: str, n: int) -> tuple:
        state = ["g"] * n
        for i, s in zip(self.alice, prep):
            state[i] = s
        for i, s in zip(self.bob, self.bob_initial):
            state[i] = s
        return tuple(state)


@dataclass(frozen=True)
class OutputConfig:
    dir: str | None = None
    stem: str | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    detectors: tuple
    model: ModelConfig = field(default_factory=ModelConfig)
    spdc: SpdcConfig = field(default_factory=SpdcConfig)
    tau: float = 0.0
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    sweep: tuple = ()
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: OutputConfig = field(default_factory=OutputConfig)
    description: str = ""

    @property
    def n(self) -> int:
        return len(self.detectors)

    def with_overrides(self, theta=None, beta_scale=None, radial_nodes=None) -> "Scenario":
        s = self
        if theta is not None or beta_scale is not None:
            spdc = SpdcConfig(
                theta=self.spdc.theta if theta is None else theta,
                beta_scale=self.spdc.beta_scale if beta_scale is None else beta_scale,
            )
            spdc.hyperbolic()
            s = replace(s, spdc=spdc)
        if radial_nodes is not None:
            s = replace(s, quadrature=replace(s.quadrature, radial_nodes=radial_nodes))
        return s

    def resolved(self) -> dict:
        """Every knob, defaults included, as plain data for report sidecars."""
        q = self.quadrature
        return {
            "name": self.name,
            "description": self.description,
            "model": {"d": self.model.d, "m": self.model.m, "pump": list(self.model.pump)},
            "spdc": asdict(self.spdc),
            "register": {"tau": self.tau},
            "protocol": {
                "alice": [i + 1 for i in self.protocol.alice],
                "bob": [i + 1 for i in self.protocol.bob],
                "prep_g": self.protocol.prep_g,
                "prep_e": self.protocol.prep_e,
                "postselect": self.protocol.postselect,
                "bob_initial": self.protocol.bob_initial,
                "probe": self.protocol.probe + 1,
            },
            "sweep": {"tau": list(self.sweep)},
            "quadrature": {
                "scheme": q.scheme,
                "radial_nodes": q.radial_nodes,
                "angular_nodes": q.angular_nodes,
                "azimuthal_nodes": q.n_azimuthal,
                "radial_cutoff": q.radial_cutoff,
                "cutoff_sigmas": q.cutoff_sigmas,
                "partition_order": q.partition_order,
                "error_estimate": q.error_estimate,
                "companion_fraction": q.companion_fraction,
                "tolerance": q.tolerance,
            },
            "detectors": [_detector_dict(d) for d in self.detectors],
        }


def _detector_dict(det: Detector) -> dict:
    out = {"lam": det.lam, "omega": det.omega, "sigma": det.smearing.sigma, "norm": det.smearing.norm}
    w = det.worldline
    if isinstance(w, Rindler):
        out.update(worldline="rindler", acceleration=w.a, transverse=list(w.transverse))
    else:
        out.update(worldline="inertial", position=list(w.x0))
    return out


_TOP = {"name", "description", "model", "spdc", "register", "protocol", "sweep", "quadrature", "output", "detectors"}
_SECTIONS = {
    "model": {"d", "m", "pump"},
    "spdc": {"theta", "beta_scale"},
    "register": {"tau"},
    "protocol": {"alice", "bob", "prep_g", "prep_e", "postselect", "bob_initial", "probe"},
    "sweep": {"tau"},
    "quadrature": {
        "radial_nodes",
        "angular_nodes",
        "azimuthal_nodes",
        "radial_cutoff",
        "cutoff_sigmas",
        "partition_order",
        "error_estimate",
        "companion_fraction",
        "tolerance",
    },
    "output": {"dir", "stem"},
}
_DETECTOR_KEYS = {"name", "lam", "omega", "sigma", "norm", "worldline", "position", "acceleration", "transverse"}


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _num(v, where, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    if integer:
        if int(v) != v:
            raise ConfigError(f"{where}: expected an integer, got {v!r}")
        return int(v)
    if not math.isfinite(v):
        raise ConfigError(f"{where}: must be finite")
    return float(v)


def _vec(v, where, length=None):
    if not isinstance(v, list):
        raise ConfigError(f"{where}: expected an array, got {v!r}")
    out = tuple(_num(x, f"{where}[{i}]") for i, x in enumerate(v))
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _letters(v, where):
    if isinstance(v, list):
        v = "".join(v) if all(isinstance(x, str) for x in v) else None
    if not isinstance(v, str):
        raise ConfigError(f"{where}: expected a string of g/e letters")
    return v


def _build(where, ctor, **kw):
    """Run a dataclass constructor, prefixing its validation message with the field path."""
    try:
        return ctor(**kw)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}" if where else str(exc)) from None


def _detector(raw, i, d):
    where = f"detectors[{i + 1}]"
    _check_keys(raw, _DETECTOR_KEYS, where)
    kind = raw.get("worldline", "inertial")
    sm = _build(
        where,
        SmearingProfile,
        sigma=_num(raw.get("sigma", 0.1), f"{where}.sigma"),
        norm=None if raw.get("norm") is None else _num(raw["norm"], f"{where}.norm"),
    )
    if kind == "inertial":
        for k in ("acceleration", "transverse"):
            if k in raw:
                raise ConfigError(f"{where}.{k}: only valid for rindler worldlines")
        wl = _build(where, Inertial, x0=_vec(raw.get("position", [0.0] * d), f"{where}.position", d))
    elif kind == "rindler":
        if "position" in raw:
            raise ConfigError(f"{where}.position: rindler worldlines take acceleration/transverse")
        wl = _build(
            where,
            Rindler,
            a=_num(raw.get("acceleration", 1.0), f"{where}.acceleration"),
            transverse=_vec(raw.get("transverse", [0.0] * (d - 1)), f"{where}.transverse", d - 1),
        )
    else:
        raise ConfigError(f"{where}.worldline: expected 'inertial' or 'rindler', got {kind!r}")
    return _build(
        where,
        Detector,
        lam=_num(raw.get("lam", 1.0), f"{where}.lam"),
        omega=_num(raw.get("omega", 1.0), f"{where}.omega"),
        smearing=sm,
        worldline=wl,
    )


def _indices(v, where, n):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where}: expected a non-empty array of detector numbers")
    out = tuple(_num(x, f"{where}[{i}]", integer=True) - 1 for i, x in enumerate(v))
    if any(not 0 <= i < n for i in out):
        raise ConfigError(f"{where}: detector numbers must be in 1..{n}")
    return out


def scenario_from_dict(raw: dict, default_name: str = "scenario") -> Scenario:
    _check_keys(raw, _TOP, "scenario")
    for sec, keys in _SECTIONS.items():
        if sec in raw:
            _check_keys(raw[sec], keys, sec)

    m = raw.get("model", {})
    d = _num(m.get("d", 3), "model.d", integer=True)
    kw = {"d": d, "m": _num(m.get("m", 0.0), "model.m")}
    if "pump" in m:
        kw["pump"] = _vec(m["pump"], "model.pump", d)
    model = _build(None, ModelConfig, **kw)

    s = raw.get("spdc", {})
    spdc = _build(
        None,
        SpdcConfig,
        theta=_num(s.get("theta", 1.0), "spdc.theta"),
        beta_scale=_num(s.get("beta_scale", 1.0), "spdc.beta_scale"),
    )
    spdc.hyperbolic()

    dets_raw = raw.get("detectors")
    if not isinstance(dets_raw, list) or not dets_raw:
        raise ConfigError("detectors: at least one [[detectors]] entry is required")
    dets = tuple(_detector(r, i, d) for i, r in enumerate(dets_raw))
    n = len(dets)

    p = raw.get("protocol", {})
    alice = _indices(p.get("alice", [1]), "protocol.alice", n)
    bob = _indices(p.get("bob", [i + 1 for i in range(n) if i not in alice]), "protocol.bob", n)
    proto = ProtocolConfig(
        alice=alice,
        bob=bob,
        prep_g=_letters(p.get("prep_g", "g" * len(alice)), "protocol.prep_g"),
        prep_e=_letters(p.get("prep_e", "e" + "g" * (len(alice) - 1)), "protocol.prep_e"),
        postselect=_letters(p.get("postselect", "g" * len(alice)), "protocol.postselect"),
        bob_initial=_letters(p.get("bob_initial", "g" * len(bob)), "protocol.bob_initial"),
        probe=_num(p.get("probe", bob[0] + 1), "protocol.probe", integer=True) - 1,
    )
    proto.validate(n)

    tau = _num(raw.get("register", {}).get("tau", 0.0), "register.tau")
    sweep = ()
    if "sweep" in raw:
        sweep = _vec(raw["sweep"].get("tau", []), "sweep.tau")
        if not sweep:
            raise ConfigError("sweep.tau: must list at least one value")

    q = raw.get("quadrature", {})
    qkw = {}
    for key in ("radial_nodes", "angular_nodes", "azimuthal_nodes", "partition_order"):
        if key in q:
            qkw[key] = _num(q[key], f"quadrature.{key}", integer=True)
    for key in ("radial_cutoff", "cutoff_sigmas", "companion_fraction", "tolerance"):
        if key in q:
            qkw[key] = _num(q[key], f"quadrature.{key}")
    if "error_estimate" in q:
        if not isinstance(q["error_estimate"], bool):
            raise ConfigError("quadrature.error_estimate: expected true/false")
        qkw["error_estimate"] = q["error_estimate"]
    quad = _build(None, QuadratureSpec, **qkw)

    o = raw.get("output", {})
    for key in ("dir", "stem"):
        if key in o and not isinstance(o[key], str):
            raise ConfigError(f"output.{key}: expected a string")
    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("name: expected a non-empty string")
    return Scenario(
        name=name,
        detectors=dets,
        model=model,
        spdc=spdc,
        tau=tau,
        protocol=proto,
        sweep=sweep,
        quadrature=quad,
        output=OutputConfig(o.get("dir"), o.get("stem")),
        description=str(raw.get("description", "")),
    )


def parse_scenario(text: str, default_name: str = "scenario", source: str = "<string>") -> Scenario:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return scenario_from_dict(raw, default_name)


def preset_names() -> list[str]:
    files = resources.files(PRESET_PACKAGE).iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".toml"))


def preset_text(name: str) -> str:
    res = resources.files(PRESET_PACKAGE) / f"{name}.toml"
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return res.read_text(encoding="utf-8")


def load_scenario(ref) -> Scenario:
    """Load a preset by name or a scenario file by path."""
    path = Path(ref)
    if path.suffix == ".toml" or path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc.strerror}") from None
        return parse_scenario(text, default_name=path.stem, source=str(path))
    return parse_scenario(preset_text(str(ref)), default_name=str(ref), source=f"preset {ref}")
