"""Run configuration: one JSON document, strict keys, documented defaults.

Top-level sections (all optional except ``model``)::

    {
      "model":      {"n_sites": 15, "j": 1.0, "u": 1.5, "p": -0.75,
                     "theta": 0.0, "corner_shift": true, "p_offset": 0},
      "sweep":      {"start": 0.0, "stop": "pi", "count": 91, "workers": 1},
      "transition": {"bracket": [0.5, 1.5], "tol": 0.001},
      "zak":        {"n_sites": null, "p_offset": null},
      "circuit":    {"mode": "physical", "f_ref": null, "c_j": 1e-06,
                     "l": 2.321e-05, "q": 200.0, "paper_replica": false,
                     "f_start": 8000.0, "f_stop": 16000.0, "f_step": 10.0,
                     "probe_nodes": [[1, 1], [15, 15]], "thetas": null,
                     "window": null},
      "outputs":    {"directory": "out", "csv": true, "json": true,
                     "svg": true, "spice": true},
      "thresholds": {"doublon_weight": 0.8, "edge_weight": 0.5, ...,
                     "peak_prominence": 0.1, "peak_merge_steps": 3,
                     "isolation_hz": 200.0, "rival_ratio": 0.25,
                     "svg_states": 6}
    }

Angles may be given as numbers or as the string ``"pi"``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
import json
import math

from .errors import InvalidParam, ValidationError
from .model import ModelParams
from .spectra import Thresholds

__all__ = [
    "SweepConfig",
    "TransitionConfig",
    "ZakConfig",
    "CircuitConfig",
    "OutputConfig",
    "AnalysisThresholds",
    "RunConfig",
    "parse_angle",
    "load_config",
    "config_from_dict",
    "with_overrides",
]


def parse_angle(value, name="theta"):
    if isinstance(value, str):
        text = value.strip().lower()
        if text == "pi":
            return math.pi
        try:
            return float(text)
        except ValueError:
            raise InvalidParam(name, f"cannot read angle {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParam(name, f"cannot read angle {value!r}")
    return float(value)


@dataclass(frozen=True)
class SweepConfig:
    start: float = 0.0
    stop: float = math.pi
    count: int = 91
    workers: int = 1

    def grid(self):
        import numpy as np

        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class TransitionConfig:
    bracket: tuple = (0.5, 1.5)
    tol: float = 1e-3


@dataclass(frozen=True)
class ZakConfig:
    n_sites: int | None = None
    p_offset: int | None = None


@dataclass(frozen=True)
class CircuitConfig:
    mode: str = "physical"
    f_ref: float | None = None
    c_j: float = 1e-6
    l: float = 23.21e-6
    q: float | None = 200.0
    paper_replica: bool = False
    f_start: float = 8000.0
    f_stop: float = 16000.0
    f_step: float = 10.0
    probe_nodes: tuple = ((1, 1), (15, 15))
    thetas: tuple | None = None
    window: tuple | None = None

    def f_grid(self):
        import numpy as np

        count = int(round((self.f_stop - self.f_start) / self.f_step)) + 1
        return self.f_start + self.f_step * np.arange(count)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    csv: bool = True
    json: bool = True
    svg: bool = True
    spice: bool = True


@dataclass(frozen=True)
class AnalysisThresholds:
    """Classification thresholds plus peak-analysis knobs."""

    classification: Thresholds = field(default_factory=Thresholds)
    peak_prominence: float = 0.1
    peak_merge_steps: int = 3
    isolation_hz: float = 200.0
    rival_ratio: float = 0.25
    svg_states: int = 6

    def to_dict(self):
        d = asdict(self.classification)
        d.update({f.name: getattr(self, f.name) for f in fields(self) if f.name != "classification"})
        return d


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    sweep: SweepConfig | None = None
    transition: TransitionConfig = field(default_factory=TransitionConfig)
    zak: ZakConfig = field(default_factory=ZakConfig)
    circuit: CircuitConfig | None = None
    outputs: OutputConfig = field(default_factory=OutputConfig)
    thresholds: AnalysisThresholds = field(default_factory=AnalysisThresholds)

    def to_dict(self):
        return {
            "model": self.model.to_dict(),
            "sweep": None if self.sweep is None else asdict(self.sweep),
            "transition": {"bracket": list(self.transition.bracket), "tol": self.transition.tol},
            "zak": asdict(self.zak),
            "circuit": None if self.circuit is None else _circuit_dict(self.circuit),
            "outputs": asdict(self.outputs),
            "thresholds": self.thresholds.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _circuit_dict(c):
    d = asdict(c)
    d["probe_nodes"] = [list(p) for p in c.probe_nodes]
    d["thetas"] = None if c.thetas is None else list(c.thetas)
    d["window"] = None if c.window is None else list(c.window)
    return d


def _take(section, data, cls):
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError(f"section {section!r} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValidationError(f"unknown key(s) in {section!r}: {', '.join(unknown)}")
    return dict(data)


def config_from_dict(data):
    """Build a :class:`RunConfig` from a parsed JSON object."""
    if not isinstance(data, dict):
        raise ValidationError("configuration must be a JSON object")
    top = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - top)
    if unknown:
        raise ValidationError(f"unknown top-level key(s): {', '.join(unknown)}")
    if "model" not in data:
        raise ValidationError("configuration needs a 'model' section")

    m = _take("model", data["model"], ModelParams)
    if "theta" in m:
        m["theta"] = parse_angle(m["theta"])
    model = ModelParams(**m)

    sweep = None
    if data.get("sweep") is not None:
        s = _take("sweep", data["sweep"], SweepConfig)
        for key in ("start", "stop"):
            if key in s:
                s[key] = parse_angle(s[key], f"sweep.{key}")
        sweep = SweepConfig(**s)
        if sweep.count < 1 or (sweep.count > 1 and not sweep.start < sweep.stop):
            raise ValidationError("sweep needs count >= 1 and start < stop")
        if not (0 <= sweep.start and sweep.stop <= math.pi):
            raise ValidationError("sweep range must lie within [0, pi]")

    t = _take("transition", data.get("transition"), TransitionConfig)
    if "bracket" in t:
        t["bracket"] = tuple(parse_angle(v, "transition.bracket") for v in t["bracket"])
    transition = TransitionConfig(**t)

    zak = ZakConfig(**_take("zak", data.get("zak"), ZakConfig))

    circuit = None
    if data.get("circuit") is not None:
        c = _take("circuit", data["circuit"], CircuitConfig)
        if "probe_nodes" in c:
            c["probe_nodes"] = tuple(tuple(int(v) for v in p) for p in c["probe_nodes"])
        if c.get("thetas") is not None:
            c["thetas"] = tuple(parse_angle(v, "circuit.thetas") for v in c["thetas"])
        if c.get("window") is not None:
            c["window"] = tuple(float(v) for v in c["window"])
            if len(c["window"]) != 2 or not 0 < c["window"][0] < c["window"][1]:
                raise ValidationError("circuit.window must be [f_lo, f_hi] with 0 < f_lo < f_hi")
        circuit = CircuitConfig(**c)
        if circuit.mode not in ("ideal", "physical"):
            raise ValidationError("circuit.mode must be 'ideal' or 'physical'")
        if not (0 < circuit.f_start < circuit.f_stop and circuit.f_step > 0):
            raise ValidationError("circuit frequency grid must satisfy 0 < f_start < f_stop, f_step > 0")

    outputs = OutputConfig(**_take("outputs", data.get("outputs"), OutputConfig))

    th = data.get("thresholds") or {}
    if not isinstance(th, dict):
        raise ValidationError("section 'thresholds' must be an object")
    cls_keys = {f.name for f in fields(Thresholds)}
    extra_keys = {f.name for f in fields(AnalysisThresholds)} - {"classification"}
    unknown = sorted(set(th) - cls_keys - extra_keys)
    if unknown:
        raise ValidationError(f"unknown key(s) in 'thresholds': {', '.join(unknown)}")
    thresholds = AnalysisThresholds(
        classification=Thresholds(**{k: v for k, v in th.items() if k in cls_keys}),
        **{k: v for k, v in th.items() if k in extra_keys},
    )
    return RunConfig(model, sweep, transition, zak, circuit, outputs, thresholds)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def with_overrides(config, theta=None, n_sites=None, directory=None):
    """Apply command-line overrides."""
    model = config.model
    if theta is not None:
        model = replace(model, theta=parse_angle(theta))
    if n_sites is not None:
        model = replace(model, n_sites=int(n_sites))
    outputs = config.outputs if directory is None else replace(config.outputs, directory=directory)
    return replace(config, model=model, outputs=outputs)
