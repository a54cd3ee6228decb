"""Run configuration: JSON files with model / geometry / optimizer / output
sections, validated strictly (unknown keys are errors, not warnings).

Schema
------
seed        int, default 0 (feeds the optimizer RNG)
model       kind: "hofstadter" (one layer) | "ti" (flux p and -p layers) |
            "stack" (``copies`` identical layers); p, q, t, mu, filled_bands
geometry    width, height, l_a, l_b, shape, radius; optional anchor [x, y]
            and margin (defaults to max(8, 2*radius))
optimizer   any OptimizerConfig field, plus optional warm_start (path to a
            generators .npz written by a previous run)
output      dir (default "markovgap-out"), max_dim (guardrail on the mode
            count of the optimization universe, default 2000),
            write_generators (default true)
sweep       optional; key in {"R", "L_A", "shape"} and a list of values
            ("L_A" sweeps the common region size, keeping l_a = l_b)
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .descent import OptimizerConfig
from .errors import ConfigError
from .lattice import SHAPES

__all__ = [
    "ModelSection",
    "GeometrySection",
    "OutputSection",
    "SweepSection",
    "RunConfig",
    "load_config",
    "parse_config",
]

MODEL_KINDS = ("hofstadter", "ti", "stack")
SWEEP_KEYS = ("R", "L_A", "shape")


def _take(section: dict, name: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(section, dict):
        raise ConfigError(f"section '{name}' must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing key(s) in '{name}': {sorted(missing)}")
    return section


def _typed(section: dict, name: str, key: str, types, default=None):
    if key not in section:
        return default
    val = section[key]
    if isinstance(val, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ConfigError(f"'{name}.{key}' must not be a boolean")
    if not isinstance(val, types):
        raise ConfigError(f"'{name}.{key}' has wrong type {type(val).__name__}")
    return val


@dataclass(frozen=True)
class ModelSection:
    kind: str
    p: int
    q: int
    t: float = 1.0
    mu: float = 0.0
    filled_bands: tuple[int, ...] = (0,)
    copies: int = 1

    @property
    def n_layers(self) -> int:
        return {"hofstadter": 1, "ti": 2, "stack": self.copies}[self.kind]


@dataclass(frozen=True)
class GeometrySection:
    width: int
    height: int
    l_a: int
    l_b: int
    shape: str = "two_circles"
    radius: int = 0
    anchor: tuple[int, int] | None = None
    margin: int | None = None


@dataclass(frozen=True)
class OutputSection:
    dir: str = "markovgap-out"
    max_dim: int = 2000
    write_generators: bool = True


@dataclass(frozen=True)
class SweepSection:
    key: str
    values: tuple


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection
    geometry: GeometrySection
    optimizer: OptimizerConfig
    output: OutputSection
    seed: int = 0
    warm_start: str | None = None
    sweep: SweepSection | None = None

    def echo(self) -> dict:
        """Fully-resolved config as a plain dict (what the report embeds).

        The result is itself a valid config: parse_config(echo()) == self.
        """
        out = {
            "seed": self.seed,
            "model": asdict(self.model),
            "geometry": asdict(self.geometry),
            "optimizer": asdict(self.optimizer),
            "output": asdict(self.output),
        }
        if self.model.kind != "stack":
            del out["model"]["copies"]
        out["model"]["filled_bands"] = list(out["model"]["filled_bands"])
        if out["geometry"]["anchor"] is not None:
            out["geometry"]["anchor"] = list(out["geometry"]["anchor"])
        if self.warm_start is not None:
            out["optimizer"]["warm_start"] = self.warm_start
        if self.sweep is not None:
            out["sweep"] = {"key": self.sweep.key, "values": list(self.sweep.values)}
        return out


def _parse_model(raw: dict) -> ModelSection:
    sec = _take(raw, "model",
                {"kind", "p", "q", "t", "mu", "filled_bands", "copies"},
                {"kind", "p", "q"})
    kind = _typed(sec, "model", "kind", str)
    if kind not in MODEL_KINDS:
        raise ConfigError(f"model.kind must be one of {MODEL_KINDS}, got {kind!r}")
    bands = sec.get("filled_bands", [0])
    if not isinstance(bands, list) or not all(isinstance(b, int) for b in bands):
        raise ConfigError("model.filled_bands must be a list of integers")
    copies = _typed(sec, "model", "copies", int, 1)
    if kind != "stack" and "copies" in sec:
        raise ConfigError("model.copies only applies to kind 'stack'")
    return ModelSection(
        kind=kind,
        p=_typed(sec, "model", "p", int),
        q=_typed(sec, "model", "q", int),
        t=float(_typed(sec, "model", "t", (int, float), 1.0)),
        mu=float(_typed(sec, "model", "mu", (int, float), 0.0)),
        filled_bands=tuple(bands),
        copies=copies,
    )


def _parse_geometry(raw: dict) -> GeometrySection:
    sec = _take(raw, "geometry",
                {"width", "height", "l_a", "l_b", "shape", "radius", "anchor", "margin"},
                {"width", "height", "l_a", "l_b"})
    shape = _typed(sec, "geometry", "shape", str, "two_circles")
    if shape not in SHAPES:
        raise ConfigError(f"geometry.shape must be one of {SHAPES}, got {shape!r}")
    anchor = sec.get("anchor")
    if anchor is not None:
        if not (isinstance(anchor, list) and len(anchor) == 2
                and all(isinstance(v, int) for v in anchor)):
            raise ConfigError("geometry.anchor must be [x, y] integers")
        anchor = tuple(anchor)
    radius = _typed(sec, "geometry", "radius", int, 0)
    if radius < 0:
        raise ConfigError("geometry.radius must be >= 0")
    return GeometrySection(
        width=_typed(sec, "geometry", "width", int),
        height=_typed(sec, "geometry", "height", int),
        l_a=_typed(sec, "geometry", "l_a", int),
        l_b=_typed(sec, "geometry", "l_b", int),
        shape=shape,
        radius=radius,
        anchor=anchor,
        margin=_typed(sec, "geometry", "margin", int),
    )


def _parse_optimizer(raw: dict, seed: int) -> tuple[OptimizerConfig, str | None]:
    allowed = {f.name for f in fields(OptimizerConfig)} | {"warm_start"}
    sec = _take(raw, "optimizer", allowed, set())
    warm = sec.get("warm_start")
    if warm is not None and not isinstance(warm, str):
        raise ConfigError("optimizer.warm_start must be a path string")
    kwargs = {k: v for k, v in sec.items() if k != "warm_start"}
    if "seed" not in kwargs:
        kwargs["seed"] = seed
    try:
        return OptimizerConfig(**kwargs), warm
    except TypeError as exc:
        raise ConfigError(f"bad optimizer section: {exc}") from exc


def _parse_output(raw: dict) -> OutputSection:
    sec = _take(raw, "output", {"dir", "max_dim", "write_generators"}, set())
    return OutputSection(
        dir=_typed(sec, "output", "dir", str, "markovgap-out"),
        max_dim=_typed(sec, "output", "max_dim", int, 2000),
        write_generators=_typed(sec, "output", "write_generators", bool, True),
    )


def _parse_sweep(raw: dict) -> SweepSection:
    sec = _take(raw, "sweep", {"key", "values"}, {"key", "values"})
    key = sec["key"]
    if key not in SWEEP_KEYS:
        raise ConfigError(f"sweep.key must be one of {SWEEP_KEYS}, got {key!r}")
    values = sec["values"]
    if not isinstance(values, list):
        raise ConfigError("sweep.values must be a list")
    if key == "shape":
        bad = [v for v in values if v not in SHAPES]
        if bad:
            raise ConfigError(f"sweep over shape got invalid value(s) {bad}")
    else:
        if not all(isinstance(v, int) and v >= 0 for v in values):
            raise ConfigError(f"sweep over {key} needs non-negative integers")
    return SweepSection(key=key, values=tuple(values))


def parse_config(raw: dict) -> RunConfig:
    """Validate a raw dict (already JSON-decoded) into a RunConfig."""
    top = _take(raw, "<top level>",
                {"seed", "model", "geometry", "optimizer", "output", "sweep"},
                {"model", "geometry"})
    seed = _typed(top, "<top level>", "seed", int, 0)
    model = _parse_model(top["model"])
    geometry = _parse_geometry(top["geometry"])
    optimizer, warm = _parse_optimizer(top.get("optimizer", {}), seed)
    output = _parse_output(top.get("output", {}))
    sweep = _parse_sweep(top["sweep"]) if "sweep" in top else None
    return RunConfig(model=model, geometry=geometry, optimizer=optimizer,
                     output=output, seed=seed, warm_start=warm, sweep=sweep)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)
