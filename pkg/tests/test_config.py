"""Strict JSON config parsing."""

import json

import pytest

from markovgap.config import load_config, parse_config
from markovgap.errors import ConfigError


def minimal():
    return {
        "model": {"kind": "hofstadter", "p": 1, "q": 4},
        "geometry": {"width": 16, "height": 12, "l_a": 4, "l_b": 4,
                     "radius": 2, "margin": 2},
    }


def test_minimal_config_resolves_defaults():
    cfg = parse_config(minimal())
    assert cfg.seed == 0
    assert cfg.model.kind == "hofstadter"
    assert cfg.model.t == 1.0
    assert cfg.model.filled_bands == (0,)
    assert cfg.model.n_layers == 1
    assert cfg.geometry.shape == "two_circles"
    assert cfg.optimizer.grad_tol == 3e-3
    assert cfg.optimizer.seed == 0
    assert cfg.output.dir == "markovgap-out"
    assert cfg.output.max_dim == 2000
    assert cfg.sweep is None and cfg.warm_start is None


def test_top_level_seed_feeds_optimizer():
    raw = minimal()
    raw["seed"] = 11
    cfg = parse_config(raw)
    assert cfg.seed == 11 and cfg.optimizer.seed == 11
    raw["optimizer"] = {"seed": 3}
    cfg = parse_config(raw)
    assert cfg.seed == 11 and cfg.optimizer.seed == 3


def test_unknown_keys_rejected():
    raw = minimal()
    raw["extra"] = 1
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(raw)
    raw = minimal()
    raw["model"]["flux"] = 0.25
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(raw)
    raw = minimal()
    raw["optimizer"] = {"step": 0.5}
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(raw)


def test_missing_required_keys_rejected():
    with pytest.raises(ConfigError, match="missing key"):
        parse_config({"model": {"kind": "hofstadter", "p": 1, "q": 4}})
    raw = minimal()
    del raw["geometry"]["width"]
    with pytest.raises(ConfigError, match="missing key"):
        parse_config(raw)
    raw = minimal()
    del raw["model"]["p"]
    with pytest.raises(ConfigError, match="missing key"):
        parse_config(raw)


def test_type_checks_reject_booleans():
    raw = minimal()
    raw["geometry"]["width"] = True
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_model_kinds_and_copies():
    raw = minimal()
    raw["model"] = {"kind": "ti", "p": 1, "q": 4}
    assert parse_config(raw).model.n_layers == 2
    raw["model"] = {"kind": "stack", "p": 1, "q": 4, "copies": 3}
    assert parse_config(raw).model.n_layers == 3
    raw["model"] = {"kind": "hofstadter", "p": 1, "q": 4, "copies": 2}
    with pytest.raises(ConfigError, match="copies"):
        parse_config(raw)
    raw["model"] = {"kind": "triangular", "p": 1, "q": 4}
    with pytest.raises(ConfigError, match="kind"):
        parse_config(raw)


def test_geometry_validation():
    raw = minimal()
    raw["geometry"]["shape"] = "blob"
    with pytest.raises(ConfigError, match="shape"):
        parse_config(raw)
    raw = minimal()
    raw["geometry"]["radius"] = -1
    with pytest.raises(ConfigError, match="radius"):
        parse_config(raw)
    raw = minimal()
    raw["geometry"]["anchor"] = [3]
    with pytest.raises(ConfigError, match="anchor"):
        parse_config(raw)
    raw = minimal()
    raw["geometry"]["anchor"] = [3, 4]
    assert parse_config(raw).geometry.anchor == (3, 4)


def test_optimizer_section_passthrough():
    raw = minimal()
    raw["optimizer"] = {"grad_tol": 1e-2, "max_iters": 7, "noise": False,
                        "warm_start": "gens.npz"}
    cfg = parse_config(raw)
    assert cfg.optimizer.grad_tol == 1e-2
    assert cfg.optimizer.max_iters == 7
    assert cfg.optimizer.noise is False
    assert cfg.warm_start == "gens.npz"
    raw["optimizer"] = {"max_iters": 0}
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_sweep_validation():
    raw = minimal()
    raw["sweep"] = {"key": "R", "values": [0, 1, 2]}
    assert parse_config(raw).sweep.values == (0, 1, 2)
    raw["sweep"] = {"key": "mu", "values": [0.0]}
    with pytest.raises(ConfigError, match="sweep.key"):
        parse_config(raw)
    raw["sweep"] = {"key": "R", "values": [-1]}
    with pytest.raises(ConfigError):
        parse_config(raw)
    raw["sweep"] = {"key": "shape", "values": ["two_circles", "blob"]}
    with pytest.raises(ConfigError):
        parse_config(raw)
    raw["sweep"] = {"key": "shape", "values": ["two_circles", "strip"]}
    assert parse_config(raw).sweep.values == ("two_circles", "strip")


def test_echo_roundtrips():
    raw = minimal()
    raw["seed"] = 5
    raw["sweep"] = {"key": "R", "values": [1, 2]}
    raw["optimizer"] = {"warm_start": "w.npz"}
    cfg = parse_config(raw)
    echoed = cfg.echo()
    # the echo is fully resolved yet still a valid config, both directly
    # and after a JSON round trip
    assert parse_config(echoed) == cfg
    assert parse_config(json.loads(json.dumps(echoed))) == cfg


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(minimal()))
    assert load_config(good).geometry.width == 16
