"""Experiment configuration files and command-line overrides.

Configs are TOML; the same loader also accepts a run manifest (JSON), whose
embedded effective config reproduces the original run byte for byte. All
randomness flows from explicit `seed` keys: a missing seed is an error,
never a wall-clock default.
"""

from __future__ import annotations

import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .drift import DriftSpec
from .engine import STEP_PHASES, ExperimentConfig
from .groups import group_from_name
from .lattice import DEFAULT_DIM_CAP, lattice_from_links, two_link_plaquette, z2_two_link_hamiltonian

__all__ = ["ConfigError", "load_config_file", "merge_overrides", "experiment_from_dict", "effective_dict"]

HAMILTONIAN_KINDS = ("z2-two-link",)


class ConfigError(Exception):
    """A configuration file or override could not be parsed or validated."""


def load_config_file(path) -> dict:
    """Read a TOML config or a JSON run manifest into a plain dict."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix == ".json" or raw.lstrip()[:1] == b"{":
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON manifest: {exc}") from exc
        config = payload.get("config")
        if not isinstance(config, dict):
            raise ConfigError(f"{path}: manifest has no 'config' table")
        return config
    try:
        return tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc


def _parse_override_value(text: str):
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text  # bare words are strings (mode=haar)


def merge_overrides(data: dict, overrides) -> dict:
    """Apply `key=value` overrides (dotted keys reach nested tables)."""
    merged = json.loads(json.dumps(data))  # deep copy of plain TOML/JSON data
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        node = merged
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} descends into a non-table key")
        node[parts[-1]] = _parse_override_value(value)
    return merged


def _require(data: dict, key: str, kind, where: str = "config"):
    if key not in data:
        raise ConfigError(f"{where}: missing required key '{key}'")
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{where}: key '{key}' must be an integer, got a boolean")
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}: key '{key}' must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _optional(data: dict, key: str, kind, default, where: str = "config"):
    if key not in data:
        return default
    return _require(data, key, kind, where)


def _build_lattice(data: dict, group, dim_cap: int):
    lattice = data.get("lattice", "two-link-plaquette")
    if "links" in data:
        links = data["links"]
        if not isinstance(links, list) or not all(
            isinstance(e, list) and len(e) == 2 for e in links
        ):
            raise ConfigError("key 'links' must be a list of [tail, head] pairs")
        sites = _optional(data, "sites", int, None)
        if group.order ** len(links) > dim_cap:
            # a well-formed config asking for too much space is a runtime
            # failure (exit 2), not a parse error
            raise RuntimeError(
                f"basis dimension |G|^L = {group.order ** len(links)} exceeds the "
                f"dimension cap {dim_cap}"
            )
        try:
            return lattice_from_links(group, links, num_sites=sites, dim_cap=dim_cap)
        except ValueError as exc:
            raise ConfigError(f"invalid lattice: {exc}") from exc
    if lattice != "two-link-plaquette":
        raise ConfigError(
            f"unknown lattice {lattice!r} (use 'two-link-plaquette' or an explicit 'links' list)"
        )
    return two_link_plaquette(group, dim_cap=dim_cap)


def _build_drift(data: dict) -> DriftSpec:
    table = _require(data, "drift", dict)
    kind = _require(table, "kind", str, where="[drift]")
    try:
        if kind == "z2_rotation":
            return DriftSpec(kind=kind, epsilon=_require(table, "epsilon", float, where="[drift]"))
        if kind == "random_hermitian":
            return DriftSpec(
                kind=kind,
                amplitude=_require(table, "amplitude", float, where="[drift]"),
                seed=_require(table, "seed", int, where="[drift]"),
                resample=_optional(table, "resample", str, "never", where="[drift]"),
            )
    except ValueError as exc:
        raise ConfigError(f"[drift]: {exc}") from exc
    raise ConfigError(f"[drift]: unknown kind {kind!r}")


def experiment_from_dict(data: dict) -> ExperimentConfig:
    """Validate a parsed config and build the experiment description."""
    seed = _require(data, "seed", int)
    steps = _require(data, "steps", int)
    trajectories = _require(data, "trajectories", int)
    mode = _require(data, "mode", str)
    group_name = _require(data, "group", str)
    try:
        group = group_from_name(group_name)
    except ValueError as exc:
        raise ConfigError(f"key 'group': {exc}") from exc
    dim_cap = _optional(data, "dim_cap", int, DEFAULT_DIM_CAP)
    try:
        model = _build_lattice(data, group, dim_cap)
    except ValueError as exc:
        raise ConfigError(f"invalid lattice: {exc}") from exc
    drift = _build_drift(data)

    word_generators = None
    word_length = None
    if "word" in data:
        table = _require(data, "word", dict)
        gens = _require(table, "generators", list, where="[word]")
        word_generators = tuple(int(g) for g in gens)
        word_length = _require(table, "length", int, where="[word]")

    hamiltonian = None
    delta = 1.0
    if "hamiltonian" in data:
        table = _require(data, "hamiltonian", dict)
        kind = _require(table, "kind", str, where="[hamiltonian]")
        if kind not in HAMILTONIAN_KINDS:
            raise ConfigError(f"[hamiltonian]: unknown kind {kind!r}, supported: {HAMILTONIAN_KINDS}")
        hamiltonian = z2_two_link_hamiltonian()
        delta = _require(table, "delta", float, where="[hamiltonian]")

    forced = data.get("force_transform")
    if forced is not None and not isinstance(forced, list):
        raise ConfigError("key 'force_transform' must be a list of site elements")

    step_order = data.get("step_order", list(STEP_PHASES))
    if not isinstance(step_order, list) or not all(isinstance(s, str) for s in step_order):
        raise ConfigError("key 'step_order' must be a list of phase names")

    try:
        return ExperimentConfig(
            model=model,
            drift=drift,
            steps=steps,
            trajectories=trajectories,
            mode=mode,
            master_seed=seed,
            word_generators=word_generators,
            word_length=word_length,
            hamiltonian=hamiltonian,
            delta=delta,
            initial_state_index=_optional(data, "initial_state", int, 0),
            forced_transform=tuple(forced) if forced is not None else None,
            step_order=tuple(step_order),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def effective_dict(data: dict) -> dict:
    """Normalized snapshot of the merged config, as written to the manifest.

    Building the experiment from this snapshot reproduces the run exactly.
    """
    cfg = experiment_from_dict(data)  # validates; defaults below mirror it
    out = {
        "seed": cfg.master_seed,
        "steps": cfg.steps,
        "trajectories": cfg.trajectories,
        "mode": cfg.mode,
        "group": cfg.model.group.name,
        "dim_cap": cfg.model.dim_cap,
        "initial_state": cfg.initial_state_index,
        "step_order": list(cfg.step_order),
    }
    if "links" in data:
        out["links"] = [list(link) for link in cfg.model.links]
        out["sites"] = cfg.model.num_sites
    else:
        out["lattice"] = "two-link-plaquette"
    drift = cfg.drift
    if drift.kind == "z2_rotation":
        out["drift"] = {"kind": drift.kind, "epsilon": drift.epsilon}
    else:
        out["drift"] = {
            "kind": drift.kind,
            "amplitude": drift.amplitude,
            "seed": drift.seed,
            "resample": drift.resample,
        }
    if cfg.word_generators is not None:
        out["word"] = {"generators": list(cfg.word_generators), "length": cfg.word_length}
    if cfg.hamiltonian is not None:
        out["hamiltonian"] = {"kind": "z2-two-link", "delta": cfg.delta}
    if cfg.forced_transform is not None:
        out["force_transform"] = list(cfg.forced_transform)
    return out
