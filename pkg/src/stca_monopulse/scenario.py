"""TOML scenario files: radar, steer, emitters, algorithm, experiment and output blocks.

Angles are in degrees and ranges in meters at this boundary. Every key is
checked against a fixed schema; an unknown key raises ``ScenarioError``
naming its dotted path.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

from .array_model import Direction, RadarConfig, Steer
from .harness import BASELINES
from .pipeline import Scenario
from .row_column import DEFAULT_LOADING, WEIGHT_MODES, SubarrayPartition
from .scene import Emitter

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

REFERENCE_SCENARIOS = ("table2_four_channel", "table2_row_column")

_RADAR_KEYS = {"rows", "cols", "element_spacing", "carrier", "bandwidth", "pulse_width", "time_shift", "prf"}
_STEER_KEYS = {"elevation_deg", "azimuth_deg", "range_m"}
_EMITTER_KEYS = {"name", "kind", "azimuth_deg", "elevation_deg", "range_m", "power_db"}
_ALGO_KEYS = {"type", "partition", "snapshots", "loading", "weight_mode"}
_EXPERIMENT_KEYS = {"seed", "trials", "snr_db", "offset_azimuth_deg", "baselines", "workers"}
_OUTPUT_KEYS = {"directory", "formats"}
_TOP_KEYS = {"radar", "steer", "emitters", "algorithm", "experiment", "output"}


class ScenarioError(ValueError):
    """Invalid scenario content; the message names the offending key."""


@dataclass(frozen=True)
class ExperimentBlock:
    seed: int = 0
    trials: int = 1000
    snr_db: Tuple[float, ...] = ()
    offset_azimuth_deg: Tuple[float, ...] = ()
    baselines: Tuple[str, ...] = ("stca",)
    workers: int = 1


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "out"
    formats: Tuple[str, ...] = ("csv",)


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    experiment: ExperimentBlock = field(default_factory=ExperimentBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    name: str = ""

    def resolved(self) -> Dict[str, Any]:
        """Fully defaulted configuration in file units, for provenance records."""
        scn = self.scenario
        return {
            "name": self.name,
            "radar": asdict(scn.cfg),
            "steer": {
                "elevation_deg": float(np.rad2deg(scn.steer.elevation)),
                "azimuth_deg": float(np.rad2deg(scn.steer.azimuth)),
                "range_m": scn.steer.range,
            },
            "emitters": [
                {
                    "name": e.name,
                    "kind": e.kind,
                    "azimuth_deg": float(np.rad2deg(e.direction.azimuth)),
                    "elevation_deg": float(np.rad2deg(e.direction.elevation)),
                    "range_m": e.range,
                    "power_db": e.power_db,
                }
                for e in scn.emitters
            ],
            "algorithm": {
                "type": scn.algorithm,
                "partition": f"{scn.partition.tile_rows}x{scn.partition.tile_cols}",
                "snapshots": scn.snapshots,
                "loading": scn.loading,
                "weight_mode": scn.weight_mode,
            },
            "experiment": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.experiment).items()},
            "output": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.output).items()},
        }


def _check_keys(block: Any, allowed: set, where: str) -> Dict[str, Any]:
    if not isinstance(block, dict):
        raise ScenarioError(f"{where}: expected a table")
    for key in block:
        if key not in allowed:
            raise ScenarioError(f"unknown key '{where}.{key}'" if where else f"unknown key '{key}'")
    return block


def _number(block: Dict[str, Any], key: str, where: str, default=None, kind=float):
    if key not in block:
        if default is None:
            raise ScenarioError(f"missing key '{where}.{key}'")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"'{where}.{key}' must be a number")
    if kind is int:
        if float(value) != int(value):
            raise ScenarioError(f"'{where}.{key}' must be an integer")
        return int(value)
    return float(value)


def _list(block: Dict[str, Any], key: str, where: str, item=float) -> Tuple:
    value = block.get(key, [])
    if not isinstance(value, list):
        raise ScenarioError(f"'{where}.{key}' must be a list")
    try:
        return tuple(item(v) for v in value)
    except (TypeError, ValueError):
        raise ScenarioError(f"'{where}.{key}' has an invalid entry") from None


def parse_scenario(data: Dict[str, Any], name: str = "") -> ScenarioFile:
    """Validate a decoded scenario table and build the library objects."""
    _check_keys(data, _TOP_KEYS, "")
    radar = _check_keys(data.get("radar", {}), _RADAR_KEYS, "radar")
    defaults = RadarConfig()
    try:
        cfg = RadarConfig(**{
            k: _number(radar, k, "radar", getattr(defaults, k), int if k in ("rows", "cols") else float)
            for k in sorted(_RADAR_KEYS)
        })
    except ValueError as exc:
        raise ScenarioError(f"radar: {exc}") from None

    if "steer" not in data:
        raise ScenarioError("missing table 'steer'")
    st = _check_keys(data["steer"], _STEER_KEYS, "steer")
    steer = Steer.from_degrees(_number(st, "elevation_deg", "steer", 0.0), _number(st, "azimuth_deg", "steer", 0.0),
                               _number(st, "range_m", "steer"))

    raw_emitters = data.get("emitters", [])
    if not isinstance(raw_emitters, list):
        raise ScenarioError("'emitters' must be an array of tables")
    emitters = []
    for i, e in enumerate(raw_emitters):
        where = f"emitters[{i}]"
        _check_keys(e, _EMITTER_KEYS, where)
        kind = e.get("kind")
        if kind not in ("target", "jammer"):
            raise ScenarioError(f"'{where}.kind' must be 'target' or 'jammer'")
        try:
            emitters.append(Emitter(
                kind,
                Direction.from_degrees(_number(e, "azimuth_deg", where), _number(e, "elevation_deg", where)),
                _number(e, "range_m", where),
                _number(e, "power_db", where),
                str(e.get("name", f"{kind}{i}")),
            ))
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{where}: {exc}") from None
    if sum(e.kind == "target" for e in emitters) > 1:
        raise ScenarioError("emitters: at most one target is supported")

    algo = _check_keys(data.get("algorithm", {}), _ALGO_KEYS, "algorithm")
    try:
        partition = SubarrayPartition.parse(str(algo.get("partition", "4x4")))
        scenario = Scenario(
            cfg, tuple(emitters), steer,
            algorithm=str(algo.get("type", "four_channel")),
            partition=partition,
            snapshots=_number(algo, "snapshots", "algorithm", 512, int),
            loading=_number(algo, "loading", "algorithm", DEFAULT_LOADING),
            weight_mode=str(algo.get("weight_mode", WEIGHT_MODES[0])),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"algorithm: {exc}") from None

    ex = _check_keys(data.get("experiment", {}), _EXPERIMENT_KEYS, "experiment")
    experiment = ExperimentBlock(
        seed=_number(ex, "seed", "experiment", 0, int),
        trials=_number(ex, "trials", "experiment", ExperimentBlock.trials, int),
        snr_db=_list(ex, "snr_db", "experiment"),
        offset_azimuth_deg=_list(ex, "offset_azimuth_deg", "experiment"),
        baselines=_list(ex, "baselines", "experiment", str) or ("stca",),
        workers=_number(ex, "workers", "experiment", 1, int),
    )
    for b in experiment.baselines:
        if b not in BASELINES:
            raise ScenarioError(f"'experiment.baselines' has unknown baseline {b!r}")
    if experiment.trials < 1 or experiment.workers < 1:
        raise ScenarioError("'experiment.trials' and 'experiment.workers' must be at least 1")

    out = _check_keys(data.get("output", {}), _OUTPUT_KEYS, "output")
    formats = _list(out, "formats", "output", str) or ("csv",)
    for f in formats:
        if f not in ("csv", "json"):
            raise ScenarioError(f"'output.formats' has unknown format {f!r}")
    output = OutputBlock(str(out.get("directory", "out")), formats)
    return ScenarioFile(scenario, experiment, output, name)


def load_scenario(source: str) -> ScenarioFile:
    """Read a scenario from a path, or one of the bundled reference names."""
    if source in REFERENCE_SCENARIOS:
        text = resources.files("stca_monopulse.scenarios").joinpath(f"{source}.toml").read_text()
        name = source
    else:
        path = Path(source)
        if not path.is_file():
            raise ScenarioError(f"scenario file not found: {source}")
        text = path.read_text()
        name = path.stem
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from None
    return parse_scenario(data, name)
