"""Run configuration: a flat, strictly-validated record that round-trips
through canonical JSON (sorted keys, all fields present, two-space indent).
"""

import dataclasses
import json
import math

from .density import BANDWIDTH_MODES
from .domains import domain_from_spec
from .dynamics import drift_from_spec
from .exceptions import ConfigError
from .kernels import KERNEL_NAMES

_TRACK_KEYS = {"path", "columns", "normalization"}
_ORACLE_KEYS = {"resolution", "interior_margin"}


@dataclasses.dataclass
class RunConfig:
    """Everything a pipeline run needs; every field appears in the JSON.

    Exactly one data source: either (domain, delta, n_steps) for a
    simulated path or track for an ingested one.  levels and tau are
    mutually exclusive level queries; both absent skips the level stage.
    """

    domain: dict = None
    drift: dict = None
    x0: list = None
    delta: float = None
    n_steps: int = None
    seed: int = 0
    track: dict = None
    kernel: str = "gaussian"
    bandwidth: float = None
    bandwidth_mode: str = None
    levels: list = None
    tau: float = None
    r: float = None
    drift_h_loc: float = None
    grid_resolution: int = 200
    oracle: dict = None
    out_dir: str = "out"

    def __post_init__(self):
        self.validate()

    def validate(self):
        err = ConfigError
        has_sim = self.domain is not None
        has_track = self.track is not None
        if has_sim == has_track:
            raise err("exactly one of domain (simulation) or track "
                      "(ingestion) must be configured")

        if has_sim:
            try:
                domain_from_spec(self.domain)
            except Exception as exc:
                raise err(f"bad domain spec: {exc}") from None
            try:
                drift_from_spec(self.drift)
            except Exception as exc:
                raise err(f"bad drift spec: {exc}") from None
            if not isinstance(self.delta, (int, float)) or self.delta <= 0:
                raise err("delta must be a positive number")
            if not isinstance(self.n_steps, int) or self.n_steps < 0:
                raise err("n_steps must be a nonnegative integer")
            if self.x0 is not None:
                if (not isinstance(self.x0, (list, tuple)) or len(self.x0) != 2
                        or not all(isinstance(v, (int, float))
                                   for v in self.x0)):
                    raise err("x0 must be a [x, y] pair")
        else:
            if not isinstance(self.track, dict):
                raise err("track must be an object")
            unknown = set(self.track) - _TRACK_KEYS
            if unknown:
                raise err(f"unknown track keys: {sorted(unknown)}")
            if not self.track.get("path"):
                raise err("track.path is required")
            for key in ("delta", "n_steps", "x0"):
                if getattr(self, key) is not None:
                    raise err(f"{key} does not apply to an ingested track")

        if not isinstance(self.seed, int):
            raise err("seed must be an integer")
        if self.kernel not in KERNEL_NAMES:
            raise err(f"unknown kernel {self.kernel!r} "
                      f"(choose from {list(KERNEL_NAMES)})")
        if self.bandwidth is not None:
            if not isinstance(self.bandwidth, (int, float)) \
                    or self.bandwidth <= 0:
                raise err("bandwidth must be positive")
            if self.bandwidth_mode is not None:
                raise err("give bandwidth or bandwidth_mode, not both")
        if self.bandwidth_mode is not None \
                and self.bandwidth_mode not in BANDWIDTH_MODES:
            raise err(f"bandwidth_mode must be one of "
                      f"{sorted(BANDWIDTH_MODES)}")

        if self.levels is not None and self.tau is not None:
            raise err("give levels or tau, not both")
        if self.levels is not None:
            if (not isinstance(self.levels, list) or not self.levels
                    or not all(isinstance(v, (int, float))
                               and math.isfinite(v) for v in self.levels)):
                raise err("levels must be a non-empty list of finite numbers")
        if self.tau is not None:
            if not isinstance(self.tau, (int, float)) or not 0 < self.tau < 1:
                raise err("tau must lie in (0, 1)")
        if self.r is not None and (not isinstance(self.r, (int, float))
                                   or self.r <= 0):
            raise err("r must be positive")
        if self.drift_h_loc is not None \
                and (not isinstance(self.drift_h_loc, (int, float))
                     or self.drift_h_loc <= 0):
            raise err("drift_h_loc must be positive")
        if not isinstance(self.grid_resolution, int) \
                or self.grid_resolution < 2:
            raise err("grid_resolution must be an integer >= 2")
        if self.oracle is not None:
            if not isinstance(self.oracle, dict):
                raise err("oracle must be an object")
            unknown = set(self.oracle) - _ORACLE_KEYS
            if unknown:
                raise err(f"unknown oracle keys: {sorted(unknown)}")
        if not isinstance(self.out_dir, str) or not self.out_dir:
            raise err("out_dir must be a non-empty string")
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)
