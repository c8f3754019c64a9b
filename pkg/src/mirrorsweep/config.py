"""Run configuration: defaults, then a JSON config file, then command-line flags."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .costvolume import DepthSampling
from .detect import DetectConfig
from .sampler import DEFAULT_DELTAS, LatticeConfig

SEED_ENV = "MIRRORSWEEP_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # search
    samples_per_round: int = 32
    rounds: int = 4
    deltas: tuple = DEFAULT_DELTAS
    beam_width: int = 3
    # cost volume
    depth_count: int = 64
    d_min: float = 1.0
    d_max: float = 4.0
    patch_window: int = 7
    stride: int = 4
    quantile: float = 0.7
    temperature: float = 0.03
    depth_aggregate: int = 1
    sgm_p1: float = 0.1
    sgm_p2: float = 4.0  # 0 turns the smoothing off
    min_shift: float | None = None
    # suite and run
    seed: int = 7
    count: int = 50
    threads: int = 0  # 0: all cores
    limit: int | None = None
    figures: bool = False
    overlay: bool = True

    @classmethod
    def keys(cls) -> set:
        return {f.name for f in fields(cls)}

    def validate(self) -> "RunConfig":
        def need(ok, msg):
            if not ok:
                raise ConfigError(msg)

        def is_int(v):
            return isinstance(v, int) and not isinstance(v, bool)

        def is_num(v):
            return isinstance(v, (int, float)) and not isinstance(v, bool)

        for name in ("samples_per_round", "rounds", "beam_width", "depth_count", "patch_window",
                     "stride", "depth_aggregate", "seed", "count", "threads"):
            need(is_int(getattr(self, name)), f"{name} must be an integer")
        for name in ("d_min", "d_max", "quantile", "temperature", "sgm_p1", "sgm_p2"):
            need(is_num(getattr(self, name)), f"{name} must be a number")
        need(isinstance(self.deltas, (list, tuple)) and all(is_num(d) for d in self.deltas),
             "deltas must be a list of numbers")
        need(self.min_shift is None or (is_num(self.min_shift) and self.min_shift >= 0),
             "min_shift must be a non-negative number or null")
        need(self.limit is None or (is_int(self.limit) and self.limit >= 1), "limit must be >= 1")
        need(isinstance(self.figures, bool), "figures must be true or false")
        need(isinstance(self.overlay, bool), "overlay must be true or false")
        need(self.depth_count >= 2, "depth_count must be >= 2")
        need(0 < self.d_min < self.d_max, "need 0 < d_min < d_max")
        need(self.patch_window >= 3 and self.patch_window % 2 == 1, "patch_window must be odd and >= 3")
        need(self.stride >= 1, "stride must be >= 1")
        need(0 < self.quantile <= 1, "quantile must lie in (0, 1]")
        need(self.temperature > 0, "temperature must be positive")
        need(self.depth_aggregate >= 1 and self.depth_aggregate % 2 == 1,
             "depth_aggregate must be odd and >= 1")
        need(0 <= self.sgm_p1 and (self.sgm_p2 == 0 or self.sgm_p1 <= self.sgm_p2),
             "need 0 <= sgm_p1 <= sgm_p2 (or sgm_p2 = 0 to disable)")
        need(self.count >= 1, "count must be >= 1")
        need(self.threads >= 0, "threads must be >= 0")
        try:
            self.lattice()
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return self

    def lattice(self) -> LatticeConfig:
        return LatticeConfig(self.samples_per_round, self.rounds, tuple(self.deltas), self.beam_width)

    def detect_config(self) -> DetectConfig:
        return DetectConfig(
            lattice=self.lattice(),
            depth=DepthSampling(float(self.d_min), float(self.d_max), self.depth_count),
            window=self.patch_window,
            stride=self.stride,
            quantile=float(self.quantile),
            temperature=float(self.temperature),
            depth_aggregate=self.depth_aggregate,
            sgm_p1=float(self.sgm_p1),
            sgm_p2=float(self.sgm_p2),
            min_shift=self.min_shift,
        )

    def worker_count(self) -> int:
        return self.threads or (os.cpu_count() or 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["deltas"] = list(self.deltas)
        return d


def _merge(base: dict, layer: dict, origin: str) -> dict:
    unknown = set(layer) - RunConfig.keys()
    if unknown:
        raise ConfigError(f"unknown config key(s) in {origin}: {', '.join(sorted(unknown))}")
    out = dict(base)
    out.update(layer)
    return out


def load_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def resolve(path=None, flags: dict | None = None, env=None) -> RunConfig:
    """Merge defaults, config file, ``MIRRORSWEEP_SEED`` and flags; validate."""
    env = os.environ if env is None else env
    values = RunConfig().to_dict()
    if path is not None:
        values = _merge(values, load_file(path), str(path))
    if env.get(SEED_ENV):
        try:
            values["seed"] = int(env[SEED_ENV])
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV} must be an integer") from e
    if flags:
        values = _merge(values, {k: v for k, v in flags.items() if v is not None}, "flags")
    if isinstance(values.get("deltas"), list):
        values["deltas"] = tuple(values["deltas"])
    return RunConfig(**values).validate()
