"""Run configuration: schema, defaults, validation, JSON parsing.

The config file is a single JSON object. Engine definitions may be inlined
under "engines"; external adapters can also be picked up from manifest
files via the CLI's --adapters flag. Unknown keys are rejected, with the
nearest valid names suggested.
"""

from __future__ import annotations

import difflib
import json
import os
from dataclasses import dataclass, field, asdict
from pathlib import Path

from .engines import BUILTIN_ESTIMATOR, EngineDescriptor, SimModel
from .errors import ConfigurationError

__all__ = ["RunConfig", "parse_config", "config_from_dict", "engine_from_dict",
           "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "XREF_OUTPUT_DIR"

_REQUIRED_KEYS = ("tts", "asrs", "target_asr", "corpus", "num_iteration",
                  "text_batch_size", "output_dir")
_OPTIONAL_KEYS = {
    "estimator": "none",
    "time_budget": 3600.0,
    "chunking": "dynamic",
    "clock": "wall",
    "recompute": False,
    "seed": 0,
    "sample_size": None,
    "engines": (),
    "estimator_train_cost": 0.0,
    "workers": 1,
    "cache_transcriptions": True,
    "adapter_timeout": 300.0,
}
_ALL_KEYS = set(_REQUIRED_KEYS) | set(_OPTIONAL_KEYS)

_ENGINE_KEYS = {"name", "kind", "backend", "exec", "virtual_cost", "sim"}
_SIM_KEYS = {"p_sub", "p_del", "trigger_tokens", "invalid_audio_rate", "rng_seed"}


@dataclass(frozen=True)
class RunConfig:
    tts: str
    asrs: tuple[str, ...]
    target_asr: str
    corpus: str
    num_iteration: int
    text_batch_size: int
    output_dir: str
    estimator: str = "none"
    time_budget: float = 3600.0
    chunking: str = "dynamic"
    clock: str = "wall"
    recompute: bool = False
    seed: int = 0
    sample_size: int | None = None
    engines: tuple[EngineDescriptor, ...] = ()
    estimator_train_cost: float = 0.0
    workers: int = 1
    cache_transcriptions: bool = True
    adapter_timeout: float = 300.0

    def replace(self, **changes) -> "RunConfig":
        current = {f: getattr(self, f) for f in self.__dataclass_fields__}
        current.update(changes)
        return RunConfig(**current)

    def echo(self) -> dict:
        """JSON-serializable view of the effective configuration."""
        d = asdict(self)
        d["asrs"] = list(self.asrs)
        d["engines"] = [_engine_to_dict(e) for e in self.engines]
        return d


def _engine_to_dict(e: EngineDescriptor) -> dict:
    out: dict = {"name": e.name, "kind": e.kind, "backend": e.backend,
                 "virtual_cost": e.virtual_cost}
    if e.exec_ is not None:
        out["exec"] = list(e.exec_)
    if e.sim is not None:
        out["sim"] = {"p_sub": e.sim.p_sub, "p_del": e.sim.p_del,
                      "trigger_tokens": sorted(e.sim.trigger_tokens),
                      "invalid_audio_rate": e.sim.invalid_audio_rate,
                      "rng_seed": e.sim.rng_seed}
    return out


def _reject_unknown(given: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(given) - allowed)
    if not unknown:
        return
    hints = []
    for key in unknown:
        near = difflib.get_close_matches(key, sorted(allowed), n=2)
        hint = f"'{key}'" + (f" (did you mean {', '.join(repr(n) for n in near)}?)"
                             if near else "")
        hints.append(hint)
    raise ConfigurationError(f"unknown {context} key(s): {'; '.join(hints)}")


def engine_from_dict(raw: dict) -> EngineDescriptor:
    if not isinstance(raw, dict):
        raise ConfigurationError(f"engine definition must be an object, got {raw!r}")
    _reject_unknown(raw, _ENGINE_KEYS, "engine")
    sim = None
    if "sim" in raw:
        sim_raw = raw["sim"]
        _reject_unknown(sim_raw, _SIM_KEYS, "engine sim")
        sim = SimModel(
            p_sub=float(sim_raw.get("p_sub", 0.0)),
            p_del=float(sim_raw.get("p_del", 0.0)),
            trigger_tokens=frozenset(sim_raw.get("trigger_tokens", ())),
            invalid_audio_rate=float(sim_raw.get("invalid_audio_rate", 0.0)),
            rng_seed=int(sim_raw.get("rng_seed", 0)),
        )
    exec_ = raw.get("exec")
    if exec_ is not None:
        if (not isinstance(exec_, list) or not exec_
                or not all(isinstance(a, str) for a in exec_)):
            raise ConfigurationError(
                f"engine '{raw.get('name')}': exec must be a non-empty string list")
        exec_ = tuple(exec_)
    backend = raw.get("backend", "external" if exec_ else "simulated")
    return EngineDescriptor(name=raw.get("name", ""), kind=raw.get("kind", ""),
                            backend=backend, exec_=exec_, sim=sim,
                            virtual_cost=float(raw.get("virtual_cost", 1.0)))


def _require_positive(name: str, value, integral: bool = False) -> None:
    ok = isinstance(value, int) if integral else isinstance(value, (int, float))
    ok = ok and not isinstance(value, bool) and value > 0
    if not ok:
        raise ConfigurationError(f"'{name}' must be a positive "
                                 f"{'integer' if integral else 'number'}, got {value!r}")


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    _reject_unknown(raw, _ALL_KEYS, "config")
    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigurationError(f"missing required config key(s): {', '.join(missing)}")

    merged = dict(_OPTIONAL_KEYS)
    merged.update(raw)

    asrs = merged["asrs"]
    if (not isinstance(asrs, list) or len(asrs) < 2
            or not all(isinstance(a, str) for a in asrs)):
        raise ConfigurationError("'asrs' must list at least two engine names")
    if len(set(asrs)) != len(asrs):
        raise ConfigurationError("'asrs' contains duplicate names")
    if merged["target_asr"] not in asrs:
        raise ConfigurationError(
            f"'target_asr' {merged['target_asr']!r} is not in asrs {asrs}")

    _require_positive("num_iteration", merged["num_iteration"], integral=True)
    _require_positive("text_batch_size", merged["text_batch_size"], integral=True)
    _require_positive("time_budget", merged["time_budget"])
    _require_positive("workers", merged["workers"], integral=True)
    if merged["sample_size"] is not None:
        _require_positive("sample_size", merged["sample_size"], integral=True)
    if merged["chunking"] not in ("static", "dynamic"):
        raise ConfigurationError(
            f"'chunking' must be 'static' or 'dynamic', got {merged['chunking']!r}")
    if merged["clock"] not in ("wall", "virtual"):
        raise ConfigurationError(
            f"'clock' must be 'wall' or 'virtual', got {merged['clock']!r}")
    if merged["estimator_train_cost"] < 0:
        raise ConfigurationError("'estimator_train_cost' must be non-negative")
    if not isinstance(merged["estimator"], str) or not merged["estimator"]:
        raise ConfigurationError("'estimator' must be an engine name or 'none'")

    engines = tuple(engine_from_dict(e) for e in merged["engines"])
    names = [e.name for e in engines]
    if len(set(names)) != len(names):
        raise ConfigurationError("duplicate engine names in 'engines'")
    if BUILTIN_ESTIMATOR in names:
        raise ConfigurationError(
            f"engine name '{BUILTIN_ESTIMATOR}' is reserved for the built-in estimator")

    output_dir = os.environ.get(OUTPUT_DIR_ENV) or merged["output_dir"]

    return RunConfig(
        tts=merged["tts"], asrs=tuple(asrs), target_asr=merged["target_asr"],
        corpus=merged["corpus"], num_iteration=merged["num_iteration"],
        text_batch_size=merged["text_batch_size"], output_dir=output_dir,
        estimator=merged["estimator"], time_budget=float(merged["time_budget"]),
        chunking=merged["chunking"], clock=merged["clock"],
        recompute=bool(merged["recompute"]), seed=int(merged["seed"]),
        sample_size=merged["sample_size"], engines=engines,
        estimator_train_cost=float(merged["estimator_train_cost"]),
        workers=int(merged["workers"]),
        cache_transcriptions=bool(merged["cache_transcriptions"]),
        adapter_timeout=float(merged["adapter_timeout"]),
    )


def parse_config(path: str | Path) -> RunConfig:
    """Parse and validate a config.json file."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ConfigurationError(f"config {path}: invalid JSON ({exc})")
    return config_from_dict(raw)
