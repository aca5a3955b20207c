"""Pipeline configuration: presets, JSON loading, validation, and hashing.

A config file is a JSON object; the optional ``preset`` key ("kitti" or
"wod") fills defaults that explicit keys then override.  The config hash in
pipeline manifests is the SHA-256 of the fully resolved document in canonical
form (sorted keys, compact separators), so semantically equal configs hash
equally regardless of formatting.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .cloud import CropRange
from .density import DesConfig
from .errors import ConfigError
from .ground import GasConfig
from .keypoints import CkpsConfig
from .rng import RNG_NAME

STAGES = ("sms", "ckps", "stats")
EMIT_FORMATS = ("csv", "json")

PRESETS = {
    "kitti": {
        "n_p": 16384,
        "crop": {"x_min": 0.0, "x_max": 70.4, "y_min": -40.0, "y_max": 40.0,
                 "z_min": -3.0, "z_max": 1.0},
        "des": {"tau_far": 40.0, "d_t": 5.0, "mu": 0.5,
                "rho_s": 5.0, "rho_m": 8.0, "rho_l": 15.0,
                "s1": 0.15, "s2": 0.1, "s3": 0.15,
                "tau_z_min": -1.5, "tau_z_max": 0.5},
        "gas": {"x_s": 0.0, "x_l": 40.0, "y_s": -35.0, "y_l": 35.0,
                "x_t": 5.0, "y_t": 10.0, "tau_h": 0.2, "passthrough_outside": True},
        "ckps": {"voxel_size": 0.4, "tau_v": 0.001},
    },
    "wod": {
        "n_p": 180000,
        "crop": {"x_min": -75.2, "x_max": 75.2, "y_min": -75.2, "y_max": 75.2,
                 "z_min": -2.0, "z_max": 4.0},
        "des": {"tau_far": 55.0, "d_t": 5.0, "mu": 1.0,
                "rho_s": 12.0, "rho_m": 20.0, "rho_l": 36.0,
                "s1": 0.15, "s2": 0.1, "s3": 0.15,
                "tau_z_min": -1.0, "tau_z_max": 2.0},
        "gas": {"x_s": -45.0, "x_l": 45.0, "y_s": -45.0, "y_l": 45.0,
                "x_t": 10.0, "y_t": 10.0, "tau_h": 0.5, "passthrough_outside": True},
        "ckps": {"voxel_size": 0.4, "tau_v": 0.001},
    },
}


@dataclass
class PipelineConfig:
    preset: str = "custom"
    n_p: int = 16384
    seed: int = 0
    crop: CropRange = field(default_factory=lambda: CropRange(**PRESETS["kitti"]["crop"]))
    des: DesConfig = field(default_factory=DesConfig)
    gas: GasConfig = field(default_factory=GasConfig)
    ckps: CkpsConfig = field(default_factory=CkpsConfig)
    stages: tuple = ("sms", "ckps")
    emit: tuple = ("csv", "json")
    output_dir: str | None = None

    def resolved_dict(self) -> dict:
        doc = {
            "preset": self.preset,
            "n_p": self.n_p,
            "seed": self.seed,
            "crop": asdict(self.crop),
            "des": asdict(self.des),
            "gas": asdict(self.gas),
            "ckps": {"voxel_size": self.ckps.voxel_size, "tau_v": self.ckps.tau_v,
                     "origin": list(self.ckps.origin)},
            "stages": list(self.stages),
            "emit": list(self.emit),
            "rng": RNG_NAME,
        }
        return doc

    def config_hash(self) -> str:
        canonical = json.dumps(self.resolved_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def violations_of(doc: dict) -> list:
    """Every constraint violation in a raw (already preset-merged) config dict."""
    v = []
    preset = doc.get("preset", "custom")
    if preset not in ("custom", *PRESETS):
        v.append(f"unknown preset {preset!r}")
    if not isinstance(doc.get("n_p"), int) or doc.get("n_p", 0) <= 0:
        v.append("n_p must be a positive integer")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 1 << 64:
        v.append("seed must be an unsigned 64-bit integer")
    for stage in doc.get("stages", []):
        if stage not in STAGES:
            v.append(f"unknown stage {stage!r}")
    for fmt in doc.get("emit", []):
        if fmt not in EMIT_FORMATS:
            v.append(f"unknown emit format {fmt!r}")
    if "output_dir" in doc and not isinstance(doc["output_dir"], str):
        v.append("output_dir must be a string path")

    crop = doc.get("crop", {})
    for axis in "xyz":
        lo, hi = crop.get(f"{axis}_min"), crop.get(f"{axis}_max")
        if lo is None or hi is None:
            v.append(f"crop: missing {axis} bounds")
        elif not lo < hi:
            v.append(f"crop: {axis}_min < {axis}_max required")

    try:
        DesConfig(**doc.get("des", {}))
    except (TypeError, ValueError) as e:
        v.extend(str(e).split("; ") if isinstance(e, ValueError) else [f"des: {e}"])
    try:
        GasConfig(**doc.get("gas", {}))
    except (TypeError, ValueError) as e:
        v.extend(str(e).split("; ") if isinstance(e, ValueError) else [f"gas: {e}"])
    ckps = dict(doc.get("ckps", {}))
    ckps.pop("origin", None)
    try:
        CkpsConfig(**ckps)
    except (TypeError, ValueError) as e:
        v.extend(str(e).split("; ") if isinstance(e, ValueError) else [f"ckps: {e}"])
    return v


def resolve(doc: dict) -> PipelineConfig:
    """Expand the preset, validate everything, and build the typed config."""
    preset = doc.get("preset", "custom")
    merged = _merge(PRESETS.get(preset, {}), doc)
    merged.setdefault("stages", ["sms", "ckps"])
    merged.setdefault("emit", ["csv", "json"])
    merged.setdefault("seed", 0)
    if preset == "custom" and "n_p" not in merged:
        merged["n_p"] = 16384

    problems = violations_of(merged)
    if problems:
        raise ConfigError("; ".join(problems))

    crop = CropRange(**merged["crop"])
    ckps_doc = dict(merged.get("ckps", {}))
    ckps_doc.setdefault("origin", list(crop.min_corner()))
    return PipelineConfig(
        preset=preset,
        n_p=merged["n_p"],
        seed=merged["seed"],
        crop=crop,
        des=DesConfig(**merged["des"]),
        gas=GasConfig(**merged["gas"]),
        ckps=CkpsConfig(**ckps_doc),
        stages=tuple(merged["stages"]),
        emit=tuple(merged["emit"]),
        output_dir=merged.get("output_dir"),
    )


def load_config(path) -> PipelineConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return resolve(doc)


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_config(path) -> ValidationReport:
    """Collect every violation in a config file instead of stopping at the first."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        return ValidationReport([f"cannot read config: {e}"])
    if not isinstance(doc, dict):
        return ValidationReport(["config root must be a JSON object"])
    preset = doc.get("preset", "custom")
    merged = _merge(PRESETS.get(preset, {}), doc)
    return ValidationReport(violations_of(merged))


def preset_config(name: str, seed: int | None = None) -> PipelineConfig:
    doc = {"preset": name}
    if seed is not None:
        doc["seed"] = seed
    return resolve(doc)
