"""Run configuration: canvas geometry, alignment grid, filter thresholds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .align import AlignSearchConfig
from .fontsim import HOG_SIM_KEEP_MIN, MAX_IOU_KEEP_MIN


@dataclass(frozen=True)
class RunConfig:
    canvas_size: int = 512
    fill_ratio: float = 0.8
    margin: float = 0.05
    metric_canvas: int = 256  # aligned-frame size for HOG / MS-SSIM
    filter_max_iou: float = MAX_IOU_KEEP_MIN
    filter_hog_sim: float = HOG_SIM_KEEP_MIN
    siglip_logit_scale: float = 10.0
    siglip_logit_bias: float = -10.0
    align: AlignSearchConfig = field(default_factory=AlignSearchConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        align = data.pop("align", None)
        cfg = cls(**data)
        if align is not None:
            cfg = replace(cfg, align=AlignSearchConfig(**align))
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Load JSON config; TOML is accepted when the interpreter has tomllib."""
        path = Path(path)
        if path.suffix == ".toml":
            try:
                import tomllib
            except ImportError as exc:  # Python < 3.11
                raise ValueError(
                    "TOML configs need Python >= 3.11; use JSON instead") from exc
            with open(path, "rb") as fh:
                return cls.from_dict(tomllib.load(fh))
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
