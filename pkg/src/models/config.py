"""
Model, Training and Run Configuration Models
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError


class ModelFamily(str, Enum):
    """Coordinate network families."""
    SCONE = "scone"
    SIREN = "siren"
    FFN = "ffn"
    RBM = "rbm"


class ActivationName(str, Enum):
    """Mask activations with output range [0, 1]."""
    SIN2 = "sin2"
    SIGMOID = "sigmoid"
    GAUSS = "gauss"
    N_TANH = "n_tanh"
    N_SIN = "n_sin"
    N_COS = "n_cos"


class Task(str, Enum):
    """Signal kinds a run can fit."""
    IMAGE = "image"
    VIDEO = "video"
    SDF = "sdf"


class ModelConfig(BaseModel):
    """Complete architectural description of one network."""
    model_config = ConfigDict(use_enum_values=True, frozen=True)

    family: ModelFamily = ModelFamily.SCONE
    in_dim: int = 2
    out_dim: int = 3
    layers: int = 5
    hidden: List[int] = Field(default_factory=lambda: [256])

    # Frequencies
    omega0: float = 30.0
    omegas: List[float] = Field(default_factory=lambda: [90.0, 60.0, 30.0, 10.0])

    # Mask activation
    activation: ActivationName = ActivationName.SIN2
    learnable_scale: bool = False

    # Gaussian RFF encoding (ffn)
    rff_sigma: float = 10.0
    rff_size: int = 128

    # Adds a bias inside the Fourier bases and z0; off keeps the printed equations
    bias_in_basis: bool = False

    # Pixel grid (H, W) the binary masks live on (rbm)
    rbm_grid: Optional[Tuple[int, int]] = None

    seed: int = 0

    @field_validator("in_dim")
    @classmethod
    def validate_in_dim(cls, v):
        if v not in (2, 3):
            raise ValueError(f"in_dim must be 2 or 3, got {v}")
        return v

    @field_validator("out_dim")
    @classmethod
    def validate_out_dim(cls, v):
        if v not in (1, 3):
            raise ValueError(f"out_dim must be 1 or 3, got {v}")
        return v

    @field_validator("layers", "rff_size")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @model_validator(mode="after")
    def validate_architecture(self):
        hidden = list(self.hidden)
        if len(hidden) == 1 and self.layers > 1:
            # A single width applies to every layer
            object.__setattr__(self, "hidden", hidden * self.layers)
            hidden = list(self.hidden)
        if len(hidden) != self.layers:
            raise ValueError(f"hidden has {len(hidden)} widths for {self.layers} layers")
        if any(d < 1 for d in hidden):
            raise ValueError(f"hidden widths must be positive, got {hidden}")

        if self.family in (ModelFamily.SCONE.value, ModelFamily.RBM.value):
            if len(self.omegas) != self.layers - 1:
                raise ValueError(
                    f"{self.family} with {self.layers} layers needs {self.layers - 1} omegas, "
                    f"got {len(self.omegas)}"
                )
            if any(w <= 0 for w in self.omegas):
                raise ValueError(f"omegas must be positive, got {self.omegas}")
        if self.family in (ModelFamily.SCONE.value, ModelFamily.SIREN.value, ModelFamily.RBM.value):
            if self.omega0 <= 0:
                raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.family == ModelFamily.FFN.value and self.rff_sigma <= 0:
            raise ValueError(f"rff_sigma must be positive, got {self.rff_sigma}")
        if self.family == ModelFamily.RBM.value:
            if self.rbm_grid is None:
                raise ValueError("rbm needs rbm_grid=(H, W)")
            if self.in_dim != 2:
                raise ValueError("rbm is defined on 2D pixel grids only")

        from ..networks.activations import verify_range
        verify_range(self.activation)
        return self


class TrainConfig(BaseModel):
    """Optimizer, schedule and loop settings."""
    model_config = ConfigDict(frozen=True)

    lr0: float = 1e-4
    lr_min: float = 1e-6
    iters: int = 2000
    batch_size: int = 4096
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    eval_every: int = 100
    checkpoint_every: int = 0

    @model_validator(mode="after")
    def validate_schedule(self):
        if not 0 < self.lr_min <= self.lr0:
            raise ValueError(f"need 0 < lr_min <= lr0, got lr_min={self.lr_min}, lr0={self.lr0}")
        if self.iters < 0:
            raise ValueError("iters must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.eval_every < 1:
            raise ValueError("eval_every must be positive")
        return self


class RunConfig(BaseModel):
    """Everything needed to reproduce one run from scratch.

    Serialized as flat ``key = value`` lines. Model and training fields share one
    namespace; ``seed`` is written once and feeds both.
    """
    model_config = ConfigDict(use_enum_values=True)

    task: Task = Task.IMAGE
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)

    # Data
    input: Optional[Path] = None
    analytic_sphere: Optional[float] = None
    sphere_points: int = 2048
    eval_res: int = 64

    # Output
    out: Path = Path("./output/run")
    checkpoint_precision: int = 32

    @field_validator("checkpoint_precision")
    @classmethod
    def validate_precision(cls, v):
        if v not in (32, 64):
            raise ValueError("checkpoint_precision must be 32 or 64")
        return v

    @property
    def seed(self) -> int:
        return self.model.seed

    def to_kv_text(self, exclude: Tuple[str, ...] = ()) -> str:
        """Flat, diffable ``key = value`` form."""
        items = [("task", self.task)]
        items += [(k, v) for k, v in self.model.model_dump().items() if k != "seed"]
        items += list(self.train.model_dump().items())
        items += [(k, getattr(self, k)) for k in RUN_KEYS]
        lines = [f"{key} = {_format_value(value)}" for key, value in items if key not in exclude]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv_text(cls, text: str) -> "RunConfig":
        return cls.from_flat(parse_kv_text(text))

    @classmethod
    def from_flat(cls, values: Dict[str, Any]) -> "RunConfig":
        """Build from a flat mapping (file values merged with CLI overrides)."""
        model_keys = set(ModelConfig.model_fields)
        train_keys = set(TrainConfig.model_fields)
        run_keys = set(cls.model_fields) - {"model", "train"}

        model_values: Dict[str, Any] = {}
        train_values: Dict[str, Any] = {}
        run_values: Dict[str, Any] = {}
        for key, value in values.items():
            if value is None:
                continue
            if key == "seed":
                model_values["seed"] = train_values["seed"] = value
            elif key in model_keys:
                model_values[key] = _split_list(key, value)
            elif key in train_keys:
                train_values[key] = value
            elif key in run_keys:
                run_values[key] = value
            else:
                raise ConfigError(f"unknown configuration key: {key}")
        try:
            return cls(model=ModelConfig(**model_values), train=TrainConfig(**train_values), **run_values)
        except ValidationError as e:
            raise ConfigError(_summarize(e)) from e

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_kv_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        return cls.from_kv_text(path.read_text(encoding="utf-8"))


RUN_KEYS = ("input", "analytic_sphere", "sphere_points", "eval_res", "out", "checkpoint_precision")
_LIST_KEYS = {"hidden", "omegas", "rbm_grid"}


def parse_kv_text(text: str) -> Dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment, empty values mean unset."""
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value if value != "" else None
    return values


def _split_list(key: str, value: Any) -> Any:
    if key in _LIST_KEYS and isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _summarize(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item.get("loc", ())) or "config"
        parts.append(f"{where}: {item.get('msg')}")
    return "; ".join(parts)


# (in_dim, out_dim) each task's networks map between
TASK_DIMS = {
    Task.IMAGE.value: (2, 3),
    Task.VIDEO.value: (3, 3),
    Task.SDF.value: (3, 1),
}
