"""
Application Settings
"""
from pathlib import Path
from typing import Dict, List, Optional
import json
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SETTINGS = Path("config/settings.json")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class TaskDefaults(BaseModel):
    """Default hyperparameters for one kind of signal."""
    layers: int = 5
    hidden: int = 64
    omega0: float = 30.0
    omegas: List[float] = Field(default_factory=lambda: [90.0, 60.0, 30.0, 10.0])
    iters: int = 2000
    batch_size: int = 4096
    eval_every: int = 100

    # Learning rate per family; FFN trains with a larger step
    learning_rates: Dict[str, float] = Field(
        default_factory=lambda: {"scone": 1e-4, "siren": 1e-4, "rbm": 1e-4, "ffn": 1e-3}
    )
    lr_min: float = 1e-6
    rff_sigma: float = 10.0
    rff_size: int = 128

    def omegas_for(self, layers: int) -> List[float]:
        """The default frequency schedule truncated to ``layers - 1`` entries."""
        return list(self.omegas[:max(layers - 1, 0)])

    def lr_for(self, family: str) -> float:
        return self.learning_rates.get(family, self.learning_rates["scone"])


class ImageDefaults(TaskDefaults):
    pass


class VideoDefaults(TaskDefaults):
    pass


class SdfDefaults(TaskDefaults):
    """Deeper network with a flatter schedule, evaluated on an R^3 grid."""
    layers: int = 9
    omegas: List[float] = Field(default_factory=lambda: [70.0, 70.0, 60.0, 50.0, 40.0, 40.0, 30.0, 30.0])
    iters: int = 3000
    eval_res: int = 64
    sphere_radius: float = 0.4
    sphere_points: int = 2048


class Settings(BaseSettings):
    """Application-wide knobs plus per-task training defaults."""
    model_config = SettingsConfigDict(
        env_prefix="COLLAGE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = "WARNING"

    # Kernel threads (COLLAGE_THREADS); 1 keeps every reduction bit-reproducible
    threads: int = 1

    # Rows per chunk for full-grid and SDF-grid evaluation
    eval_chunk: int = 16384

    checkpoint_precision: int = 32
    output_dir: Path = Field(default_factory=lambda: Path("./output"))

    # Per-task defaults
    image: ImageDefaults = Field(default_factory=ImageDefaults)
    video: VideoDefaults = Field(default_factory=VideoDefaults)
    sdf: SdfDefaults = Field(default_factory=SdfDefaults)

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        if v.upper() not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        return v.upper()

    @field_validator('checkpoint_precision')
    @classmethod
    def validate_precision(cls, v):
        if v not in (32, 64):
            raise ValueError("checkpoint_precision must be 32 or 64")
        return v

    @field_validator('threads', 'eval_chunk')
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @classmethod
    def load(cls, config_file: Optional[Path] = None) -> "Settings":
        """Settings from the first JSON file found, then .env and COLLAGE_* variables.

        An explicit ``config_file`` is tried before `config/settings.json` and
        `settings.json` in the working directory. File values win over the environment.
        """
        load_dotenv()
        candidates = [config_file] if config_file else []
        candidates += [DEFAULT_SETTINGS, Path("settings.json")]
        for path in candidates:
            if path.exists():
                return cls(**json.loads(path.read_text(encoding="utf-8")))
        return cls()

    def defaults_for(self, task: str) -> TaskDefaults:
        return getattr(self, task)

    def apply_threads(self) -> None:
        """Export ``threads`` to the BLAS/OpenMP variables that are not already set.

        Only takes effect when called before numpy is first imported.
        """
        for var in THREAD_VARIABLES:
            os.environ.setdefault(var, str(self.threads))

    def save(self, config_file: Path) -> None:
        config_file.parent.mkdir(parents=True, exist_ok=True)
        config_file.write_text(self.model_dump_json(indent=2), encoding="utf-8")
