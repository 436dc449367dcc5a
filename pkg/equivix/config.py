# equivix/config.py

from pathlib import Path
from typing import Any, Literal

from pydantic import Field
from pydantic_settings import (
    BaseSettings,
    JsonConfigSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

DATA_DIR = Path(__file__).resolve().parent / "data"
DEFAULTS_FILE = DATA_DIR / "defaults.json"


class Settings(BaseSettings):
    # ─── Runtime ──────────────────────────────────────────────
    THREADS: int = Field(default=4, ge=1)  # EQUIVIX_THREADS caps the worker count
    LOG_LEVEL: str = "INFO"
    SEED: int = 20240611

    # ─── Chern-integral quadrature ────────────────────────────
    QUAD_NODES: int = Field(default=10, ge=8)
    QUAD_LEVELS: int = Field(default=2, ge=1, le=6)
    QUAD_ABS_TOL: float = Field(default=1e-8, gt=0)
    QUAD_REL_TOL: float = Field(default=1e-5, gt=0)
    QUAD_CELL_SIZE: int = Field(default=16384, ge=64)
    QUAD_MAP: Literal["tan"] = "tan"
    FD_STEP: float = Field(default=1e-3, gt=0)

    # ─── Group elements ───────────────────────────────────────
    EIGEN_TOL: float = Field(default=1e-9, gt=0)
    CONDITIONING_FLOOR: float = Field(default=1e-6, gt=0)

    # ─── Hermite basis / semiclassical side ───────────────────
    HERMITE_N: int = Field(default=40, ge=4)
    HERMITE_QUAD_NODES: int = Field(default=0, ge=0)  # 0 picks 3N+60
    HERMITE_QUAD_MAX: int = Field(default=300, ge=32, le=320)
    STAR_QUAD_NODES: int = Field(default=100, ge=16, le=320)
    HBAR_SCHEDULE_C: float = Field(default=12.0, gt=0)

    # ─── Sampling checks ──────────────────────────────────────
    ELLIPTICITY_SHELLS: int = Field(default=8, ge=1)
    ELLIPTICITY_PER_SHELL: int = Field(default=64, ge=1)

    # ─── Sources: kwargs > env > .env > checked-in defaults ───
    model_config = SettingsConfigDict(
        env_prefix="EQUIVIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        json_file=DEFAULTS_FILE,
        json_file_encoding="utf-8",
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            JsonConfigSettingsSource(settings_cls),
            file_secret_settings,
        )

    def defaults_snapshot(self) -> dict[str, Any]:
        """Numeric defaults echoed into every CLI output."""
        return self.model_dump(exclude={"LOG_LEVEL"})


# one global Settings instance
settings = Settings()
