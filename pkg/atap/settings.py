import os
from pydantic import (
    BaseModel,
    ConfigDict,
    confloat,
    conint,
    Field,
    model_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Literal, Optional
from typing_extensions import Self

DOTENV_PATH = os.environ.get(
    "DOTENV_PATH",
    os.path.join(
        os.path.dirname(
            os.path.dirname(__file__)
        ),
        ".env"
    )
)
OUTPUT_SCHEMA_VERSION = "1.0"


class _ToleranceSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="ATAP_TOL_",
        env_file=DOTENV_PATH,
        extra="ignore",
        env_ignore_empty=True
    )

    equality: confloat(gt=0) = 1e-9
    root_residual: confloat(gt=0) = 1e-7
    degree_trim: confloat(gt=0) = 1e-12
    dedup: confloat(gt=0) = 1e-7
    division: confloat(gt=0) = 1e-8
    singular: confloat(gt=0) = 1e-7
    crosscheck: confloat(gt=0) = 1e-8
    rep_residual: confloat(gt=0) = 1e-7

    def override(self, **changes) -> "_ToleranceSettings":
        """Copy with the given fields replaced; `None` values are ignored."""
        update = {k: v for k, v in changes.items() if v is not None}
        for name, value in update.items():
            if value <= 0:
                raise ValueError(f"tolerance '{name}' must be positive, got {value}")
        return self.model_copy(update=update)


class _OutputSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="ATAP_OUTPUT_",
        env_file=DOTENV_PATH,
        extra="ignore",
        env_ignore_empty=True
    )

    format: Literal["json", "csv", "text"] = "json"
    seed: int = 20170
    njobs: conint(ge=1, le=32) = 1


class _BaseSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=DOTENV_PATH,
        extra="ignore",
        env_ignore_empty=True
    )
    debug: bool = False


class _AppSettings(BaseModel):
    base_settings: _BaseSettings = _BaseSettings()
    tolerances: _ToleranceSettings = _ToleranceSettings()
    output: _OutputSettings = _OutputSettings()


def resolve_tolerances(tolerances: Optional[_ToleranceSettings]) -> _ToleranceSettings:
    return tolerances if tolerances is not None else app_settings.tolerances


class RunConfig(BaseModel):
    """One validated CLI invocation."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    n: int
    x: Optional[complex] = None
    s: Optional[complex] = None
    tolerances: _ToleranceSettings = Field(default_factory=lambda: app_settings.tolerances)
    format: Literal["json", "csv", "text"] = "json"
    seed: int = 20170

    @model_validator(mode="after")
    def check_knot(self) -> Self:
        if self.m == 0 or self.n == 0:
            raise ValueError(f"J(2m,2n) needs mn != 0, got m={self.m}, n={self.n}")
        return self

    @model_validator(mode="after")
    def check_meridian_trace(self) -> Self:
        if (self.x is None) == (self.s is None):
            raise ValueError("exactly one of x or s must be supplied")
        if self.s is not None and self.s == 0:
            raise ValueError("s must be nonzero")
        return self


app_settings = _AppSettings()
