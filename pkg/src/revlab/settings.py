"""Runtime configuration read from REVLAB_* environment variables."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RevlabSettings(BaseSettings):
    """Solver limits, tolerances and worker configuration."""

    model_config = SettingsConfigDict(env_prefix="REVLAB_", frozen=True)

    threads: int = Field(default=1, ge=1, description="Worker pool size for experiment grids")
    max_dense_sites: int = Field(default=12, ge=1, le=14, description="Largest n solved by dense eigh")
    max_iterative_sites: int = Field(default=24, ge=1, description="Largest n solved by Lanczos")
    max_sector_dim: int = Field(default=65537, ge=2, description="Largest collective-spin sector")
    degeneracy_rtol: float = Field(default=1e-8, gt=0.0)
    lanczos_tol: float = Field(default=1e-12, ge=0.0)
    lanczos_maxiter: int | None = None
    overlap_floor: float = Field(default=1e-8, gt=0.0)
    pinv_cutoff: float = Field(default=1e-10, gt=0.0)
    max_solve_dim: int = Field(default=4096, ge=1, description="Largest Gram matrix in least squares")
    max_basis_size: int = Field(default=2**20, ge=1)
    log_level: str = "INFO"


@lru_cache(maxsize=1)
def get_settings() -> RevlabSettings:
    """Return the process-wide settings, read once from the environment."""
    return RevlabSettings()


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for stream ``index`` of a manifest seed.

    Args:
        seed: 64-bit manifest seed
        index: Stream index (grid point, trial number)

    Returns:
        Philox-backed generator, independent of execution order
    """
    key = ((seed & 0xFFFFFFFFFFFFFFFF) << 64) | (index & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))
