import os
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Feasibility and membership checks
    INTEGRALITY_TOL: float = 1e-9
    MEMBERSHIP_TOL: float = 1e-9

    # Combinatorial LP (s-values and case thresholds)
    ZERO_BAND: float = 1e-12
    CASE_TOL: float = 1e-12

    # Separation and decomposition
    VIOLATION_TOL: float = 1e-7
    DECOMPOSITION_TOL: float = 1e-9
    TIE_TOL: float = 1e-12
    CUT_MERGE_TOL: float = 1e-10

    # Oracle memoization key precision (decimal digits)
    MEMO_DECIMALS: int = 12

    # Bound given to an infinite-bounded root when finitizing
    DEFAULT_ROOT_BOUND: float = 1.0

    # Dense simplex
    DEGENERATE_PIVOT_LIMIT: int = 50
    LP_FEASIBILITY_TOL: float = 1e-9
    LP_MAX_PIVOTS: int = 50000

    # Enumeration guard rails
    MAX_HULL_ENUMERATION: int = 20
    MAX_PERMUTATION_ENUMERATION: int = 8

    # Sampled DR-submodularity check
    DR_SAMPLES: int = 200
    DR_TOL: float = 1e-9

    class Config:
        env_prefix = "DRSUBMOD_"
        # Look for env file in project root, even when running from subdirectories
        env_file = os.getenv("DRSUBMOD_ENV_FILE") or str(Path(__file__).parents[4] / "drsubmod.env")
        case_sensitive = False
        extra = "ignore"


settings = Settings()
