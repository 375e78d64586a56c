import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()

# Get the base directory of the project
BASE_DIR = Path(__file__).resolve().parent.parent.parent


class Settings(BaseSettings):
    """Runtime settings loaded from POWERDIV_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="POWERDIV_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Root existence mod p
    root_scan_threshold: int = 1 << 16
    binomial_shortcut: bool = True

    # Sieve workers
    segment_size: int = 32768
    workers: int = os.cpu_count() or 1

    # Cache
    use_cache: bool = True
    cache_dir: Path = BASE_DIR / "data" / "cache"

    # Witness search
    default_cap: int = 10**6
    default_witnesses: int = 10
    probe_primes: int = 2000
    default_kmax: int = 60

    # Density acceptance, in standard errors
    stderr_tolerance: float = 4.0

    # Finite groups
    group_order_cap: int = 10**4
    group_full_check_limit: int = 512
    group_sample_checks: int = 20000
    sweep_max_order: int = 24

    log_level: str = "WARNING"

    def with_overrides(self, **overrides: Optional[object]) -> "Settings":
        """Return a copy with every non-None override applied."""
        values = {key: value for key, value in overrides.items() if value is not None}
        return self.model_copy(update=values)


# Create a global settings object
settings = Settings()
