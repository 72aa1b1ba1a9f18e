from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from dotenv import load_dotenv
from typing import Optional

# Load environment variables from .env file
load_dotenv()

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # Logging settings
    LOG_LEVEL: str = "WARNING"
    LOG_TO_FILE: bool = False
    LOG_TO_CONSOLE: bool = True
    LOG_FILE: str = "lens_balls.log"

    # Cache settings
    CACHE_ENABLED: bool = True
    CACHE_DIR: str = ".lens_ball_cache"

    # Catalog settings
    CATALOG_BOUND: int = 256  # largest lens order p3 considered
    MATCH_ORIENTATION: str = "oriented"  # oriented or unoriented
    FIXTURE_PATH: Optional[str] = None  # defaults to the shipped table transcription

    # Search settings
    SEARCH_BOUND_P: int = 16
    SEARCH_C_MIN: int = -8
    SEARCH_C_MAX: int = 12
    SLIDE_MAX_DEPTH: int = 64  # clipped slide walks log a warning
    WORKERS: int = 1
    SHOW_PROGRESS: bool = False

    @property
    def c_range(self) -> range:
        return range(self.SEARCH_C_MIN, self.SEARCH_C_MAX + 1)

@lru_cache()
def get_settings() -> Settings:
    return Settings()
