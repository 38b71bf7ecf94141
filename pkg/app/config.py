from pydantic_settings import BaseSettings
from typing import Literal
from pathlib import Path


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables and .env."""

    # Default run parameters
    default_prime: int = 5
    default_order: int = 10
    default_t_order: int = 8

    # Guard against runaway truncation orders on the CLI
    max_order: int = 64

    # Name of the Moser time parameter in every (t, x) ring
    time_variable: str = "t"

    # Run profiles
    profiles_path: str = "config/profiles.yaml"

    # Logging (empty log_file disables the file handler)
    log_level: str = "INFO"
    log_file: str = "./logs/padic_darboux.log"

    # Environment
    environment: Literal["development", "testing", "production"] = "development"
    debug: bool = False

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False

    def __init__(self, **data):
        super().__init__(**data)
        self._create_directories()

    def _create_directories(self) -> None:
        """Create required directories if they don't exist."""
        if self.log_file:
            Path(self.log_file).parent.mkdir(parents=True, exist_ok=True)


# Create global settings instance
settings = Settings()
