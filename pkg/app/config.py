"""Application configuration."""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``UQEVO_``)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="UQEVO_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "uq-evolve"

    # Logging
    log_level: str = "INFO"

    # Mutation LLM
    llm_endpoint: str = "https://api.openai.com/v1/chat/completions"
    llm_model: str = "gpt-4o-mini"
    llm_api_key_env: str = "OPENAI_API_KEY"
    llm_timeout: float = 60.0
    llm_retry_budget: int = 3
    llm_backoff_factor: float = 1.0
    llm_max_tokens: int = 1024
    llm_max_in_flight: int = 2

    # Significance testing
    bootstrap_resamples: int = 10_000
    bootstrap_alpha: float = 0.05


settings = Settings()
