import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv


# Load environment variables from a .env file if present.
load_dotenv()


@dataclass
class Settings:
    """Engine and CLI configuration loaded from environment variables."""

    smax: int
    tree_smax: int

    report_format: str  # "text" or "json"
    log_level: str

    level_cap_margin: int
    workers: int

    # verify --random
    max_gens: int
    max_rels: int
    max_terms: int

    report_dir: Path | None

    @property
    def is_json_format(self) -> bool:
        return self.report_format.lower() == "json"

    @property
    def is_text_format(self) -> bool:
        return self.report_format.lower() == "text"

    def level_cap_for(self, tsum: int, m: int) -> int:
        """Default tree level cap: one level past the descent bound."""
        return max(0, tsum + m + self.level_cap_margin)


_settings: Settings | None = None


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def _ensure_directories(settings: Settings) -> None:
    """
    Ensure that the report directory exists (created if missing).
    """
    if settings.report_dir is not None:
        settings.report_dir.mkdir(parents=True, exist_ok=True)


def get_settings() -> Settings:
    """
    Return singleton Settings instance populated from environment variables.

    Environment variables (with defaults suited to desk-scale runs):
      - FIMHOM_SMAX
      - FIMHOM_TREE_SMAX
      - FIMHOM_FORMAT
      - FIMHOM_LOG_LEVEL
      - FIMHOM_LEVEL_CAP_MARGIN
      - FIMHOM_WORKERS
      - FIMHOM_MAX_GENS / FIMHOM_MAX_RELS / FIMHOM_MAX_TERMS
      - FIMHOM_REPORT_DIR
    """
    global _settings
    if _settings is not None:
        return _settings

    smax = _int_env("FIMHOM_SMAX", 2)
    tree_smax = _int_env("FIMHOM_TREE_SMAX", 1)

    report_format = os.getenv("FIMHOM_FORMAT", "text")
    if report_format.lower() not in ("text", "json"):
        raise ValueError(f"FIMHOM_FORMAT must be 'text' or 'json', got {report_format!r}")
    log_level = os.getenv("FIMHOM_LOG_LEVEL", "WARNING").upper()

    level_cap_margin = _int_env("FIMHOM_LEVEL_CAP_MARGIN", 2)
    workers = _int_env("FIMHOM_WORKERS", 1, minimum=1)

    max_gens = _int_env("FIMHOM_MAX_GENS", 3, minimum=1)
    max_rels = _int_env("FIMHOM_MAX_RELS", 3)
    max_terms = _int_env("FIMHOM_MAX_TERMS", 3, minimum=1)

    raw_report_dir = os.getenv("FIMHOM_REPORT_DIR")
    report_dir = Path(raw_report_dir).resolve() if raw_report_dir else None

    _settings = Settings(
        smax=smax,
        tree_smax=tree_smax,
        report_format=report_format.lower(),
        log_level=log_level,
        level_cap_margin=level_cap_margin,
        workers=workers,
        max_gens=max_gens,
        max_rels=max_rels,
        max_terms=max_terms,
        report_dir=report_dir,
    )

    _ensure_directories(_settings)
    return _settings


def reset_settings() -> None:
    """Forget the cached Settings so the next call re-reads the environment."""
    global _settings
    _settings = None


__all__ = ["Settings", "get_settings", "reset_settings"]
