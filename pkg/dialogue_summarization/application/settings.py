from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Mapping

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from dialogue_summarization.application.errors import ConfigError

# Pipeline settings using pydantic-settings for structured configuration


class SearchConfig(BaseModel):
    """Budget and gates for summary path extraction."""

    model_config = ConfigDict(frozen=True)

    k_paths: int = Field(100, ge=1)
    search_depth: int = Field(100, ge=1)
    min_tokens: int = Field(3, ge=0)
    require_verb: bool = True


class PipelineConfig(BaseSettings):
    # --- App ---
    debug: bool = False

    # --- Word graph ---
    edge_weight_mode: Literal["paper", "filippova"] = "paper"
    stopwords_path: Path | None = None  # DIALSUM_STOPWORDS_PATH
    # word<TAB>TAG table merged under the bundled lexicon (see build-lexicon)
    lexicon_path: Path | None = None

    # --- Topic segmentation ---
    segmentation: Literal["auto", "always", "off"] = "auto"
    segment_threshold_chars: int = Field(5000, gt=0)
    topics_p: int = Field(8, gt=0)
    segment_mode: Literal["top", "threshold"] = "top"
    # threshold mode only: boundary where cosine similarity drops below the cutoff
    segment_similarity_cutoff: float = Field(0.2, gt=0.0, le=1.0)

    # --- Path threshold / extraction ---
    threshold_scope: Literal["segment", "speaker"] = "segment"
    k_paths: int = Field(100, gt=0)
    search_depth: int = Field(100, gt=0)
    min_tokens: int = Field(3, ge=0)
    require_verb: bool = True

    # --- POV conversion ---
    pov_enabled: bool = True
    pov_keep_possessives: bool = False
    pov_rules_path: Path | None = None

    # --- System / evaluation ---
    baseline: Literal["graph", "lead3"] = "graph"
    # also rewrite baseline output (lead3) to reported speech
    baseline_pov: bool = False
    rouge_stemming: bool = False
    rouge_remove_stopwords: bool = False
    rouge_l_mode: Literal["summary", "union"] = "summary"

    # --- Batch ---
    jobs: int = Field(1, gt=0)

    # pydantic v2 / pydantic-settings configuration
    model_config = SettingsConfigDict(
        env_prefix="DIALSUM_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
        frozen=True,
    )

    @property
    def search(self) -> SearchConfig:
        return SearchConfig(
            k_paths=self.k_paths,
            search_depth=self.search_depth,
            min_tokens=self.min_tokens,
            require_verb=self.require_verb,
        )


@lru_cache
def get_config() -> PipelineConfig:
    """Cache the environment-only config so we don't re-parse .env on every document."""
    return PipelineConfig()


def load_config(path: Path | str | None = None, overrides: Mapping[str, Any] | None = None) -> PipelineConfig:
    """
    Build the effective config.

    Precedence: overrides (CLI flags) > config file > DIALSUM_* environment > defaults.
    The config file is a plain KEY=value file; keys are the field names (any case).
    """
    values: dict[str, Any] = {}

    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        raw = dotenv_values(path)
        known = set(PipelineConfig.model_fields)
        for key, value in raw.items():
            name = key.strip().lower()
            if name.startswith("dialsum_"):
                name = name[len("dialsum_"):]
            if name not in known:
                raise ConfigError(f"unknown config key '{key}' in {path}")
            if value is None or value == "":
                continue
            values[name] = value

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    try:
        return PipelineConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def dump_config(config: PipelineConfig, path: Path | str) -> Path:
    """Write the effective config as KEY=value lines that load_config reads back."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for name, value in config.model_dump().items():
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{name}={value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
