import os

import pytest

from dialogue_summarization.application.errors import ConfigError
from dialogue_summarization.application.settings import (
    PipelineConfig,
    SearchConfig,
    dump_config,
    get_config,
    load_config,
)


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    # no stray .env or DIALSUM_* variables
    monkeypatch.chdir(tmp_path)
    for name in list(os.environ):
        if name.upper().startswith("DIALSUM_"):
            monkeypatch.delenv(name)


def test_defaults():
    cfg = load_config()
    assert cfg.edge_weight_mode == "paper"
    assert cfg.segment_threshold_chars == 5000
    assert cfg.topics_p == 8
    assert cfg.pov_enabled and cfg.require_verb
    assert cfg.search == SearchConfig(k_paths=100, search_depth=100, min_tokens=3, require_verb=True)


def test_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("DIALSUM_TOPICS_P", "5")
    monkeypatch.setenv("DIALSUM_K_PATHS", "20")
    path = tmp_path / "run.env"
    path.write_text("topics_p=6\n", encoding="utf-8")

    assert load_config().topics_p == 5
    from_file = load_config(path)
    assert from_file.topics_p == 6
    assert from_file.k_paths == 20
    assert load_config(path, {"topics_p": 7}).topics_p == 7
    # None means "flag not given"
    assert load_config(path, {"topics_p": None}).topics_p == 6


def test_file_keys_accept_prefix_and_any_case(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("DIALSUM_TOPICS_P=4\nEdge_Weight_Mode=filippova\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.topics_p == 4
    assert cfg.edge_weight_mode == "filippova"


def test_unknown_key(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("topics=4\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown config key 'topics'"):
        load_config(path)


@pytest.mark.parametrize("line", ["topics_p=0", "edge_weight_mode=cosine", "segment_similarity_cutoff=1.5"])
def test_invalid_values(tmp_path, line):
    path = tmp_path / "run.env"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid configuration"):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.env")


def test_dump_then_load_is_identity(tmp_path):
    cfg = load_config(overrides={"topics_p": 3, "pov_enabled": False, "rouge_l_mode": "union", "jobs": 2})
    path = dump_config(cfg, tmp_path / "echo" / "effective_config.env")
    text = path.read_text(encoding="utf-8")
    assert "pov_enabled=false" in text
    assert "stopwords_path" not in text
    assert load_config(path) == cfg


def test_get_config_is_cached():
    assert get_config() is get_config()
    assert isinstance(get_config(), PipelineConfig)
