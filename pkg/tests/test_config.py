import pytest

from fimhom.config import get_settings, reset_settings


def test_defaults():
    settings = get_settings()
    assert settings.smax == 2
    assert settings.tree_smax == 1
    assert settings.is_text_format
    assert settings.log_level == "WARNING"
    assert settings.workers == 1
    assert settings.report_dir is None
    assert get_settings() is settings


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("FIMHOM_SMAX", "4")
    monkeypatch.setenv("FIMHOM_FORMAT", "JSON")
    monkeypatch.setenv("FIMHOM_LOG_LEVEL", "debug")
    monkeypatch.setenv("FIMHOM_REPORT_DIR", str(tmp_path / "reports"))
    reset_settings()

    settings = get_settings()
    assert settings.smax == 4
    assert settings.is_json_format
    assert settings.log_level == "DEBUG"
    assert settings.report_dir.is_dir()


@pytest.mark.parametrize(
    "name, value, message",
    [
        ("FIMHOM_SMAX", "two", "must be an integer"),
        ("FIMHOM_WORKERS", "0", "must be >= 1"),
        ("FIMHOM_FORMAT", "yaml", "must be 'text' or 'json'"),
    ],
)
def test_invalid_environment(monkeypatch, name, value, message):
    monkeypatch.setenv(name, value)
    reset_settings()
    with pytest.raises(ValueError, match=message):
        get_settings()


def test_level_cap_for(monkeypatch):
    assert get_settings().level_cap_for(3, 2) == 7
    monkeypatch.setenv("FIMHOM_LEVEL_CAP_MARGIN", "0")
    reset_settings()
    assert get_settings().level_cap_for(-1, 1) == 0
