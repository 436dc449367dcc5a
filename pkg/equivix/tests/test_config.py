# equivix/tests/test_config.py
"""Tests for the layered settings."""

import pytest
from pydantic import ValidationError

from equivix.config import DEFAULTS_FILE, Settings, settings


def test_checked_in_defaults_are_loaded():
    assert DEFAULTS_FILE.exists()
    assert settings.QUAD_NODES == 10
    assert settings.HERMITE_QUAD_MAX == 300


def test_environment_overrides_defaults(monkeypatch):
    monkeypatch.setenv("EQUIVIX_HERMITE_N", "24")
    assert Settings().HERMITE_N == 24


def test_keyword_arguments_win(monkeypatch):
    monkeypatch.setenv("EQUIVIX_SEED", "7")
    assert Settings(SEED=11).SEED == 11


def test_invalid_values_are_rejected():
    with pytest.raises(ValidationError):
        Settings(QUAD_NODES=4)
    with pytest.raises(ValidationError):
        Settings(QUAD_MAP="sinh")


def test_defaults_snapshot_is_numeric_only():
    snapshot = settings.defaults_snapshot()
    assert "LOG_LEVEL" not in snapshot
    assert snapshot["QUAD_REL_TOL"] == settings.QUAD_REL_TOL
