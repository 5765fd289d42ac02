"""
Tests for library defaults and run configuration.
"""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from dgsmkit.config import DEFAULT_SEED, DgsmConfig, RunConfig, get_config, parse_params, parse_range


@pytest.fixture(autouse=True)
def clear_config():
    """Clear the cached config singleton before each test."""
    import dgsmkit.config
    dgsmkit.config._config = None
    yield
    dgsmkit.config._config = None


class TestDgsmConfig:
    """Tests for DgsmConfig."""

    def test_defaults(self, monkeypatch):
        """Test the documented defaults."""
        for name in ("DGSM_SEED", "DGSM_N", "DGSM_K", "DGSM_M_MIN", "DGSM_M_MAX"):
            monkeypatch.delenv(name, raising=False)
        config = DgsmConfig()
        assert config.seed == DEFAULT_SEED
        assert config.n == 16384
        assert config.k == 25
        assert config.m_range == (0.1, 100.0)
        assert config.fd_scheme == "central"

    def test_environment_override(self, monkeypatch):
        """Test DGSM_ environment variables."""
        monkeypatch.setenv("DGSM_N", "1024")
        monkeypatch.setenv("DGSM_FD_SCHEME", "forward")
        config = get_config()
        assert config.n == 1024
        assert config.fd_scheme == "forward"
        assert get_config() is config

    def test_output_dir(self, tmp_path, monkeypatch):
        """Test that DGSM_OUTPUT_DIR becomes a Path, defaulting to the working directory."""
        monkeypatch.delenv("DGSM_OUTPUT_DIR", raising=False)
        monkeypatch.chdir(tmp_path)
        assert DgsmConfig().output_dir.resolve() == tmp_path.resolve()
        monkeypatch.setenv("DGSM_OUTPUT_DIR", str(tmp_path / "reports"))
        assert DgsmConfig().output_dir == Path(tmp_path / "reports")

    def test_invalid_m_range(self, monkeypatch):
        """Test that m_min must be below m_max."""
        monkeypatch.setenv("DGSM_M_MIN", "10")
        monkeypatch.setenv("DGSM_M_MAX", "1")
        with pytest.raises(ValidationError):
            DgsmConfig()


class TestParsing:
    """Tests for --params and range parsing."""

    def test_inline_json(self):
        """Test inline JSON parameters."""
        assert parse_params('{"a": [0, 1]}') == {"a": [0, 1]}
        assert parse_params(None) == {}

    def test_json_file(self, tmp_path):
        """Test @file.json parameters."""
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"c": [1.0]}))
        assert parse_params(f"@{path}") == {"c": [1.0]}

    def test_yaml_file(self, tmp_path):
        """Test @file.yml parameters."""
        path = tmp_path / "p.yml"
        path.write_text("a:\n  - 0\n  - 9\n")
        assert parse_params(f"@{path}") == {"a": [0, 9]}

    def test_invalid(self, tmp_path):
        """Test malformed and missing parameter sources."""
        with pytest.raises(ValueError):
            parse_params("[1, 2]")
        with pytest.raises(ValueError):
            parse_params("{oops")
        with pytest.raises(ValueError):
            parse_params(f"@{tmp_path / 'missing.json'}")

    def test_parse_range(self):
        """Test lo:hi parsing."""
        assert parse_range("0.5:20") == (0.5, 20.0)
        assert parse_range("256:16384", int) == (256, 16384)
        with pytest.raises(ValueError):
            parse_range("1:2:3")


class TestRunConfig:
    """Tests for RunConfig validation."""

    def test_n_values(self):
        """Test the powers of two inside the grid."""
        run = RunConfig(function="g-function", n_grid=(256, 16384))
        assert run.n_values() == [256, 512, 1024, 2048, 4096, 8192, 16384]
        assert RunConfig(function="g-function", n_grid=(100, 300)).n_values() == [128, 256]

    def test_normal_needs_sigmas(self):
        """Test that Normal inputs need sigmas."""
        with pytest.raises(ValidationError):
            RunConfig(function="linear", dist="normal")

    def test_positive_sigmas(self):
        """Test that sigmas must be positive."""
        with pytest.raises(ValidationError):
            RunConfig(function="linear", dist="normal", sigmas=[1.0, 0.0])

    def test_means_match_sigmas(self):
        """Test that means and sigmas have equal lengths."""
        with pytest.raises(ValidationError):
            RunConfig(function="linear", dist="normal", sigmas=[1.0], means=[0.0, 1.0])

    def test_seed_range(self):
        """Test that seeds are unsigned 64-bit integers."""
        with pytest.raises(ValidationError):
            RunConfig(function="linear", seed=-1)
        assert RunConfig(function="linear", seed=2**64 - 1).seed == 2**64 - 1
