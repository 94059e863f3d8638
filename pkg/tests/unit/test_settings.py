"""
Unit tests for configuration management
"""

import pytest

from src.config.settings import ConfigError, Settings, load_settings


def _write(tmp_path, text):
    path = tmp_path / 'config.yaml'
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestSettings:
    """Test loading and validating settings"""

    def test_file_values(self, test_settings):
        """Test file values override defaults"""
        assert test_settings.reprojection['samples'] == 2
        assert test_settings.reprojection['filter'] == 'nearest'
        assert test_settings.tonemap['reinhard'] == 5.0
        assert test_settings.depth_interpretation == 'raylen'

    def test_defaults_fill_missing_keys(self, test_settings):
        """Test sections missing from the file keep their defaults"""
        assert test_settings.rig['resolution'] == [2048, 2048]
        assert test_settings.nerf['aabb_scale'] == 1
        assert test_settings.logging['file_logging'] is False

    def test_scene_override(self, test_settings):
        """Test per-scene NeRF overrides"""
        assert test_settings.nerf_scene_override('lone_monk') == {'scale': 0.1, 'offset': [0.5, 0.5, 0.3]}
        assert test_settings.nerf_scene_override('zen_garden') == {}

    def test_builtin_defaults(self, tmp_path, monkeypatch):
        """Test no config file falls back to the built-in defaults"""
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv('LIGHTRIG_CONFIG', raising=False)

        settings = Settings()

        assert settings.config_file is None
        assert settings.reprojection['samples'] == 1
        assert settings.depth_interpretation == 'z'

    def test_explicit_missing_file(self, tmp_path):
        """Test a named config file must exist"""
        with pytest.raises(ConfigError):
            Settings(str(tmp_path / 'missing.yaml'))

    def test_env_config_path(self, tmp_path, monkeypatch):
        """Test LIGHTRIG_CONFIG selects the file"""
        path = _write(tmp_path, "reprojection:\n  samples: 4\n")
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv('LIGHTRIG_CONFIG', path)

        assert Settings().reprojection['samples'] == 4

    def test_env_substitution(self, tmp_path, monkeypatch):
        """Test ${VAR} placeholders are substituted"""
        monkeypatch.setenv('LIGHTRIG_TEST_LOG_DIR', '/var/log/lightrig')
        path = _write(tmp_path, "logging:\n  log_dir: ${LIGHTRIG_TEST_LOG_DIR}\n")

        assert Settings(path).logging['log_dir'] == '/var/log/lightrig'

    def test_missing_env_var(self, tmp_path, monkeypatch):
        """Test unset placeholders are errors"""
        monkeypatch.delenv('LIGHTRIG_TEST_UNSET', raising=False)
        path = _write(tmp_path, "logging:\n  log_dir: ${LIGHTRIG_TEST_UNSET}\n")

        with pytest.raises(ConfigError) as exc_info:
            Settings(path)

        assert 'LIGHTRIG_TEST_UNSET' in str(exc_info.value)

    @pytest.mark.parametrize('text', [
        "reprojection:\n  filter: bicubic\n",
        "reprojection:\n  samples: 0\n",
        "reprojection:\n  scale: 0\n",
        "reprojection:\n  parallel: 0\n",
        "depth:\n  interpretation: disparity\n",
        "tonemap:\n  reinhard: -1\n",
        "rig:\n  resolution: [0, 10]\n",
        "proxy:\n  port: 3307\n",
        "reprojection: fast\n",
        "",
        "reprojection: [\n",
    ])
    def test_invalid_values(self, tmp_path, text):
        """Test invalid settings are rejected at load"""
        with pytest.raises(ConfigError):
            Settings(_write(tmp_path, text))

    def test_load_settings_fresh(self, tmp_path):
        """Test each load reads the file again"""
        path = _write(tmp_path, "reprojection:\n  samples: 3\n")
        first = load_settings(path)

        _write(tmp_path, "reprojection:\n  samples: 5\n")
        second = load_settings(path)

        assert first is not second
        assert (first.reprojection['samples'], second.reprojection['samples']) == (3, 5)
