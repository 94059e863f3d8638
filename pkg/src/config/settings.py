"""
Configuration Management for LightRig
Loads settings from YAML config file with environment variable substitution
"""

import copy
import os
import re
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

DEFAULT_CONFIG_FILE = 'config/lightrig.yaml'

DEFAULTS: Dict[str, Dict[str, Any]] = {
    'reprojection': {
        'samples': 1,
        'scale': 1.0,
        'filter': 'bilinear',
        'parallel': 1,
    },
    'tonemap': {
        'exposure': 0.0,
        'reinhard': None,
    },
    'depth': {
        'interpretation': 'z',
    },
    'rig': {
        'resolution': [2048, 2048],
        'fisheye_fov_deg': 180.0,
    },
    'nerf': {
        'aabb_scale': 1,
        'scenes': {},
    },
    'logging': {
        'level': 'INFO',
        'log_dir': 'logs',
        'file_logging': False,
        'rotation': 'daily',
        'retention_days': 30,
        'max_file_size_mb': 100,
    },
}

VALID_FILTERS = ('nearest', 'bilinear')
VALID_DEPTH_INTERPRETATIONS = ('z', 'raylen')


class ConfigError(Exception):
    """Configuration error"""
    pass


class Settings:
    """Application configuration manager"""

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize settings from config file

        An explicitly given file must exist. Without one, LIGHTRIG_CONFIG or
        config/lightrig.yaml is used when present, otherwise the built-in
        defaults apply.

        Args:
            config_file: Path to YAML config file
        """
        load_dotenv()

        explicit = config_file is not None
        if config_file is None:
            config_file = os.getenv('LIGHTRIG_CONFIG', DEFAULT_CONFIG_FILE)
            explicit = 'LIGHTRIG_CONFIG' in os.environ

        self.config_file: Optional[Path] = Path(config_file)
        if not self.config_file.exists():
            if explicit:
                raise ConfigError(f"Configuration file not found: {self.config_file}")
            self.config_file = None

        self._config = self._merge_defaults(self._load_config() if self.config_file else {})

        self.reprojection = self._config['reprojection']
        self.tonemap = self._config['tonemap']
        self.depth = self._config['depth']
        self.rig = self._config['rig']
        self.nerf = self._config['nerf']
        self.logging = self._config['logging']

        self._validate()

    def _load_config(self) -> Dict[str, Any]:
        """Load YAML config file with environment variable substitution"""
        with open(self.config_file, 'r', encoding='utf-8') as f:
            content = f.read()

        content = self._substitute_env_vars(content)

        try:
            config = yaml.safe_load(content)
        except yaml.YAMLError as e:
            raise ConfigError(f"Failed to parse config file: {e}")
        if config is None:
            raise ConfigError("Config file is empty")
        if not isinstance(config, dict):
            raise ConfigError("Config file must contain a mapping of sections")
        return config

    def _substitute_env_vars(self, content: str) -> str:
        """
        Replace ${VAR_NAME} with environment variable values

        Args:
            content: YAML content with ${VAR} placeholders

        Returns:
            Content with environment variables substituted
        """
        pattern = r'\$\{([^}]+)\}'

        def replace(match):
            var_name = match.group(1)
            value = os.getenv(var_name)
            if value is None:
                raise ConfigError(
                    f"Environment variable '{var_name}' not found. "
                    f"Please set it in .env file or environment."
                )
            return value

        return re.sub(pattern, replace, content)

    @staticmethod
    def _merge_defaults(config: Dict[str, Any]) -> Dict[str, Any]:
        """Overlay file sections on the built-in defaults"""
        merged = copy.deepcopy(DEFAULTS)
        for section, values in config.items():
            if section not in merged:
                raise ConfigError(f"Unknown config section: '{section}'")
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ConfigError(f"Config section '{section}' must be a mapping")
            merged[section].update(values)
        return merged

    def _validate(self):
        """Reject values the tools cannot run with"""
        filter_name = self.reprojection.get('filter')
        if filter_name not in VALID_FILTERS:
            raise ConfigError(
                f"Invalid reprojection.filter: {filter_name}. Must be one of {VALID_FILTERS}"
            )

        samples = self.reprojection.get('samples')
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
            raise ConfigError(f"reprojection.samples must be an integer >= 1, got {samples!r}")

        scale = self.reprojection.get('scale')
        if not isinstance(scale, (int, float)) or not 0 < scale <= 8:
            raise ConfigError(f"reprojection.scale must be in (0, 8], got {scale!r}")

        parallel = self.reprojection.get('parallel')
        if not isinstance(parallel, int) or isinstance(parallel, bool) or parallel < 1:
            raise ConfigError(f"reprojection.parallel must be an integer >= 1, got {parallel!r}")

        interpretation = self.depth.get('interpretation')
        if interpretation not in VALID_DEPTH_INTERPRETATIONS:
            raise ConfigError(
                f"Invalid depth.interpretation: {interpretation}. "
                f"Must be one of {VALID_DEPTH_INTERPRETATIONS}"
            )

        reinhard = self.tonemap.get('reinhard')
        if reinhard is not None and (not isinstance(reinhard, (int, float)) or reinhard <= 0):
            raise ConfigError(f"tonemap.reinhard must be a positive number, got {reinhard!r}")

        resolution = self.rig.get('resolution')
        if (not isinstance(resolution, list) or len(resolution) != 2
                or not all(isinstance(v, int) and v >= 1 for v in resolution)):
            raise ConfigError(f"rig.resolution must be [W, H] with W, H >= 1, got {resolution!r}")

        if not isinstance(self.nerf.get('scenes'), dict):
            raise ConfigError("nerf.scenes must be a mapping of scene name to overrides")

    @property
    def depth_interpretation(self) -> str:
        """How EXR depth planes are interpreted: 'z' or 'raylen'"""
        return self.depth['interpretation']

    def nerf_scene_override(self, scene: str) -> Dict[str, Any]:
        """
        Get explicit NeRF scale/offset overrides for a scene

        Args:
            scene: Scene name (e.g., 'lone_monk')

        Returns:
            Override mapping (may be empty)
        """
        return dict(self.nerf['scenes'].get(scene) or {})

    def __repr__(self) -> str:
        return f"Settings(config_file={self.config_file})"


def load_settings(config_file: Optional[str] = None) -> Settings:
    """
    Load settings for one command run

    Args:
        config_file: Path to config file

    Returns:
        New settings instance
    """
    return Settings(config_file)
