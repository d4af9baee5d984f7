import logging
import os
from typing import Any, Dict, Optional

import yaml
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from bbops.config_models import AppConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = ".bbops.yaml"


class BbopsSettings(BaseSettings):
    """
    Defaults and ``BBOPS_*`` environment variables. ``load_config`` layers a
    YAML file between the two.
    """

    model_config = SettingsConfigDict(
        env_prefix="BBOPS_", env_nested_delimiter="__", extra="ignore"
    )

    # BBOPS_THREADS; wins over the file
    threads: Optional[int] = Field(default=None, ge=1)
    app_config: AppConfig = Field(default_factory=AppConfig)

    def to_yaml(self) -> str:
        return self.app_config.to_yaml()

    @staticmethod
    def read_yaml(path: str) -> Dict[str, Any]:
        """Mapping stored in a YAML config file; an empty file gives ``{}``."""
        if not os.path.exists(path):
            raise FileNotFoundError(f"Configuration file not found at {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing YAML configuration file {path}: {e}")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ValueError(f"Configuration file {path} must hold a mapping")
        return data

    @classmethod
    def load_config(cls, config_path: Optional[str] = None) -> AppConfig:
        """
        Defaults and environment first, then the YAML file (explicit path or
        ``.bbops.yaml`` in the working directory), then ``BBOPS_THREADS``.
        """
        if config_path is None and os.path.exists(DEFAULT_CONFIG_FILE):
            config_path = DEFAULT_CONFIG_FILE
        file_data = cls.read_yaml(config_path) if config_path else {}
        if config_path:
            logger.debug("Loading configuration from %s", config_path)

        try:
            settings = cls()
            merged = merge_dicts(settings.app_config.model_dump(mode="json"), file_data)
            if settings.threads is not None:
                merged["threads"] = settings.threads
            return AppConfig.model_validate(merged)
        except ValidationError as e:
            raise ValueError(f"Configuration validation error: {e}")


def merge_dicts(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Copy of ``base`` with ``override`` merged in, recursing into nested mappings."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged
