import os
from typing import Optional

from config import Config
from errors import ConfigError
from .local import LocalStorage


def get_storage(output_dir: Optional[str] = None):
    """Get the configured storage backend"""
    storage_type = os.getenv('STORAGE_TYPE', Config.STORAGE_TYPE)

    if storage_type == 'local':
        return LocalStorage(output_dir or Config.OUTPUT_DIR)
    else:
        raise ConfigError(f"Unknown storage type: {storage_type}")
