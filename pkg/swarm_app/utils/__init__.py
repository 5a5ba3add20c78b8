from .constants import *
from .log import setup_logging
from .resources import get_preset_path, get_resource_path, preset_names

__all__ = ['get_preset_path', 'get_resource_path', 'preset_names', 'setup_logging']
