"""Locating bundled maps, shapes and figure presets"""
import os

from .constants import AVAILABLE_PRESETS

RESOURCE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'resources')


def get_resource_path(relative_path):
    """Absolute path of a file shipped inside swarm_app/resources"""
    return os.path.join(RESOURCE_DIR, relative_path)


def get_preset_path(name):
    """Scenario file of a figure preset, or None for an unknown name"""
    for preset_name, _, filename in AVAILABLE_PRESETS:
        if preset_name == name:
            return get_resource_path(os.path.join('presets', filename))
    return None


def preset_names():
    return [name for name, _, _ in AVAILABLE_PRESETS]
