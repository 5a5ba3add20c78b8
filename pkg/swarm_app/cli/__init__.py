from .main import build_parser, main
from .runner import run_scenario
from .scenario import Scenario, build_scenario, load_scenario, read_settings, write_scenario

__all__ = ['Scenario', 'build_parser', 'build_scenario', 'load_scenario', 'main', 'read_settings',
           'run_scenario', 'write_scenario']
