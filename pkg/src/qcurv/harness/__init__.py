"""
Harness
-------

Run configuration and the reproducible experiments driven from the command line.
"""
from .commands import command_registry, exit_status, run_command
from .config import RunConfig, parse_config, read_config
