"""Check registry for automatic discovery of acceptance checks.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import importlib
import inspect
import logging
from pathlib import Path

from .base import BaseCheck

logger = logging.getLogger(__name__)


def snake_case(name):
    """Convert a CamelCase class name to a registry key."""
    return "".join(["_" + c.lower() if c.isupper() else c for c in name]).lstrip("_")


def discover_checks():
    """Discover all checks in the checks directory."""
    found = {}
    checks_dir = Path(__file__).parent

    for file_path in sorted(checks_dir.glob("*.py")):
        if file_path.name in ["__init__.py", "base.py", "registry.py"]:
            continue

        module_name = f"checks.{file_path.stem}"
        try:
            module = importlib.import_module(module_name)
        except ImportError as e:
            logger.warning("Could not import %s: %s", module_name, e)
            continue

        for name, obj in inspect.getmembers(module):
            if inspect.isclass(obj) and issubclass(obj, BaseCheck) and obj != BaseCheck:
                found[snake_case(name)] = obj

    return found


# Global registry of available checks
checks = discover_checks()
