"""Base class for acceptance checks.

Copyright (c) 2025 Konrad Rieck. MIT License
"""


class BaseCheck:
    """Base class for acceptance checks."""

    def __init__(self, **params):
        # Initialize check with parameters
        self.params = params
        self.cases = 0
        self.failures = []

    def run(self):
        # Override in subclasses and return the failure records
        raise NotImplementedError("Subclasses must implement run")

    def fail(self, **record):
        self.failures.append(record)

    @classmethod
    def get_param_grid(cls):
        # Override in subclasses to define parameter grid
        return {}
