"""Exception hierarchy shared across the package."""


class SubradianceError(Exception):
    """Base class for all package errors."""


class DomainError(SubradianceError, ValueError):
    """A physical input is outside its allowed domain (non-positive, inconsistent)."""


class RegimeError(SubradianceError, ValueError):
    """A hard validity-regime violation (e.g. time step too coarse, pulse too short)."""


class GridError(SubradianceError, ValueError):
    """Time grids of two objects do not match, or a grid is malformed."""


class PlanError(SubradianceError, ValueError):
    """A pulse plan is malformed or incompatible with the requested operation."""


class ConfigError(SubradianceError, ValueError):
    """A CLI/scenario configuration document is invalid."""
