"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class LbcvError(Exception):
    """Base class for every error raised by lbcv."""


class DomainError(LbcvError, ValueError):
    """A point lies outside D, or a jet denominator vanishes."""


class PreconditionError(LbcvError, ValueError):
    """An operation was called with arguments its precondition excludes."""


class WrongCaseError(PreconditionError):
    """A soliton family was asked for on parameters outside its case."""


class ConfigError(LbcvError, ValueError):
    """A run configuration value is invalid."""


class ConventionError(LbcvError, RuntimeError):
    """The curvature convention self-test disagrees with the closed forms."""
