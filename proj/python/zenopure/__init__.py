"""Purification by repeated confirmation of a probe system."""

from ._zenopure import *  # noqa: F401,F403
