"""Command-line front end: session scripts, reports, caching and replay."""

from .script import SessionScript, parse_script

__all__ = ["SessionScript", "parse_script"]
