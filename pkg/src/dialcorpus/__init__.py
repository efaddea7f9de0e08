"""Parallel dialogue corpus construction from screenplays and bilingual subtitles."""

__version__ = "0.1.0"
