"""Mixed-initiative dungeon level design toolkit."""

__version__ = "0.1.0"
