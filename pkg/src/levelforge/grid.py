"""Tile grid model for 12x12 dungeon maps.

A map is a fixed-size grid of tiles.  Every tile kind except Wall is
passable.  Exactly one Entrance and one Exit make a map structurally
valid; a valid map is feasible when a 4-connected passable path joins
them.  All operations here are pure: editing returns a new map.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, NamedTuple

GRID_SIZE = 12
TOTAL_TILES = GRID_SIZE * GRID_SIZE


class TileKind(IntEnum):
    """Tile alphabet, in editor cycle order."""

    WALL = 0
    FLOOR = 1
    TREASURE = 2
    ENEMY = 3
    ENTRANCE = 4
    EXIT = 5


GLYPH_FOR: dict[TileKind, str] = {
    TileKind.WALL: "#",
    TileKind.FLOOR: ".",
    TileKind.TREASURE: "T",
    TileKind.ENEMY: "E",
    TileKind.ENTRANCE: "S",
    TileKind.EXIT: "X",
}
KIND_FOR: dict[str, TileKind] = {g: k for k, g in GLYPH_FOR.items()}

_KIND_COUNT = len(TileKind)


class Position(NamedTuple):
    row: int
    col: int


def in_bounds(row: int, col: int) -> bool:
    return 0 <= row < GRID_SIZE and 0 <= col < GRID_SIZE


def _index(row: int, col: int) -> int:
    return row * GRID_SIZE + col


# Flat-index 4-neighbourhoods, precomputed once; BFS and the mutation
# operator both lean on this table.
NEIGHBORS: tuple[tuple[int, ...], ...] = tuple(
    tuple(
        _index(r + dr, c + dc)
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
        if in_bounds(r + dr, c + dc)
    )
    for r in range(GRID_SIZE)
    for c in range(GRID_SIZE)
)


# ---------------------------------------------------------------------------
# errors


class MapError(ValueError):
    """Base class for map format and structure problems."""


class WrongDimensions(MapError):
    pass


class UnknownGlyph(MapError):
    pass


class StructureError(MapError):
    """A map whose Entrance or Exit count is not exactly one."""

    def __init__(self, kind: TileKind, count: int) -> None:
        self.kind = kind
        self.count = count
        super().__init__(f"expected exactly one {kind.name.lower()} tile, found {count}")


class OutOfBoundsError(MapError):
    pass


# ---------------------------------------------------------------------------
# the map itself


@dataclass(frozen=True)
class GridMap:
    """Immutable 12x12 tile grid, row-major."""

    tiles: tuple[TileKind, ...]

    def __post_init__(self) -> None:
        if len(self.tiles) != TOTAL_TILES:
            raise WrongDimensions(f"expected {TOTAL_TILES} tiles, got {len(self.tiles)}")

    def tile_at(self, row: int, col: int) -> TileKind:
        if not in_bounds(row, col):
            raise OutOfBoundsError(f"position ({row}, {col}) outside the grid")
        return self.tiles[row * GRID_SIZE + col]

    def positions_of(self, kind: TileKind) -> list[Position]:
        return [
            Position(i // GRID_SIZE, i % GRID_SIZE)
            for i, t in enumerate(self.tiles)
            if t is kind
        ]

    def count_of(self, kind: TileKind) -> int:
        return sum(1 for t in self.tiles if t is kind)

    def rows(self) -> Iterator[str]:
        for r in range(GRID_SIZE):
            base = r * GRID_SIZE
            yield "".join(GLYPH_FOR[t] for t in self.tiles[base : base + GRID_SIZE])


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    path_tiles: int | None


# ---------------------------------------------------------------------------
# parsing and serialization


def parse_map(text: str) -> GridMap:
    """Parse the 12-line glyph format.  Trailing newline is optional."""
    lines = text.splitlines()
    if len(lines) != GRID_SIZE:
        raise WrongDimensions(f"expected {GRID_SIZE} lines, got {len(lines)}")
    tiles: list[TileKind] = []
    for r, line in enumerate(lines):
        if len(line) != GRID_SIZE:
            raise WrongDimensions(
                f"line {r + 1}: expected {GRID_SIZE} characters, got {len(line)}"
            )
        for c, glyph in enumerate(line):
            kind = KIND_FOR.get(glyph)
            if kind is None:
                raise UnknownGlyph(f"line {r + 1}, column {c + 1}: unknown glyph {glyph!r}")
            tiles.append(kind)
    return GridMap(tuple(tiles))


def serialize_map(grid: GridMap) -> str:
    return "\n".join(grid.rows()) + "\n"


# ---------------------------------------------------------------------------
# structure and feasibility


def validate_structure(grid: GridMap) -> None:
    """Raise StructureError unless the map has exactly one Entrance and one Exit."""
    entrances = grid.count_of(TileKind.ENTRANCE)
    if entrances != 1:
        raise StructureError(TileKind.ENTRANCE, entrances)
    exits = grid.count_of(TileKind.EXIT)
    if exits != 1:
        raise StructureError(TileKind.EXIT, exits)


def is_structurally_valid(grid: GridMap) -> bool:
    try:
        validate_structure(grid)
    except StructureError:
        return False
    return True


def entrance_of(grid: GridMap) -> Position:
    positions = grid.positions_of(TileKind.ENTRANCE)
    if len(positions) != 1:
        raise StructureError(TileKind.ENTRANCE, len(positions))
    return positions[0]


def exit_of(grid: GridMap) -> Position:
    positions = grid.positions_of(TileKind.EXIT)
    if len(positions) != 1:
        raise StructureError(TileKind.EXIT, len(positions))
    return positions[0]


def feasibility(grid: GridMap) -> FeasibilityReport:
    """BFS from the Entrance over passable tiles.

    path_tiles counts tiles on a shortest path including both endpoints,
    so adjacent Entrance/Exit give 2.  Infeasible maps report None.
    """
    validate_structure(grid)
    tiles = grid.tiles
    start = grid.tiles.index(TileKind.ENTRANCE)
    goal = grid.tiles.index(TileKind.EXIT)
    dist = [-1] * TOTAL_TILES
    dist[start] = 0
    queue = deque((start,))
    wall = TileKind.WALL
    while queue:
        i = queue.popleft()
        if i == goal:
            return FeasibilityReport(True, dist[i] + 1)
        d = dist[i] + 1
        for j in NEIGHBORS[i]:
            if dist[j] < 0 and tiles[j] is not wall:
                dist[j] = d
                queue.append(j)
    return FeasibilityReport(False, None)


# ---------------------------------------------------------------------------
# editing


def cycle_tile(grid: GridMap, row: int, col: int) -> GridMap:
    """Advance one tile through the editor cycle, returning a new map."""
    if not in_bounds(row, col):
        raise OutOfBoundsError(f"position ({row}, {col}) outside the grid")
    i = row * GRID_SIZE + col
    tiles = list(grid.tiles)
    tiles[i] = TileKind((tiles[i] + 1) % _KIND_COUNT)
    return GridMap(tuple(tiles))


def edit_distance(a: GridMap, b: GridMap) -> int:
    """Number of positions whose tiles differ."""
    return sum(1 for x, y in zip(a.tiles, b.tiles) if x is not y)


# ---------------------------------------------------------------------------
# random maps

_WALL_P = 0.35
_FLOOR_P = 0.45
_TREASURE_P = 0.10


def random_map(rng: random.Random) -> GridMap:
    """Draw a structurally valid random map.

    Entrance and Exit land on two distinct uniform cells; every other
    cell is independently Wall 0.35 / Floor 0.45 / Treasure 0.10 /
    Enemy 0.10.  Fully determined by the generator state.
    """
    entrance, exit_ = rng.sample(range(TOTAL_TILES), 2)
    tiles: list[TileKind] = [TileKind.FLOOR] * TOTAL_TILES
    for i in range(TOTAL_TILES):
        if i == entrance or i == exit_:
            continue
        roll = rng.random()
        if roll < _WALL_P:
            tiles[i] = TileKind.WALL
        elif roll < _WALL_P + _FLOOR_P:
            tiles[i] = TileKind.FLOOR
        elif roll < _WALL_P + _FLOOR_P + _TREASURE_P:
            tiles[i] = TileKind.TREASURE
        else:
            tiles[i] = TileKind.ENEMY
    tiles[entrance] = TileKind.ENTRANCE
    tiles[exit_] = TileKind.EXIT
    return GridMap(tuple(tiles))
