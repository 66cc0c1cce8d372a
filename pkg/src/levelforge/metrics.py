"""Map descriptors: the 31-component metric vector.

Components, in order:

  M1       shortest Entrance-to-Exit path length, in tiles / 144
  M2       wall tiles / non-wall tiles
  M3-M6    corridor count, max, min and mean length (tiles)
  M7-M10   chamber count, max, min and mean bounding-box area
  M11-M13  chamber max, min and mean squareness (area / short side squared)
  M14      dead passable tiles / 144
  M15,M16  clear window around the Entrance, free of enemies / treasures
  M17,M18  enemy and treasure tile fractions
  M19,M20  treasure safety mean and population standard deviation
  M21-M26  per-kind left/right and top/bottom balance (wall, enemy, treasure)
  M27,M28  treasure-versus-enemy cross balance (left/right, top/bottom)
  M29-M31  exact mirror match fractions (left/right, top/bottom, transpose)

Statistics over an empty set (no corridors, no chambers, no treasures)
are zero so that every component is always finite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .grid import (
    GRID_SIZE,
    NEIGHBORS,
    TOTAL_TILES,
    FeasibilityReport,
    GridMap,
    Position,
    TileKind,
    entrance_of,
    validate_structure,
)

METRIC_COUNT = 31
METRIC_NAMES: tuple[str, ...] = tuple(f"M{i}" for i in range(1, METRIC_COUNT + 1))

MetricVector = tuple[float, ...]


class InfeasibleMapError(ValueError):
    """No Entrance-to-Exit path: the path-length component is undefined."""


_HALF = GRID_SIZE // 2
_LAST = GRID_SIZE - 1

# Mirror lookup tables, flat index to flat index.
_LR_MIRROR = tuple(r * GRID_SIZE + (_LAST - c) for r in range(GRID_SIZE) for c in range(GRID_SIZE))
_TB_MIRROR = tuple((_LAST - r) * GRID_SIZE + c for r in range(GRID_SIZE) for c in range(GRID_SIZE))
_TRANSPOSE = tuple(c * GRID_SIZE + r for r in range(GRID_SIZE) for c in range(GRID_SIZE))


# ---------------------------------------------------------------------------
# corridor / chamber / dead segmentation


@dataclass(frozen=True)
class Corridor:
    cells: tuple[Position, ...]

    @property
    def length(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class Chamber:
    cells: tuple[Position, ...]
    height: int
    width: int

    @property
    def area(self) -> int:
        return self.height * self.width

    @property
    def squareness(self) -> float:
        short = min(self.height, self.width)
        return self.area / (short * short)


@dataclass(frozen=True)
class Segmentation:
    corridors: tuple[Corridor, ...]
    chambers: tuple[Chamber, ...]
    dead: tuple[Position, ...]


def _segment_flat(
    passable: list[bool],
) -> tuple[list[list[int]], list[tuple[list[int], int, int]], list[int]]:
    """Partition passable cells into corridors, chambers and dead cells.

    A horizontal corridor is a maximal horizontal run of passable cells
    each blocked (wall or border) directly above and below; vertical
    corridors are symmetric.  A cell blocked both ways is a single
    length-1 corridor, never two.  Remaining passable cells form
    4-connected components; a component is a chamber when it contains a
    fully passable 2x2 block, otherwise its cells are dead.  Chambers
    carry their bounding-box height and width.
    """
    n = GRID_SIZE
    h_run = [False] * TOTAL_TILES  # blocked above and below
    v_run = [False] * TOTAL_TILES  # blocked left and right
    for i in range(TOTAL_TILES):
        if not passable[i]:
            continue
        r, c = divmod(i, n)
        h_run[i] = (r == 0 or not passable[i - n]) and (r == _LAST or not passable[i + n])
        v_run[i] = (c == 0 or not passable[i - 1]) and (c == _LAST or not passable[i + 1])

    corridors: list[list[int]] = []
    in_corridor = [False] * TOTAL_TILES
    for r in range(n):
        c = 0
        while c < n:
            if h_run[r * n + c]:
                start = c
                while c < n and h_run[r * n + c]:
                    c += 1
                cells = [r * n + x for x in range(start, c)]
                corridors.append(cells)
                for i in cells:
                    in_corridor[i] = True
            else:
                c += 1
    for c in range(n):
        r = 0
        while r < n:
            if v_run[r * n + c]:
                start = r
                while r < n and v_run[r * n + c]:
                    r += 1
                cells = [x * n + c for x in range(start, r)]
                # a both-ways-blocked cell already counted horizontally
                if not (len(cells) == 1 and h_run[cells[0]]):
                    corridors.append(cells)
                    for i in cells:
                        in_corridor[i] = True
            else:
                r += 1

    chambers: list[tuple[list[int], int, int]] = []
    dead: list[int] = []
    seen = [False] * TOTAL_TILES
    for i in range(TOTAL_TILES):
        if not passable[i] or in_corridor[i] or seen[i]:
            continue
        seen[i] = True
        stack = [i]
        cells: list[int] = []
        rmin = rmax = i // n
        cmin = cmax = i % n
        is_chamber = False
        while stack:
            j = stack.pop()
            cells.append(j)
            r, c = divmod(j, n)
            if r < rmin:
                rmin = r
            elif r > rmax:
                rmax = r
            if c < cmin:
                cmin = c
            elif c > cmax:
                cmax = c
            if (
                not is_chamber
                and r < _LAST
                and c < _LAST
                and passable[j + 1]
                and passable[j + n]
                and passable[j + n + 1]
            ):
                is_chamber = True
            for k in NEIGHBORS[j]:
                if passable[k] and not in_corridor[k] and not seen[k]:
                    seen[k] = True
                    stack.append(k)
        if is_chamber:
            chambers.append((cells, rmax - rmin + 1, cmax - cmin + 1))
        else:
            dead.extend(cells)
    return corridors, chambers, dead


def segment(grid: GridMap) -> Segmentation:
    validate_structure(grid)
    passable = [t is not TileKind.WALL for t in grid.tiles]
    corridors, chambers, dead = _segment_flat(passable)

    def pos(i: int) -> Position:
        return Position(i // GRID_SIZE, i % GRID_SIZE)

    return Segmentation(
        corridors=tuple(Corridor(tuple(pos(i) for i in cells)) for cells in corridors),
        chambers=tuple(
            Chamber(tuple(pos(i) for i in sorted(cells)), h, w) for cells, h, w in chambers
        ),
        dead=tuple(pos(i) for i in sorted(dead)),
    )


# ---------------------------------------------------------------------------
# entrance windows and treasure safety


def _chebyshev_clear_fraction(tiles: tuple[TileKind, ...], entrance: int, kind: TileKind) -> float:
    er, ec = divmod(entrance, GRID_SIZE)
    nearest = TOTAL_TILES  # farther than any real tile
    for i, t in enumerate(tiles):
        if t is kind:
            r, c = divmod(i, GRID_SIZE)
            d = max(abs(r - er), abs(c - ec))
            if d < nearest:
                nearest = d
    if nearest == TOTAL_TILES:
        return 1.0
    radius = nearest - 1
    height = min(_LAST, er + radius) - max(0, er - radius) + 1
    width = min(_LAST, ec + radius) - max(0, ec - radius) + 1
    return height * width / TOTAL_TILES


def entrance_clear_fraction(grid: GridMap, kind: TileKind) -> float:
    """Clipped area of the largest kind-free square window on the Entrance, / 144."""
    entrance = entrance_of(grid)
    return _chebyshev_clear_fraction(grid.tiles, entrance.row * GRID_SIZE + entrance.col, kind)


def _bfs_distances(tiles: tuple[TileKind, ...], sources: list[int]) -> list[int]:
    """Step distances over passable tiles from the nearest source; -1 unreachable."""
    dist = [-1] * TOTAL_TILES
    queue = deque()
    for s in sources:
        dist[s] = 0
        queue.append(s)
    wall = TileKind.WALL
    while queue:
        i = queue.popleft()
        d = dist[i] + 1
        for j in NEIGHBORS[i]:
            if dist[j] < 0 and tiles[j] is not wall:
                dist[j] = d
                queue.append(j)
    return dist


def _safety_stats(
    tiles: tuple[TileKind, ...],
    treasures: list[int],
    enemies: list[int],
    dist_from_entrance: list[int],
) -> tuple[float, float]:
    if not treasures:
        return 0.0, 0.0
    dist_from_enemies = _bfs_distances(tiles, enemies) if enemies else None
    values: list[float] = []
    for t in treasures:
        d_e = dist_from_entrance[t]
        if d_e < 0:
            values.append(0.0)
            continue
        if dist_from_enemies is None:
            values.append(1.0)
            continue
        d_n = dist_from_enemies[t]
        if d_n < 0:
            # enemies exist but none can reach this treasure
            values.append(1.0)
            continue
        s = (d_n - d_e) / (d_n + d_e)
        values.append(max(-1.0, min(1.0, s)))
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, var**0.5


def treasure_safety(grid: GridMap) -> tuple[float, float]:
    """Mean and population sd of per-treasure safety.

    Safety compares the treasure's step distance from the nearest enemy
    against its distance from the Entrance: (d_n - d_e) / (d_n + d_e),
    clamped to [-1, 1].  No enemies reachable means 1, a treasure the
    Entrance cannot reach scores 0, and no treasures at all give (0, 0).
    """
    tiles = grid.tiles
    entrance = entrance_of(grid)
    treasures = [i for i, t in enumerate(tiles) if t is TileKind.TREASURE]
    enemies = [i for i, t in enumerate(tiles) if t is TileKind.ENEMY]
    dist = _bfs_distances(tiles, [entrance.row * GRID_SIZE + entrance.col])
    return _safety_stats(tiles, treasures, enemies, dist)


# ---------------------------------------------------------------------------
# the full vector


def analyze(grid: GridMap) -> tuple[FeasibilityReport, MetricVector]:
    """Feasibility plus the metric vector in one pass.

    For infeasible maps M1 is a zero placeholder; rankings ignore it.
    """
    validate_structure(grid)
    tiles = grid.tiles
    wall = TileKind.WALL

    walls = enemies_n = treasures_n = 0
    walls_left = walls_top = 0
    enemies_left = enemies_top = 0
    treasures_left = treasures_top = 0
    treasures: list[int] = []
    enemies: list[int] = []
    entrance = exit_ = -1
    passable = [True] * TOTAL_TILES
    for i, t in enumerate(tiles):
        if t is wall:
            passable[i] = False
            walls += 1
            if i % GRID_SIZE < _HALF:
                walls_left += 1
            if i < _HALF * GRID_SIZE:
                walls_top += 1
        elif t is TileKind.ENEMY:
            enemies.append(i)
            enemies_n += 1
            if i % GRID_SIZE < _HALF:
                enemies_left += 1
            if i < _HALF * GRID_SIZE:
                enemies_top += 1
        elif t is TileKind.TREASURE:
            treasures.append(i)
            treasures_n += 1
            if i % GRID_SIZE < _HALF:
                treasures_left += 1
            if i < _HALF * GRID_SIZE:
                treasures_top += 1
        elif t is TileKind.ENTRANCE:
            entrance = i
        elif t is TileKind.EXIT:
            exit_ = i

    dist = _bfs_distances(tiles, [entrance])
    steps_to_exit = dist[exit_]
    if steps_to_exit >= 0:
        report = FeasibilityReport(True, steps_to_exit + 1)
        m1 = report.path_tiles / TOTAL_TILES
    else:
        report = FeasibilityReport(False, None)
        m1 = 0.0

    m2 = walls / (TOTAL_TILES - walls)

    corridors, chambers, dead = _segment_flat(passable)
    lengths = [len(c) for c in corridors]
    if lengths:
        m3 = float(len(lengths))
        m4 = float(max(lengths))
        m5 = float(min(lengths))
        m6 = sum(lengths) / len(lengths)
    else:
        m3 = m4 = m5 = m6 = 0.0
    if chambers:
        areas = [h * w for _, h, w in chambers]
        squares = [h * w / (min(h, w) ** 2) for _, h, w in chambers]
        m7 = float(len(chambers))
        m8 = float(max(areas))
        m9 = float(min(areas))
        m10 = sum(areas) / len(areas)
        m11 = max(squares)
        m12 = min(squares)
        m13 = sum(squares) / len(squares)
    else:
        m7 = m8 = m9 = m10 = m11 = m12 = m13 = 0.0
    m14 = len(dead) / TOTAL_TILES

    m15 = _chebyshev_clear_fraction(tiles, entrance, TileKind.ENEMY)
    m16 = _chebyshev_clear_fraction(tiles, entrance, TileKind.TREASURE)
    m17 = enemies_n / TOTAL_TILES
    m18 = treasures_n / TOTAL_TILES
    m19, m20 = _safety_stats(tiles, treasures, enemies, dist)

    def balance(left: int, total: int) -> float:
        return abs(2 * left - total) / total if total else 0.0

    m21 = balance(walls_left, walls)
    m22 = balance(walls_top, walls)
    m23 = balance(enemies_left, enemies_n)
    m24 = balance(enemies_top, enemies_n)
    m25 = balance(treasures_left, treasures_n)
    m26 = balance(treasures_top, treasures_n)
    cross = treasures_n + enemies_n
    enemies_right = enemies_n - enemies_left
    enemies_bottom = enemies_n - enemies_top
    m27 = abs(treasures_left - enemies_right) / cross if cross else 0.0
    m28 = abs(treasures_top - enemies_bottom) / cross if cross else 0.0

    lr = tb = tr = 0
    for i in range(TOTAL_TILES):
        t = tiles[i]
        if t is tiles[_LR_MIRROR[i]]:
            lr += 1
        if t is tiles[_TB_MIRROR[i]]:
            tb += 1
        if t is tiles[_TRANSPOSE[i]]:
            tr += 1
    m29 = lr / TOTAL_TILES
    m30 = tb / TOTAL_TILES
    m31 = tr / TOTAL_TILES

    vector = (
        m1, m2, m3, m4, m5, m6, m7, m8, m9, m10,
        m11, m12, m13, m14, m15, m16, m17, m18, m19, m20,
        m21, m22, m23, m24, m25, m26, m27, m28, m29, m30, m31,
    )
    return report, vector


def compute_metrics(grid: GridMap) -> MetricVector:
    """Full metric vector of a feasible map; InfeasibleMapError otherwise."""
    report, vector = analyze(grid)
    if not report.feasible:
        raise InfeasibleMapError("no path from entrance to exit")
    return vector
