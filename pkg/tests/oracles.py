"""Naive reference implementations used to cross-check the package.

Everything here works directly on lists of 12 glyph strings and favours
obviousness over speed: dict-based BFS, set arithmetic, brute-force
scans.  Nothing imports the package under test.
"""

from __future__ import annotations

from collections import deque

SIZE = 12
AREA = SIZE * SIZE
WALL = "#"


def cells() -> list[tuple[int, int]]:
    return [(r, c) for r in range(SIZE) for c in range(SIZE)]


def find_all(rows: list[str], glyph: str) -> list[tuple[int, int]]:
    return [(r, c) for r, c in cells() if rows[r][c] == glyph]


def passable(rows: list[str], r: int, c: int) -> bool:
    return 0 <= r < SIZE and 0 <= c < SIZE and rows[r][c] != WALL


def bfs_steps(rows: list[str], sources: list[tuple[int, int]]) -> dict[tuple[int, int], int]:
    dist: dict[tuple[int, int], int] = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        r, c = queue.popleft()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if passable(rows, nr, nc) and (nr, nc) not in dist:
                dist[(nr, nc)] = dist[(r, c)] + 1
                queue.append((nr, nc))
    return dist


def oracle_path_tiles(rows: list[str]) -> int | None:
    """Shortest entrance-to-exit path counted in tiles, None if cut off."""
    (start,) = find_all(rows, "S")
    (goal,) = find_all(rows, "X")
    dist = bfs_steps(rows, [start])
    return dist[goal] + 1 if goal in dist else None


# ---------------------------------------------------------------------------
# segmentation (corridors / chambers / dead), written with sets


def oracle_segmentation(
    rows: list[str],
) -> tuple[list[set[tuple[int, int]]], list[set[tuple[int, int]]], set[tuple[int, int]]]:
    open_cells = {(r, c) for r, c in cells() if rows[r][c] != WALL}

    def blocked(r: int, c: int) -> bool:
        return (r, c) not in open_cells

    horiz = {(r, c) for r, c in open_cells if blocked(r - 1, c) and blocked(r + 1, c)}
    vert = {(r, c) for r, c in open_cells if blocked(r, c - 1) and blocked(r, c + 1)}

    corridors: list[set[tuple[int, int]]] = []
    for r in range(SIZE):
        run: set[tuple[int, int]] = set()
        for c in range(SIZE + 1):
            if c < SIZE and (r, c) in horiz:
                run.add((r, c))
            elif run:
                corridors.append(run)
                run = set()
    for c in range(SIZE):
        run = set()
        for r in range(SIZE + 1):
            if r < SIZE and (r, c) in vert:
                run.add((r, c))
            elif run:
                if not (len(run) == 1 and next(iter(run)) in horiz):
                    corridors.append(run)
                run = set()

    corridor_cells = set().union(*corridors) if corridors else set()
    remaining = open_cells - corridor_cells
    components: list[set[tuple[int, int]]] = []
    unvisited = set(remaining)
    while unvisited:
        seed = unvisited.pop()
        comp = {seed}
        frontier = [seed]
        while frontier:
            r, c = frontier.pop()
            for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nb in unvisited:
                    unvisited.remove(nb)
                    comp.add(nb)
                    frontier.append(nb)
        components.append(comp)

    def has_square(comp: set[tuple[int, int]]) -> bool:
        return any(
            {(r, c), (r + 1, c), (r, c + 1), (r + 1, c + 1)} <= open_cells for r, c in comp
        )

    chambers = [comp for comp in components if has_square(comp)]
    dead = set().union(*(c for c in components if not has_square(c))) if components else set()
    dead -= set().union(*chambers) if chambers else set()
    return corridors, chambers, dead


def oracle_dead_fraction(rows: list[str]) -> float:
    _, _, dead = oracle_segmentation(rows)
    return len(dead) / AREA


# ---------------------------------------------------------------------------
# entrance windows and treasure safety


def oracle_window_fraction(rows: list[str], glyph: str) -> float:
    """Literal scan: grow the window until it first contains the glyph."""
    (entrance,) = find_all(rows, "S")
    er, ec = entrance

    def window(radius: int) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(max(0, er - radius), min(SIZE, er + radius + 1))
            for c in range(max(0, ec - radius), min(SIZE, ec + radius + 1))
        ]

    if not find_all(rows, glyph):
        return 1.0
    best = None
    for radius in range(SIZE):
        if any(rows[r][c] == glyph for r, c in window(radius)):
            break
        best = window(radius)
    assert best is not None
    return len(best) / AREA


def oracle_safety(rows: list[str]) -> tuple[float, float]:
    treasures = find_all(rows, "T")
    if not treasures:
        return 0.0, 0.0
    enemies = find_all(rows, "E")
    (entrance,) = find_all(rows, "S")
    from_entrance = bfs_steps(rows, [entrance])
    from_enemies = bfs_steps(rows, enemies) if enemies else {}
    scores = []
    for t in treasures:
        if t not in from_entrance:
            scores.append(0.0)
        elif not enemies or t not in from_enemies:
            scores.append(1.0)
        else:
            d_n, d_e = from_enemies[t], from_entrance[t]
            scores.append(max(-1.0, min(1.0, (d_n - d_e) / (d_n + d_e))))
    mean = sum(scores) / len(scores)
    sd = (sum((s - mean) ** 2 for s in scores) / len(scores)) ** 0.5
    return mean, sd


# ---------------------------------------------------------------------------
# the metric subset with simple closed forms


def oracle_metric_subset(rows: list[str]) -> dict[str, float]:
    """M1, M2, M14, M17, M18 and M21-M31 from first principles."""
    count = lambda glyph: len(find_all(rows, glyph))
    left = lambda glyph: len([1 for r, c in find_all(rows, glyph) if c < 6])
    top = lambda glyph: len([1 for r, c in find_all(rows, glyph) if r < 6])
    right = lambda glyph: count(glyph) - left(glyph)
    bottom = lambda glyph: count(glyph) - top(glyph)

    def ratio(num: float, den: float) -> float:
        return num / den if den else 0.0

    path = oracle_path_tiles(rows)
    walls = count(WALL)
    out: dict[str, float] = {}
    if path is not None:
        out["M1"] = path / AREA
    out["M2"] = walls / (AREA - walls)
    out["M14"] = oracle_dead_fraction(rows)
    out["M17"] = count("E") / AREA
    out["M18"] = count("T") / AREA
    out["M21"] = ratio(abs(left(WALL) - right(WALL)), walls)
    out["M22"] = ratio(abs(top(WALL) - bottom(WALL)), walls)
    out["M23"] = ratio(abs(left("E") - right("E")), count("E"))
    out["M24"] = ratio(abs(top("E") - bottom("E")), count("E"))
    out["M25"] = ratio(abs(left("T") - right("T")), count("T"))
    out["M26"] = ratio(abs(top("T") - bottom("T")), count("T"))
    out["M27"] = ratio(abs(left("T") - right("E")), count("T") + count("E"))
    out["M28"] = ratio(abs(top("T") - bottom("E")), count("T") + count("E"))
    out["M29"] = len([1 for r, c in cells() if rows[r][c] == rows[r][11 - c]]) / AREA
    out["M30"] = len([1 for r, c in cells() if rows[r][c] == rows[11 - r][c]]) / AREA
    out["M31"] = len([1 for r, c in cells() if rows[r][c] == rows[c][r]]) / AREA
    return out


# ---------------------------------------------------------------------------
# goal-programming fitness and pairwise tournaments


def oracle_fitness(metrics: list[float], exemplars: list[list[float]], feasible: bool) -> list[float]:
    start = 0 if feasible else 1
    return [
        min(abs(metrics[i] - ex[i]) for ex in exemplars) for i in range(start, len(metrics))
    ]


def oracle_majority(a: list[float], b: list[float]) -> str:
    lower = sum(1 for x, y in zip(a, b) if x < y)
    greater = sum(1 for x, y in zip(a, b) if x > y)
    if lower > greater:
        return "better"
    if greater > lower:
        return "worse"
    return "tie"


def oracle_copeland(vectors: list[list[float]]) -> list[int]:
    """All-pairs tournament; score wins minus losses, then sort."""
    n = len(vectors)
    score = [0] * n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if oracle_majority(vectors[i], vectors[j]) == "better":
                score[i] += 1
                score[j] -= 1
    sums = [sum(v) for v in vectors]
    return sorted(range(n), key=lambda i: (-score[i], sums[i], i))
