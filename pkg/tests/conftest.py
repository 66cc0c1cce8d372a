from __future__ import annotations

import random
from pathlib import Path

import pytest

from levelforge.grid import GridMap, parse_map

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "fixtures"


def map_from_rows(rows: list[str]) -> GridMap:
    return parse_map("\n".join(rows))


def all_floor_rows() -> list[str]:
    rows = ["." * 12 for _ in range(12)]
    rows[0] = "S" + "." * 11
    rows[11] = "." * 11 + "X"
    return rows


@pytest.fixture
def all_floor() -> GridMap:
    return map_from_rows(all_floor_rows())


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)
