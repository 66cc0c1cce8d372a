"""Interactive design sessions: the human side of the loop.

A session starts from a user-designed level, shows eight suggested maps
per iteration, and lets the user edit, like and keep them.  Liked maps
become optimisation targets for the next batch of suggestions; kept maps
fill the five level slots that end the session.  Each user id is hashed
to one of two suggestion modes (optimised or purely random) which is
withheld from every payload until the final log export.

Every mutating operation has a journal event constructor, and
``replay_session`` rebuilds identical session state from the event
stream alone.
"""

from __future__ import annotations

import logging
import random
import uuid
from dataclasses import dataclass, field
from enum import Enum

from .evolution import GAParams, random_suggestions, run_optimisation, select_suggestions
from .grid import GridMap, MapError, edit_distance, parse_map, serialize_map, validate_structure
from .metrics import MetricVector, analyze
from .ranking import TargetSet

log = logging.getLogger(__name__)

SUGGESTION_COUNT = 8
LEVEL_GOAL = 5


class SessionError(Exception):
    pass


class EmptyUserIdError(SessionError):
    pass


class NotAtStartError(SessionError):
    pass


class SessionCompleteError(SessionError):
    pass


class SessionIncompleteError(SessionError):
    pass


class InvalidMapError(SessionError):
    pass


class UnknownSuggestionIndexError(SessionError):
    pass


class SessionMode(Enum):
    GA = "ga"
    CONTROL = "control"


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    value = _FNV_OFFSET
    for byte in data:
        value = ((value ^ byte) * _FNV_PRIME) & _MASK64
    return value


def assign_mode(user_id: str) -> SessionMode:
    """Hash the user id to a stable, roughly fifty-fifty mode split."""
    if not user_id:
        raise EmptyUserIdError("user id must be non-empty")
    even = fnv1a64(user_id.encode("utf-8")) & 1 == 0
    return SessionMode.GA if even else SessionMode.CONTROL


def _derived_rng(seed: int, iteration: int) -> random.Random:
    """Independent per-iteration stream from the session seed (splitmix64)."""
    z = (seed + 0x9E3779B97F4A7C15 * (iteration + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return random.Random(z ^ (z >> 31))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    likes: int
    keeps: int
    edits_of_liked: tuple[int, ...]
    edits_of_kept: tuple[int, ...]
    blank_used: bool


@dataclass
class SessionLog:
    group: SessionMode
    iterations: list[IterationRecord] = field(default_factory=list)
    blank_creations: int = 0


@dataclass
class SuggestionSlot:
    original: GridMap
    current: GridMap


@dataclass(frozen=True)
class Decision:
    """One suggestion card at Suggest More time: its edited state and tags."""

    index: int
    edited: GridMap
    liked: bool = False
    kept: bool = False

    @property
    def tagged(self) -> bool:
        return self.liked or self.kept


@dataclass
class Session:
    id: str
    user_id: str
    mode: SessionMode
    seed: int
    params: GAParams
    liked: list[GridMap] = field(default_factory=list)
    levels: list[GridMap] = field(default_factory=list)
    current_suggestions: list[SuggestionSlot] = field(default_factory=list)
    iteration: int = 0
    log: SessionLog = None  # type: ignore[assignment]
    complete: bool = False

    def __post_init__(self) -> None:
        if self.log is None:
            self.log = SessionLog(group=self.mode)


def new_session(
    user_id: str,
    seed: int,
    params: GAParams = GAParams(),
    session_id: str | None = None,
) -> Session:
    mode = assign_mode(user_id)
    return Session(
        id=session_id if session_id is not None else uuid.uuid4().hex,
        user_id=user_id,
        mode=mode,
        seed=seed & _MASK64,
        params=params,
    )


# ---------------------------------------------------------------------------
# validation helpers


def _checked_exemplar(grid: GridMap) -> MetricVector:
    """Structure and feasibility gate for anything entering liked or levels."""
    try:
        validate_structure(grid)
    except MapError as exc:
        raise InvalidMapError(str(exc)) from exc
    report, vector = analyze(grid)
    if not report.feasible:
        raise InvalidMapError("no passable path from entrance to exit")
    return vector


def _require_active(session: Session) -> None:
    if session.complete:
        raise SessionCompleteError("all five levels are already kept")
    if session.iteration == 0:
        raise NotAtStartError("submit the initial design first")


def _target_set(liked: list[GridMap]) -> TargetSet:
    vectors = []
    for grid in liked:
        _, vector = analyze(grid)
        vectors.append(vector)
    return TargetSet(tuple(vectors))


def _make_suggestions(
    session: Session, iteration: int, liked: list[GridMap]
) -> list[SuggestionSlot]:
    rng = _derived_rng(session.seed, iteration)
    if session.mode is SessionMode.GA:
        pop, _ = run_optimisation(_target_set(liked), session.params, rng)
        maps = select_suggestions(pop.feasible, SUGGESTION_COUNT, rng)
    else:
        maps = random_suggestions(SUGGESTION_COUNT, rng)
    return [SuggestionSlot(original=grid, current=grid) for grid in maps]


# ---------------------------------------------------------------------------
# operations


def submit_initial(session: Session, grid: GridMap) -> list[GridMap]:
    """Store the user's first level and return the first suggestion batch."""
    if session.complete or session.iteration != 0:
        raise NotAtStartError("the initial design was already submitted")
    _checked_exemplar(grid)
    slots = _make_suggestions(session, 1, [grid])
    session.liked.append(grid)
    session.levels.append(grid)
    session.current_suggestions = slots
    session.iteration = 1
    return [slot.current for slot in slots]


def iterate(session: Session, decisions: list[Decision]) -> list[GridMap] | None:
    """Apply one round of edits and tags; returns fresh suggestions or
    None when the fifth level was just kept."""
    _require_active(session)
    seen: set[int] = set()
    for decision in decisions:
        if not 0 <= decision.index < len(session.current_suggestions):
            raise UnknownSuggestionIndexError(f"no suggestion at index {decision.index}")
        if decision.index in seen:
            raise UnknownSuggestionIndexError(f"duplicate index {decision.index}")
        seen.add(decision.index)
    for decision in decisions:
        if decision.tagged:
            _checked_exemplar(decision.edited)

    edits_of_liked: list[int] = []
    edits_of_kept: list[int] = []
    tagged: list[GridMap] = []
    accepted: list[GridMap] = []
    room = LEVEL_GOAL - len(session.levels)
    for decision in decisions:
        if not decision.tagged:
            continue
        edits = edit_distance(session.current_suggestions[decision.index].original, decision.edited)
        tagged.append(decision.edited)
        if decision.liked:
            edits_of_liked.append(edits)
        if decision.kept:
            edits_of_kept.append(edits)
            if len(accepted) < room:
                accepted.append(decision.edited)
            else:
                log.warning("session %s: keep beyond %d levels ignored", session.id, LEVEL_GOAL)
    completes = len(accepted) == room
    slots = None
    if not completes:
        slots = _make_suggestions(session, session.iteration + 1, session.liked + tagged)

    session.liked.extend(tagged)
    session.levels.extend(accepted)
    session.log.iterations.append(
        IterationRecord(
            iteration=session.iteration,
            likes=len(edits_of_liked),
            keeps=len(edits_of_kept),
            edits_of_liked=tuple(edits_of_liked),
            edits_of_kept=tuple(edits_of_kept),
            blank_used=False,
        )
    )
    for decision in decisions:
        session.current_suggestions[decision.index].current = decision.edited
    if completes:
        session.complete = True
        return None
    session.current_suggestions = slots
    session.iteration += 1
    return [slot.current for slot in slots]


def submit_blank(session: Session, grid: GridMap) -> None:
    """A from-scratch design counts as liked and kept in one step."""
    _require_active(session)
    _checked_exemplar(grid)
    session.liked.append(grid)
    if len(session.levels) < LEVEL_GOAL:
        session.levels.append(grid)
    else:
        log.warning("session %s: blank keep beyond %d levels ignored", session.id, LEVEL_GOAL)
    session.log.blank_creations += 1
    session.log.iterations.append(
        IterationRecord(
            iteration=session.iteration,
            likes=0,
            keeps=0,
            edits_of_liked=(),
            edits_of_kept=(),
            blank_used=True,
        )
    )
    if len(session.levels) >= LEVEL_GOAL:
        session.complete = True


# ---------------------------------------------------------------------------
# exports


def export_log(session: Session) -> dict:
    """The quantitative log; the only document that names the group."""
    return {
        "group": session.mode.value,
        "blank_creations": session.log.blank_creations,
        "iterations": [
            {
                "iteration": record.iteration,
                "likes": record.likes,
                "keeps": record.keeps,
                "edits_of_liked": list(record.edits_of_liked),
                "edits_of_kept": list(record.edits_of_kept),
                "blank_used": record.blank_used,
            }
            for record in session.log.iterations
        ],
        "complete": session.complete,
    }


def export_final_screen(session: Session) -> str:
    """The five kept levels plus the last suggestion batch as map text."""
    if not session.complete:
        raise SessionIncompleteError("final screen exists only after five levels are kept")
    blocks = []
    for number, grid in enumerate(session.levels, start=1):
        blocks.append(f"level {number}\n" + serialize_map(grid))
    for number, slot in enumerate(session.current_suggestions, start=1):
        blocks.append(f"suggestion {number}\n" + serialize_map(slot.current))
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# journal events and replay


def _rows(grid: GridMap) -> list[str]:
    return serialize_map(grid).splitlines()


def created_event(session: Session) -> dict:
    return {
        "event": "session-created",
        "session_id": session.id,
        "user_id": session.user_id,
        "seed": session.seed,
        "params": {
            "mutation_rate": session.params.mutation_rate,
            "tournament_size": session.params.tournament_size,
            "elite_count": session.params.elite_count,
            "population_size": session.params.population_size,
            "generations": session.params.generations,
            "evaluation_budget": session.params.evaluation_budget,
        },
    }


def initial_event(grid: GridMap) -> dict:
    return {"event": "initial-submitted", "rows": _rows(grid)}


def iterate_event(decisions: list[Decision]) -> dict:
    return {
        "event": "iterated",
        "decisions": [
            {
                "index": decision.index,
                "rows": _rows(decision.edited),
                "liked": decision.liked,
                "kept": decision.kept,
            }
            for decision in decisions
        ],
    }


def blank_event(grid: GridMap) -> dict:
    return {"event": "blank-submitted", "rows": _rows(grid)}


def completed_event() -> dict:
    return {"event": "completed"}


def _event_grid(payload: dict) -> GridMap:
    return parse_map("\n".join(payload["rows"]))


def replay_session(events: list[dict]) -> Session:
    """Rebuild a session by re-running its journal from the beginning."""
    if not events or events[0].get("event") != "session-created":
        raise ValueError("journal must start with a session-created event")
    head = events[0]
    session = new_session(
        head["user_id"],
        head["seed"],
        params=GAParams(**head["params"]),
        session_id=head["session_id"],
    )
    for payload in events[1:]:
        kind = payload.get("event")
        if kind == "initial-submitted":
            submit_initial(session, _event_grid(payload))
        elif kind == "iterated":
            iterate(
                session,
                [
                    Decision(
                        index=entry["index"],
                        edited=parse_map("\n".join(entry["rows"])),
                        liked=entry["liked"],
                        kept=entry["kept"],
                    )
                    for entry in payload["decisions"]
                ],
            )
        elif kind == "blank-submitted":
            submit_blank(session, _event_grid(payload))
        elif kind == "completed":
            if not session.complete:
                raise ValueError("journal marks completion but replay is incomplete")
        else:
            raise ValueError(f"unknown journal event {kind!r}")
    return session
