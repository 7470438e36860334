"""Interactive execution of a compiled narrative.

A session rests at a choice or end knot; divert chains are auto-advanced
and every step lands in the history, so any state can be rebuilt by
replaying the recorded choices from the start knot. Saves persist only the
narrative hash and that history.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import errors
from .narrative import Choices, CompiledNarrative, Divert, EndExit, narrative_core_dict

SAVE_VERSION = 1
AUTO = "auto"


def narrative_hash(narrative: CompiledNarrative) -> str:
    """Content hash over the canonical JSON form of the narrative."""
    canonical = json.dumps(
        narrative_core_dict(narrative), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Session:
    narrative: CompiledNarrative = field(compare=False, repr=False)
    narrative_ref: str = ""
    current_knot: str = ""
    history: tuple[tuple[str, str], ...] = ()
    finished: bool = False

    def choice_labels(self) -> tuple[str, ...]:
        exits = self.narrative.knot(self.current_knot).exits
        if isinstance(exits, Choices):
            return tuple(c.label for c in exits.choices)
        return ()

    def visited_knots(self) -> tuple[str, ...]:
        """Every knot seen so far, in order, including the current one."""
        return tuple(k for k, _ in self.history) + (self.current_knot,)


def _advance(narrative: CompiledNarrative, knot_id: str, history: list[tuple[str, str]]) -> str:
    """Follow diverts until a choice or end knot; record each step."""
    steps = 0
    while isinstance(narrative.knot(knot_id).exits, Divert):
        history.append((knot_id, AUTO))
        knot_id = narrative.knot(knot_id).exits.target
        steps += 1
        if steps > len(narrative.knots):
            raise errors.InfiniteLoop("auto-advance did not terminate")
    return knot_id


def start_session(narrative: CompiledNarrative) -> Session:
    history: list[tuple[str, str]] = []
    current = _advance(narrative, narrative.start_knot, history)
    return Session(
        narrative=narrative,
        narrative_ref=narrative_hash(narrative),
        current_knot=current,
        history=tuple(history),
        finished=isinstance(narrative.knot(current).exits, EndExit),
    )


def apply_choice(session: Session, label: str) -> Session:
    if session.finished:
        raise errors.SessionFinished("the narrative already reached an end")
    exits = session.narrative.knot(session.current_knot).exits
    if not isinstance(exits, Choices):
        raise errors.NoSuchChoice(f"knot {session.current_knot!r} offers no choices")
    target = next((c.target for c in exits.choices if c.label == label), None)
    if target is None:
        raise errors.NoSuchChoice(f"no choice labelled {label!r} at knot {session.current_knot!r}")

    history = list(session.history)
    history.append((session.current_knot, label))
    current = _advance(session.narrative, target, history)
    return Session(
        narrative=session.narrative,
        narrative_ref=session.narrative_ref,
        current_knot=current,
        history=tuple(history),
        finished=isinstance(session.narrative.knot(current).exits, EndExit),
    )


def restart(session: Session) -> Session:
    return start_session(session.narrative)


def save_session(session: Session) -> bytes:
    payload = {
        "version": SAVE_VERSION,
        "narrative_hash": session.narrative_ref,
        "history": [[knot, action] for knot, action in session.history],
    }
    return (json.dumps(payload, ensure_ascii=False) + "\n").encode("utf-8")


def load_session(data: bytes, narrative: CompiledNarrative) -> Session:
    try:
        payload = json.loads(data.decode("utf-8"))
        version = payload["version"]
        saved_hash = payload["narrative_hash"]
        history = [(str(k), str(a)) for k, a in payload["history"]]
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise errors.CorruptSave(f"unreadable save data: {exc}") from exc
    if version != SAVE_VERSION:
        raise errors.CorruptSave(f"unsupported save version {version!r}")
    if saved_hash != narrative_hash(narrative):
        raise errors.HashMismatch("save belongs to a different narrative")

    session = start_session(narrative)
    try:
        for _, action in history:
            if action != AUTO:
                session = apply_choice(session, action)
    except errors.SypError as exc:
        raise errors.CorruptSave(f"history cannot be replayed: {exc}") from exc
    if list(session.history) != history:
        raise errors.CorruptSave("history does not match a valid replay")
    return session
