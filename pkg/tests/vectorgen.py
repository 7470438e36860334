"""Build the conformance vectors that the web player must reproduce."""

from __future__ import annotations

import random
from pathlib import Path

from genmodels import random_model_xml
from syp.beatsheet import script_sentences
from syp.bpmn import parse_bpmn
from syp.narrative import CompiledNarrative, compile_narrative, narrative_to_dict
from syp.runtime import apply_choice, narrative_hash, start_session
from syp.sentences import extract_sentences

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _run(narrative: CompiledNarrative, choices: list[str]) -> dict:
    session = start_session(narrative)
    for label in choices:
        session = apply_choice(session, label)
    return {
        "choices": choices,
        "visited": list(session.visited_knots()),
        "finished": session.finished,
    }


def _random_runs(narrative: CompiledNarrative, rng: random.Random, count: int) -> list[dict]:
    runs = []
    seen = set()
    for _ in range(count):
        session = start_session(narrative)
        choices: list[str] = []
        while not session.finished and len(choices) < 40:
            label = rng.choice(session.choice_labels())
            choices.append(label)
            session = apply_choice(session, label)
        key = tuple(choices)
        if key in seen:
            continue
        seen.add(key)
        runs.append(_run(narrative, choices))
    return runs


def bookstore_narrative() -> CompiledNarrative:
    model = parse_bpmn((FIXTURES / "bookstore.bpmn").read_bytes())
    sheet = script_sentences(model, extract_sentences(model), numbering="list")
    return compile_narrative(sheet)


def build_vectors() -> dict:
    stories = []

    bookstore = bookstore_narrative()
    stories.append(
        {
            "name": "bookstore",
            "hash": narrative_hash(bookstore),
            "story": narrative_to_dict(bookstore),
            "runs": [
                _run(bookstore, ["I have money"]),
                _run(bookstore, ["I have no money"]),
            ],
        }
    )

    rng = random.Random(777)
    for i in range(10):
        model = parse_bpmn(
            random_model_xml(rng, rng.randint(6, 28), allow_cycles=rng.random() < 0.4)
        )
        narrative = compile_narrative(script_sentences(model, extract_sentences(model)))
        stories.append(
            {
                "name": f"generated_{i + 1:02d}",
                "hash": narrative_hash(narrative),
                "story": narrative_to_dict(narrative),
                "runs": _random_runs(narrative, rng, 5),
            }
        )

    return {"schema_version": 1, "stories": stories}
