"""The committed conformance vectors must match a fresh regeneration."""

import json
from pathlib import Path

from vectorgen import build_vectors

FRONTEND = Path(__file__).resolve().parent.parent / "frontend"


def test_vectors_file_is_fresh():
    committed = json.loads((FRONTEND / "fixtures" / "vectors.json").read_text())
    assert committed == build_vectors()


def test_demo_story_matches_bookstore():
    from vectorgen import bookstore_narrative

    from syp.narrative import narrative_to_json

    committed = (FRONTEND / "story.json").read_text()
    assert committed == narrative_to_json(bookstore_narrative())


def test_every_story_has_runs():
    committed = json.loads((FRONTEND / "fixtures" / "vectors.json").read_text())
    assert len(committed["stories"]) == 11
    for story in committed["stories"]:
        assert story["runs"], story["name"]
        for run in story["runs"]:
            assert run["visited"][0] == story["story"]["start_knot"]
