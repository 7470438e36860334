#!/usr/bin/env python3
"""Regenerate frontend/fixtures/vectors.json and the demo story.json."""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from vectorgen import bookstore_narrative, build_vectors  # noqa: E402

from syp.narrative import narrative_to_json  # noqa: E402


def main() -> int:
    fixtures = ROOT / "frontend" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    vectors = build_vectors()
    (fixtures / "vectors.json").write_text(
        json.dumps(vectors, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    (ROOT / "frontend" / "story.json").write_text(
        narrative_to_json(bookstore_narrative()), encoding="utf-8"
    )
    total_runs = sum(len(s["runs"]) for s in vectors["stories"])
    print(f"wrote {len(vectors['stories'])} stories / {total_runs} runs to {fixtures / 'vectors.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
