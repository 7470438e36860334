#!/usr/bin/env python3
"""Regenerate the participant beat-sheet fixtures under fixtures/participants/."""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from participants import ROWS, make_candidate  # noqa: E402

from syp import extract_sentences, parse_bpmn, script_sentences  # noqa: E402
from syp.beatsheet import sheet_to_json  # noqa: E402


def main() -> int:
    out = ROOT / "fixtures" / "participants"
    out.mkdir(parents=True, exist_ok=True)
    model = parse_bpmn((ROOT / "fixtures" / "big26.bpmn").read_bytes())
    gold = script_sentences(model, extract_sentences(model), numbering="dfs")
    (out / "gold.json").write_text(sheet_to_json(gold), encoding="utf-8")
    for name, extracted, correct in ROWS:
        sheet = make_candidate(gold, extracted, correct)
        (out / f"{name}.json").write_text(sheet_to_json(sheet), encoding="utf-8")
    print(f"wrote gold + {len(ROWS)} candidate sheets to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
