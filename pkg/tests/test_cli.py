import io
import json

import pytest

from conftest import FIXTURES
from syp import (
    compile_narrative,
    emit_ink,
    extract_sentences,
    narrative_to_json,
    parse_bpmn,
    script_sentences,
)
from syp.cli import main


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def bookstore_path() -> str:
    return str(FIXTURES / "bookstore.bpmn")


def test_extract_bookstore(workdir, capsys):
    assert main(["extract", bookstore_path(), "--out", "out"]) == 0
    data = json.loads((workdir / "out" / "sentences.json").read_text())
    assert len(data["sentences"]) == 8
    assert data["schema_version"] == 1
    table = (workdir / "out" / "table.csv").read_text()
    assert table.startswith("#,Sentences,BPMN Element,Next")
    assert "extracted 8 sentences" in capsys.readouterr().out
    # the parsed model is exported in its canonical JSON form as well
    from syp import model_from_json, parse_bpmn

    exported = model_from_json((workdir / "out" / "model.json").read_text())
    assert exported == parse_bpmn((FIXTURES / "bookstore.bpmn").read_bytes())


def test_extract_missing_file(workdir, capsys):
    assert main(["extract", "missing.bpmn"]) == 2
    assert "file not found" in capsys.readouterr().err


def test_extract_big26(workdir):
    assert main(["extract", str(FIXTURES / "big26.bpmn"), "--out", "out"]) == 0
    data = json.loads((workdir / "out" / "sentences.json").read_text())
    assert len(data["sentences"]) == 26


def test_extract_malformed_xml(workdir, capsys):
    bad = workdir / "bad.bpmn"
    bad.write_text("<definitions><process>")
    assert main(["extract", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_full_pipeline_matches_in_process_composition(workdir):
    out = workdir / "out"
    assert main(["extract", bookstore_path(), "--numbering", "list", "--out", str(out)]) == 0
    assert main(["script", bookstore_path(), str(out / "sentences.json"),
                 "--numbering", "list", "--out", str(out)]) == 0
    assert main(["compile", str(out / "beatsheet.json"), "--out", str(out)]) == 0

    model = parse_bpmn((FIXTURES / "bookstore.bpmn").read_bytes())
    sheet = script_sentences(model, extract_sentences(model), numbering="list")
    narrative = compile_narrative(sheet)
    assert (out / "story.ink").read_text() == emit_ink(narrative)
    assert (out / "story.json").read_text() == narrative_to_json(narrative)
    ink = (out / "story.ink").read_text()
    assert "* [I have money] ->" in ink
    assert "* [I have no money] ->" in ink


def test_commands_are_idempotent(workdir):
    assert main(["extract", bookstore_path(), "--out", "a"]) == 0
    first = (workdir / "a" / "sentences.json").read_bytes()
    assert main(["extract", bookstore_path(), "--out", "a"]) == 0
    assert (workdir / "a" / "sentences.json").read_bytes() == first


def test_check_complete_sheet(workdir):
    out = workdir / "out"
    main(["extract", bookstore_path(), "--out", str(out)])
    main(["script", bookstore_path(), str(out / "sentences.json"), "--out", str(out)])
    assert main(["check", bookstore_path(), str(out / "beatsheet.json")]) == 0


def test_check_incomplete_sheet_exits_one(workdir, capsys):
    out = workdir / "out"
    main(["extract", bookstore_path(), "--out", str(out)])
    main(["script", bookstore_path(), str(out / "sentences.json"), "--out", str(out)])
    data = json.loads((out / "beatsheet.json").read_text())
    for entry in data["entries"]:
        entry["next"] = [r for r in entry["next"] if r["target"] <= 4]
    data["entries"] = data["entries"][:4]
    (out / "partial.json").write_text(json.dumps(data))
    assert main(["check", bookstore_path(), str(out / "partial.json")]) == 1
    printed = capsys.readouterr().out
    assert "expected: 8" in printed
    assert "found:    4" in printed
    assert "missing:" in printed


def test_score_participant_07(workdir, capsys):
    participants_dir = FIXTURES / "participants"
    assert main([
        "score", str(participants_dir / "p07.json"), str(participants_dir / "gold.json"), "--out", "metrics",
    ]) == 0
    csv_lines = (workdir / "metrics" / "metrics.csv").read_text().strip().split("\n")
    assert csv_lines[0] == "Participant,QtdExt,QtdCorr,MQ1,MQ2"
    assert csv_lines[1] == "p07,24,5,0.92,0.19"
    png = (workdir / "metrics" / "metrics_mq.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_score_all_participants_with_summary(workdir):
    participants_dir = FIXTURES / "participants"
    candidates = sorted(str(p) for p in participants_dir.glob("p*.json"))
    assert main(["score", *candidates, str(participants_dir / "gold.json"),
                 "--out", "metrics", "--no-figure"]) == 0
    lines = (workdir / "metrics" / "metrics.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 19 + 3
    average = next(l for l in lines if l.startswith("Average,"))
    fields = average.split(",")
    assert abs(float(fields[3]) - 0.98) <= 0.01
    assert abs(float(fields[4]) - 0.86) <= 0.015
    assert not (workdir / "metrics" / "metrics_mq.png").exists()


def test_score_model_mismatch(workdir):
    out = workdir / "out"
    main(["extract", bookstore_path(), "--out", str(out)])
    main(["script", bookstore_path(), str(out / "sentences.json"), "--out", str(out)])
    assert main(["score", str(out / "beatsheet.json"),
                 str(FIXTURES / "participants" / "gold.json"), "--no-figure"]) == 2


PARALLEL_XML = """<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="p" name="P">
    <laneSet id="ls"><lane id="l" name="Worker">
      <flowNodeRef>t1</flowNodeRef><flowNodeRef>t2</flowNodeRef>
    </lane></laneSet>
    <startEvent id="s" name="Go"/>
    <parallelGateway id="fork" name="Fork"/>
    <task id="t1" name="Left Leg"/>
    <task id="t2" name="Right Leg"/>
    <parallelGateway id="sync" name="Sync"/>
    <endEvent id="e" name="Stop"/>
    <sequenceFlow id="f1" sourceRef="s" targetRef="fork"/>
    <sequenceFlow id="f2" sourceRef="fork" targetRef="t1"/>
    <sequenceFlow id="f3" sourceRef="fork" targetRef="t2"/>
    <sequenceFlow id="f4" sourceRef="t1" targetRef="sync"/>
    <sequenceFlow id="f5" sourceRef="t2" targetRef="sync"/>
    <sequenceFlow id="f6" sourceRef="sync" targetRef="e"/>
  </process>
</definitions>
"""


def test_strict_mode_rejects_parallel_lenient_allows(workdir):
    model_file = workdir / "par.bpmn"
    model_file.write_text(PARALLEL_XML)
    assert main(["extract", str(model_file), "--mode", "strict", "--out", "s"]) == 2
    assert main(["extract", str(model_file), "--mode", "lenient", "--out", "l"]) == 0


def test_lexicon_flag(workdir):
    lex = workdir / "lex.json"
    lex.write_text('{"activity": "must"}')
    assert main(["extract", bookstore_path(), "--lexicon", str(lex), "--out", "out"]) == 0
    data = json.loads((workdir / "out" / "sentences.json").read_text())
    assert data["sentences"][1]["verb"] == "must"


def test_no_color_env(monkeypatch):
    from syp import cli

    class FakeTty(io.StringIO):
        def isatty(self):
            return True

    monkeypatch.delenv("SYP_NO_COLOR", raising=False)
    assert cli._use_color(FakeTty())
    monkeypatch.setenv("SYP_NO_COLOR", "1")
    assert not cli._use_color(FakeTty())


def _compiled_story(workdir) -> str:
    out = workdir / "out"
    main(["extract", bookstore_path(), "--numbering", "list", "--out", str(out)])
    main(["script", bookstore_path(), str(out / "sentences.json"), "--numbering", "list", "--out", str(out)])
    main(["compile", str(out / "beatsheet.json"), "--out", str(out)])
    return str(out / "story.json")


def test_play_happy_path(workdir, monkeypatch, capsys):
    story = _compiled_story(workdir)
    answers = iter(["2", "q"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(answers))
    assert main(["play", story]) == 0
    out = capsys.readouterr().out
    assert 'The Book Purchase starts when "The Book is Chosen"' in out
    assert "1. I have money" in out
    assert 'The Book Purchase ends when "The Book is Given Back"' in out
    assert "-- the end --" in out


def test_play_save_reload_restart(workdir, monkeypatch, capsys):
    story = _compiled_story(workdir)
    answers = iter(["s", "1", "r", "l", "2", "q"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(answers))
    assert main(["play", story, "--save", str(workdir / "game.save.json")]) == 0
    out = capsys.readouterr().out
    assert "saved ->" in out
    assert "-- restarted --" in out
    assert "-- reloaded --" in out
    # after reload we are back at the gateway; choosing 2 ends at "Given Back"
    assert 'The Book is Given Back' in out


def test_play_eof_quits(workdir, monkeypatch):
    story = _compiled_story(workdir)

    def raise_eof(prompt=""):
        raise EOFError

    monkeypatch.setattr("builtins.input", raise_eof)
    assert main(["play", story]) == 0


def test_compile_incomplete_sheet_exits_one(workdir, capsys):
    out = workdir / "out"
    main(["extract", bookstore_path(), "--out", str(out)])
    main(["script", bookstore_path(), str(out / "sentences.json"), "--out", str(out)])
    data = json.loads((out / "beatsheet.json").read_text())
    for entry in data["entries"]:
        entry["next"] = [r for r in entry["next"] if r["target"] != 3]
    data["entries"] = [e for e in data["entries"] if e["id"] != 3]
    (out / "gapped.json").write_text(json.dumps(data))
    assert main(["compile", str(out / "gapped.json")]) == 1
    assert "error:" in capsys.readouterr().err
