import json
import random

import pytest

from genmodels import random_model_xml
from syp import errors
from syp.beatsheet import script_sentences
from syp.bpmn import parse_bpmn
from syp.narrative import (
    Choices,
    CompiledNarrative,
    EndExit,
    Knot,
    compile_narrative,
    entry_knot_id,
)
from syp.runtime import (
    apply_choice,
    load_session,
    narrative_hash,
    restart,
    save_session,
    start_session,
)
from syp.sentences import extract_sentences


@pytest.fixture(scope="module")
def bookstore_narrative(bookstore_sheet):
    return compile_narrative(bookstore_sheet)


def knot_of(sheet, entry_id):
    return entry_knot_id(sheet.entry(entry_id))


def test_start_auto_advances_to_gateway(bookstore_narrative, bookstore_sheet):
    session = start_session(bookstore_narrative)
    assert session.current_knot == knot_of(bookstore_sheet, 4)
    assert session.visited_knots() == tuple(knot_of(bookstore_sheet, i) for i in (1, 2, 3, 4))
    assert session.choice_labels() == ("I have money", "I have no money")
    assert not session.finished


def test_no_money_branch_finishes_at_five(bookstore_narrative, bookstore_sheet):
    session = apply_choice(start_session(bookstore_narrative), "I have no money")
    assert session.current_knot == knot_of(bookstore_sheet, 5)
    assert session.finished


def test_money_branch_runs_six_seven_eight(bookstore_narrative, bookstore_sheet):
    session = apply_choice(start_session(bookstore_narrative), "I have money")
    assert session.finished
    assert session.visited_knots()[-3:] == tuple(knot_of(bookstore_sheet, i) for i in (6, 7, 8))


def test_unknown_choice(bookstore_narrative):
    with pytest.raises(errors.NoSuchChoice):
        apply_choice(start_session(bookstore_narrative), "maybe")


def test_choice_after_finish(bookstore_narrative):
    done = apply_choice(start_session(bookstore_narrative), "I have no money")
    with pytest.raises(errors.SessionFinished):
        apply_choice(done, "I have money")


def test_single_end_narrative_is_immediately_finished():
    narrative = CompiledNarrative("T", "k_1", (Knot("k_1", "over", EndExit()),))
    session = start_session(narrative)
    assert session.finished
    assert session.history == ()
    assert session.current_knot == "k_1"


def test_auto_advance_is_bounded_on_loops():
    model = parse_bpmn(LOOP_XML)
    sheet = script_sentences(model, extract_sentences(model))
    narrative = compile_narrative(sheet)
    session = start_session(narrative)
    # bounded-step oracle: a run from the start can take at most |knots| steps
    assert len(session.history) <= len(narrative.knots)
    assert isinstance(narrative.knot(session.current_knot).exits, Choices)
    # loop five times, then leave; advance never spins
    for _ in range(5):
        session = apply_choice(session, "retry")
    session = apply_choice(session, "done")
    assert session.finished


def test_save_load_round_trip(bookstore_narrative):
    session = start_session(bookstore_narrative)
    data = save_session(session)
    assert load_session(data, bookstore_narrative) == session

    done = apply_choice(session, "I have money")
    assert load_session(save_session(done), bookstore_narrative) == done


def test_load_against_modified_narrative(bookstore_narrative):
    data = save_session(start_session(bookstore_narrative))
    modified = CompiledNarrative(
        title=bookstore_narrative.title + "!",
        start_knot=bookstore_narrative.start_knot,
        knots=bookstore_narrative.knots,
    )
    assert narrative_hash(modified) != narrative_hash(bookstore_narrative)
    with pytest.raises(errors.HashMismatch):
        load_session(data, modified)


def test_corrupt_save(bookstore_narrative):
    with pytest.raises(errors.CorruptSave):
        load_session(b"not json at all", bookstore_narrative)
    with pytest.raises(errors.CorruptSave):
        load_session(b'{"version": 9}', bookstore_narrative)


def test_tampered_history_is_corrupt(bookstore_narrative):
    data = json.loads(save_session(apply_choice(start_session(bookstore_narrative), "I have money")))
    data["history"][-1][1] = "I have no money"
    data["history"].append(["bogus_knot", "auto"])
    with pytest.raises(errors.CorruptSave):
        load_session(json.dumps(data).encode(), bookstore_narrative)


def test_restart_after_finishing(bookstore_narrative, bookstore_sheet):
    done = apply_choice(start_session(bookstore_narrative), "I have no money")
    fresh = restart(done)
    assert fresh == start_session(bookstore_narrative)
    assert fresh.current_knot == knot_of(bookstore_sheet, 4)
    assert not fresh.finished


def _random_walk(narrative, rng, max_steps=60):
    session = start_session(narrative)
    while not session.finished and len(session.history) < max_steps:
        session = apply_choice(session, rng.choice(session.choice_labels()))
    return session


def test_replay_determinism_fuzz():
    rng = random.Random(1234)
    for _ in range(10):
        model = parse_bpmn(random_model_xml(rng, rng.randint(4, 30), allow_cycles=True))
        narrative = compile_narrative(script_sentences(model, extract_sentences(model)))
        for _ in range(10):
            session = _random_walk(narrative, rng)
            replayed = load_session(save_session(session), narrative)
            assert replayed == session
            assert replayed.visited_knots() == session.visited_knots()


def test_trace_maps_to_flow_graph():
    rng = random.Random(4321)
    for _ in range(10):
        model = parse_bpmn(random_model_xml(rng, rng.randint(4, 30), allow_cycles=True))
        sheet = script_sentences(model, extract_sentences(model))
        narrative = compile_narrative(sheet)
        knot_to_node = {entry_knot_id(e): e.sentence.source_node for e in sheet.entries}
        flow_edges = {(f.source, f.target) for f in model.sequence_flows}
        session = _random_walk(narrative, rng)
        trace = [knot_to_node[k] for k in session.visited_knots()]
        assert trace[0] == model.start_events()[0].id
        for a, b in zip(trace, trace[1:]):
            assert (a, b) in flow_edges


LOOP_XML = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="p" name="P">
    <laneSet id="ls"><lane id="l" name="Worker">
      <flowNodeRef>t1</flowNodeRef><flowNodeRef>t2</flowNodeRef>
    </lane></laneSet>
    <startEvent id="s" name="Go"/>
    <task id="t1" name="Try Again"/>
    <task id="t2" name="Review"/>
    <exclusiveGateway id="g" name="Done?"/>
    <endEvent id="e" name="Stop"/>
    <sequenceFlow id="f1" sourceRef="s" targetRef="t1"/>
    <sequenceFlow id="f2" sourceRef="t1" targetRef="t2"/>
    <sequenceFlow id="f3" sourceRef="t2" targetRef="g"/>
    <sequenceFlow id="f4" name="done" sourceRef="g" targetRef="e"/>
    <sequenceFlow id="f5" name="retry" sourceRef="g" targetRef="t1"/>
  </process>
</definitions>
"""
