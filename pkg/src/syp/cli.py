"""Command-line pipeline: extract, script, compile, play, check, score.

Exit codes: 0 success, 1 incomplete or mismatching results, 2 input or
validation errors. Set SYP_NO_COLOR to disable ANSI styling.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import errors
from .beatsheet import check_completeness, script_sentences, sheet_from_json, sheet_to_csv, sheet_to_json
from .bpmn import model_to_json, parse_bpmn, validate_model
from .metrics import metrics_to_csv, score_sheet
from .narrative import compile_narrative, emit_ink, narrative_from_json, narrative_to_json
from .runtime import apply_choice, load_session, restart, save_session, start_session
from .sentences import (
    DEFAULT_LEXICON,
    VerbLexicon,
    extract_sentences,
    sentences_from_json,
    sentences_to_csv,
    sentences_to_json,
)

RESULT_ERRORS = (
    errors.IncompleteSheet,
    errors.UnlabeledChoice,
    errors.InfiniteLoop,
    errors.UnstructuredParallel,
    errors.DeadEnd,
)


def _use_color(stream) -> bool:
    return not os.environ.get("SYP_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


def _style(text: str, code: str, stream) -> str:
    if _use_color(stream):
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _fail(message: str) -> None:
    print(_style("error:", "31", sys.stderr) + f" {message}", file=sys.stderr)


def _warn(message: str) -> None:
    print(_style("warning:", "33", sys.stderr) + f" {message}", file=sys.stderr)


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    return p.read_bytes()


def _load_lexicon(path: str | None) -> VerbLexicon:
    if path is None:
        return DEFAULT_LEXICON
    return VerbLexicon.from_json(_read_bytes(path).decode("utf-8"))


def _validated_model(args):
    model = parse_bpmn(_read_bytes(args.bpmn))
    report = validate_model(model, args.mode)
    for diag in report.warnings:
        where = f" [{diag.node_id}]" if diag.node_id else ""
        _warn(f"{diag.message}{where}")
    if not report.ok:
        for diag in report.errors:
            where = f" [{diag.node_id}]" if diag.node_id else ""
            _fail(f"{diag.message}{where}")
        return None
    return model


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_extract(args) -> int:
    model = _validated_model(args)
    if model is None:
        return 2
    lexicon = _load_lexicon(args.lexicon)
    sentences = extract_sentences(model, lexicon)
    out = _out_dir(args)
    (out / "model.json").write_text(model_to_json(model), encoding="utf-8")
    (out / "sentences.json").write_text(sentences_to_json(sentences, model.process_id), encoding="utf-8")
    (out / "table.csv").write_text(sentences_to_csv(sentences), encoding="utf-8")
    print(f"extracted {len(sentences)} sentences -> {out / 'sentences.json'}, {out / 'table.csv'}")
    return 0


def cmd_script(args) -> int:
    model = _validated_model(args)
    if model is None:
        return 2
    sentences, _ = sentences_from_json(_read_bytes(args.sentences).decode("utf-8"))
    sheet = script_sentences(model, sentences, numbering=args.numbering)
    out = _out_dir(args)
    (out / "beatsheet.json").write_text(sheet_to_json(sheet), encoding="utf-8")
    (out / "beatsheet.csv").write_text(sheet_to_csv(sheet), encoding="utf-8")
    report = check_completeness(model, sheet)
    if not report.complete:
        _warn(f"{len(report.missing_node_ids)} flow nodes are unreachable and were left out")
    print(f"scripted {len(sheet.entries)} entries -> {out / 'beatsheet.json'}, {out / 'beatsheet.csv'}")
    return 0


def cmd_compile(args) -> int:
    sheet = sheet_from_json(_read_bytes(args.beatsheet).decode("utf-8"))
    try:
        narrative = compile_narrative(sheet)
    except RESULT_ERRORS as exc:
        _fail(str(exc))
        return 1
    out = _out_dir(args)
    (out / "story.ink").write_text(emit_ink(narrative), encoding="utf-8", newline="\n")
    (out / "story.json").write_text(narrative_to_json(narrative), encoding="utf-8")
    print(f"compiled {len(narrative.knots)} knots -> {out / 'story.ink'}, {out / 'story.json'}")
    return 0


def cmd_check(args) -> int:
    model = _validated_model(args)
    if model is None:
        return 2
    sheet = sheet_from_json(_read_bytes(args.beatsheet).decode("utf-8"))
    report = check_completeness(model, sheet)
    print(f"expected: {report.expected}")
    print(f"found:    {report.found}")
    if report.complete:
        print("missing:  none")
        return 0
    print(f"missing:  {', '.join(report.missing_node_ids)}")
    return 1


def cmd_score(args) -> int:
    paths = [Path(p) for p in args.sheets]
    if len(paths) < 2:
        _fail("score needs at least one candidate and the gold sheet last")
        return 2
    *candidates, gold_path = paths
    gold = sheet_from_json(_read_bytes(str(gold_path)).decode("utf-8"))
    named = []
    for path in candidates:
        candidate = sheet_from_json(_read_bytes(str(path)).decode("utf-8"))
        named.append((path.stem, score_sheet(candidate, gold)))
    out = _out_dir(args)
    csv_path = out / "metrics.csv"
    csv_path.write_text(metrics_to_csv(named), encoding="utf-8")
    written = [str(csv_path)]
    if not args.no_figure:
        from .report import render_metrics_figure

        written.append(str(render_metrics_figure(named, out / "metrics_mq.png")))
    for name, report in named:
        print(f"{name}: extracted {report.qtd_ext}/{report.qtd_exp}, correct {report.qtd_corr}/{report.qtd_exp}"
              f" (mq1={report.mq1:.2f}, mq2={report.mq2:.2f})")
    print("wrote " + ", ".join(written))
    return 0


def _print_transcript(session, shown: int) -> int:
    visited = session.visited_knots()
    for knot_id in visited[shown:]:
        print(session.narrative.knot(knot_id).body)
    return len(visited)


def cmd_play(args) -> int:
    narrative = narrative_from_json(_read_bytes(args.story).decode("utf-8"))
    save_path = Path(args.save) if args.save else Path(args.story).with_suffix(".save.json")
    session = start_session(narrative)
    shown = 0

    title = _style(narrative.title, "1", sys.stdout)
    print(title)
    print("-" * max(4, len(narrative.title)))
    shown = _print_transcript(session, shown)

    while True:
        labels = session.choice_labels()
        if session.finished:
            print(_style("-- the end --", "2", sys.stdout))
        else:
            for i, label in enumerate(labels, start=1):
                print(_style(f"  {i}. {label}", "36", sys.stdout))
        try:
            raw = input("> ").strip()
        except EOFError:
            return 0
        except KeyboardInterrupt:
            print()
            return 0
        if not raw:
            continue
        lowered = raw.lower()
        if lowered in ("q", "quit"):
            return 0
        if lowered in ("s", "save"):
            save_path.write_bytes(save_session(session))
            print(f"saved -> {save_path}")
            continue
        if lowered in ("l", "load", "reload"):
            if not save_path.is_file():
                _warn("no save to reload")
                continue
            try:
                session = load_session(save_path.read_bytes(), narrative)
            except errors.SypError as exc:
                _fail(str(exc))
                continue
            shown = 0
            print(_style("-- reloaded --", "2", sys.stdout))
            shown = _print_transcript(session, shown)
            continue
        if lowered in ("r", "restart"):
            session = restart(session)
            shown = 0
            print(_style("-- restarted --", "2", sys.stdout))
            shown = _print_transcript(session, shown)
            continue
        if session.finished:
            _warn("story finished: restart (r), reload (l) or quit (q)")
            continue
        if lowered.isdigit() and 1 <= int(lowered) <= len(labels):
            choice = labels[int(lowered) - 1]
        elif raw in labels:
            choice = raw
        else:
            _warn(f"pick a number between 1 and {len(labels)}")
            continue
        session = apply_choice(session, choice)
        shown = _print_transcript(session, shown)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=("strict", "lenient"), default="strict",
                        help="validation mode (default: strict)")
    parser.add_argument("--numbering", choices=("dfs", "list"), default="dfs",
                        help="beat numbering: depth-first or extraction-list order")
    parser.add_argument("--lexicon", metavar="PATH", default=None,
                        help="JSON file overriding default verbs")
    parser.add_argument("--out", "-o", metavar="DIR", default=".",
                        help="output directory (default: current)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syp",
        description="Turn a BPMN 2.0 process model into a playable interactive narrative.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract one sentence per flow element")
    p.add_argument("bpmn", help="BPMN 2.0 XML file")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("script", help="order sentences into a beat sheet")
    p.add_argument("bpmn", help="BPMN 2.0 XML file")
    p.add_argument("sentences", help="sentences.json from extract")
    _add_common(p)
    p.set_defaults(func=cmd_script)

    p = sub.add_parser("compile", help="compile a beat sheet to story.ink and story.json")
    p.add_argument("beatsheet", help="beatsheet.json from script")
    _add_common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("play", help="play a compiled story in the terminal")
    p.add_argument("story", help="story.json from compile")
    p.add_argument("--save", metavar="PATH", default=None,
                   help="save-file path (default: next to the story)")
    _add_common(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("check", help="report beat-sheet completeness against the model")
    p.add_argument("bpmn", help="BPMN 2.0 XML file")
    p.add_argument("beatsheet", help="beatsheet.json to check")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("score", help="score candidate sheets against a gold sheet")
    p.add_argument("sheets", nargs="+",
                   help="candidate beatsheet.json files, gold sheet last")
    p.add_argument("--no-figure", action="store_true", help="skip the metrics figure")
    _add_common(p)
    p.set_defaults(func=cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.SypError as exc:
        _fail(str(exc))
        return 2
    except (OSError, ValueError) as exc:
        _fail(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
