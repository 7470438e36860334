"""Completeness/correctness scoring of a candidate beat sheet against a gold one.

mq1 is extracted-over-expected, mq2 correct-over-expected. An entry counts
as correct when it names the right flow node with the right subject kind,
the same complements up to lexical normalization, and the same onward
pointers (judged on flow nodes, restricted to nodes the candidate actually
extracted, so a truncated sheet is not punished twice).
"""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import dataclass
from statistics import mean, stdev

from . import errors
from .beatsheet import BeatSheet

_WS_RE = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Case-fold, trim, strip quote characters, collapse whitespace."""
    cleaned = re.sub(r"[\"'“”‘’]", "", text)
    return _WS_RE.sub(" ", cleaned).strip().casefold()


@dataclass(frozen=True)
class MetricsReport:
    qtd_exp: int
    qtd_ext: int
    qtd_corr: int
    mq1: float
    mq2: float
    mismatches: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class MetricsSummary:
    mean_mq1: float
    mode_mq1: float
    sd_mq1: float
    mean_mq2: float
    mode_mq2: float
    sd_mq2: float


def _complement_multiset(entry) -> Counter:
    return Counter((c.origin.value, normalize_text(c.text)) for c in entry.sentence.complements)


def _next_nodes(sheet: BeatSheet, entry) -> set[str]:
    by_id = {e.id: e for e in sheet.entries}
    return {by_id[r.target].sentence.source_node for r in entry.next if r.target in by_id}


def score_sheet(candidate: BeatSheet, gold: BeatSheet) -> MetricsReport:
    if candidate.model_ref != gold.model_ref:
        raise errors.ModelMismatch(
            f"candidate references {candidate.model_ref!r}, gold references {gold.model_ref!r}"
        )
    if not gold.entries:
        raise errors.EmptyInput("gold sheet has no entries")

    gold_by_node = {e.sentence.source_node: e for e in gold.entries}
    extracted_nodes = {e.sentence.source_node for e in candidate.entries}

    correct = 0
    claimed: set[str] = set()
    mismatches: list[tuple[int, str]] = []
    for entry in sorted(candidate.entries, key=lambda e: e.id):
        node = entry.sentence.source_node
        gold_entry = gold_by_node.get(node)
        if gold_entry is None:
            mismatches.append((entry.id, f"no flow node {node!r} in the reference sheet"))
            continue
        if node in claimed:
            mismatches.append((entry.id, f"duplicate entry for node {node!r}"))
            continue
        claimed.add(node)
        if entry.sentence.subject_kind is not gold_entry.sentence.subject_kind:
            mismatches.append((entry.id, "subject kind differs"))
            continue
        if _complement_multiset(entry) != _complement_multiset(gold_entry):
            mismatches.append((entry.id, "complements differ"))
            continue
        expected_next = _next_nodes(gold, gold_entry) & extracted_nodes
        if _next_nodes(candidate, entry) != expected_next:
            mismatches.append((entry.id, "next pointers differ"))
            continue
        correct += 1

    exp = len(gold.entries)
    ext = len(candidate.entries)
    return MetricsReport(
        qtd_exp=exp,
        qtd_ext=ext,
        qtd_corr=correct,
        mq1=ext / exp,
        mq2=correct / exp,
        mismatches=tuple(mismatches),
    )


def _mode(values: list[float]) -> float:
    counts = Counter(round(v, 2) for v in values)
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best)


def _sd(values: list[float]) -> float:
    return stdev(values) if len(values) > 1 else 0.0


def summarize(reports: list[MetricsReport]) -> MetricsSummary:
    """Sample statistics over a batch of reports."""
    if not reports:
        raise errors.EmptyInput("no reports to summarize")
    mq1 = [r.mq1 for r in reports]
    mq2 = [r.mq2 for r in reports]
    return MetricsSummary(
        mean_mq1=mean(mq1),
        mode_mq1=_mode(mq1),
        sd_mq1=_sd(mq1),
        mean_mq2=mean(mq2),
        mode_mq2=_mode(mq2),
        sd_mq2=_sd(mq2),
    )


def metrics_to_csv(named_reports: list[tuple[str, MetricsReport]]) -> str:
    """Table-style CSV: one row per report plus summary rows when several."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["Participant", "QtdExt", "QtdCorr", "MQ1", "MQ2"])
    for name, report in named_reports:
        writer.writerow(
            [name, report.qtd_ext, report.qtd_corr, f"{report.mq1:.2f}", f"{report.mq2:.2f}"]
        )
    if len(named_reports) > 1:
        reports = [r for _, r in named_reports]
        summary = summarize(reports)
        ext = [float(r.qtd_ext) for r in reports]
        corr = [float(r.qtd_corr) for r in reports]
        writer.writerow(
            ["Average", f"{mean(ext):.2f}", f"{mean(corr):.2f}",
             f"{summary.mean_mq1:.2f}", f"{summary.mean_mq2:.2f}"]
        )
        writer.writerow(
            ["Mode", f"{_mode(ext):.0f}", f"{_mode(corr):.0f}",
             f"{summary.mode_mq1:.2f}", f"{summary.mode_mq2:.2f}"]
        )
        writer.writerow(
            ["Standard Deviation", f"{_sd(ext):.2f}", f"{_sd(corr):.2f}",
             f"{summary.sd_mq1:.2f}", f"{summary.sd_mq2:.2f}"]
        )
    return buf.getvalue()
