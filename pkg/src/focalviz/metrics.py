"""Multi-label evaluation over the six annotation columns.

Per-label accuracy/precision/recall/F1 plus micro F1 (counts pooled over
all labels), macro F1 (unweighted mean over the six labels), and exact row
match. Every 0/0 ratio is defined as 0 and flagged, so the convention is
auditable in reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Mapping

from .model import LABELS, NarrativeDocument, RowKey, row_key
from .store import ParseError, parse as parse_story

Bits = tuple[int, int, int, int, int, int]

AlignPolicy = Literal["strict", "intersect"]


class MetricsError(Exception):
    pass


class AlignmentError(MetricsError):
    def __init__(self, missing_in_pred: tuple[RowKey, ...], missing_in_gold: tuple[RowKey, ...]):
        parts = []
        if missing_in_pred:
            parts.append(f"keys missing in pred: {_fmt_keys(missing_in_pred)}")
        if missing_in_gold:
            parts.append(f"keys missing in gold: {_fmt_keys(missing_in_gold)}")
        super().__init__("tables do not align; " + "; ".join(parts))
        self.missing_in_pred = missing_in_pred
        self.missing_in_gold = missing_in_gold


class EmptyEvaluation(MetricsError):
    pass


def _fmt_keys(keys: tuple[RowKey, ...], limit: int = 5) -> str:
    shown = ", ".join("/".join(k) for k in keys[:limit])
    if len(keys) > limit:
        shown += f", ... ({len(keys)} total)"
    return shown


@dataclass(frozen=True)
class LabelTable:
    """Ordered (RowKey -> six bits) table; keys unique, bits in {0, 1}."""

    rows: tuple[tuple[RowKey, Bits], ...]

    def __post_init__(self) -> None:
        seen: set[RowKey] = set()
        for key, bits in self.rows:
            if key in seen:
                raise MetricsError(f"duplicate row key {'/'.join(key)}")
            seen.add(key)
            if len(bits) != len(LABELS) or any(b not in (0, 1) for b in bits):
                raise MetricsError(f"row {'/'.join(key)}: bits must be six values in {{0, 1}}")

    def keys(self) -> tuple[RowKey, ...]:
        return tuple(k for k, _ in self.rows)

    def as_dict(self) -> dict[RowKey, Bits]:
        return dict(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def table_from_document(doc: NarrativeDocument) -> LabelTable:
    """Extract all annotation rows, keyed by scene/event/character ids."""
    rows = [(row_key(s.id, e.id, a.character), a.bits()) for s, e, a in doc.iter_rows()]
    return LabelTable(tuple(rows))


def parse_label_table(data: bytes | str) -> LabelTable:
    """Parse a bare label-table file: {"rows": [{scene, event, character, <labels>}]}."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("rows"), list):
        raise ParseError("label table must be an object with a 'rows' array")
    rows: list[tuple[RowKey, Bits]] = []
    for i, item in enumerate(raw["rows"]):
        if not isinstance(item, dict):
            raise ParseError(f"rows[{i}]: expected an object")
        try:
            key = row_key(str(item["scene"]), str(item["event"]), str(item["character"]))
            bits = tuple(item[label] for label in LABELS)
        except KeyError as exc:
            raise ParseError(f"rows[{i}]: missing field {exc.args[0]!r}") from exc
        rows.append((key, bits))  # bit range checked by LabelTable
    try:
        return LabelTable(tuple(rows))
    except MetricsError as exc:
        raise ParseError(str(exc)) from exc


def load_table(path: str | Path) -> LabelTable:
    """Read either a narrative file (annotations extracted) or a bare label table."""
    data = Path(path).read_bytes()
    head = json.loads(data.decode("utf-8")) if data else {}
    if isinstance(head, dict) and "rows" in head:
        return parse_label_table(data)
    return table_from_document(parse_story(data))


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class LabelMetrics:
    counts: ConfusionCounts
    accuracy: float
    precision: float
    recall: float
    f1: float
    zero_division: tuple[str, ...] = ()


@dataclass(frozen=True)
class EvalReport:
    row_count: int
    policy: AlignPolicy
    per_label: Mapping[str, LabelMetrics]
    micro_f1: float
    macro_f1: float
    exact_row_match: float
    micro_zero_division: tuple[str, ...] = ()
    dropped_gold: int = 0
    dropped_pred: int = 0


def align(gold: LabelTable, pred: LabelTable,
          policy: AlignPolicy = "strict") -> tuple[list[Bits], list[Bits], int, int]:
    """Match rows by key. Strict policy requires equal key sets; intersect
    keeps the common keys and reports how many rows were dropped per side."""
    gold_map = gold.as_dict()
    pred_map = pred.as_dict()
    missing_in_pred = tuple(k for k in gold.keys() if k not in pred_map)
    missing_in_gold = tuple(k for k in pred.keys() if k not in gold_map)
    if policy == "strict":
        if missing_in_pred or missing_in_gold:
            raise AlignmentError(missing_in_pred, missing_in_gold)
        common = gold.keys()
    elif policy == "intersect":
        common = tuple(k for k in gold.keys() if k in pred_map)
    else:
        raise MetricsError(f"unknown alignment policy {policy!r}")
    gold_rows = [gold_map[k] for k in common]
    pred_rows = [pred_map[k] for k in common]
    return gold_rows, pred_rows, len(missing_in_pred), len(missing_in_gold)


def _ratio(num: int, den: int, flag: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def evaluate(gold: LabelTable, pred: LabelTable,
             policy: AlignPolicy = "strict") -> EvalReport:
    """Score predicted bits against gold over the aligned rows."""
    gold_rows, pred_rows, dropped_gold, dropped_pred = align(gold, pred, policy)
    n = len(gold_rows)
    if n == 0:
        raise EmptyEvaluation("no aligned rows to evaluate")

    per_label: dict[str, LabelMetrics] = {}
    micro = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    f1_sum = 0.0
    for col, label in enumerate(LABELS):
        tp = fp = fn = tn = 0
        for g, p in zip(gold_rows, pred_rows):
            if g[col] == 1 and p[col] == 1:
                tp += 1
            elif g[col] == 0 and p[col] == 1:
                fp += 1
            elif g[col] == 1 and p[col] == 0:
                fn += 1
            else:
                tn += 1
        micro["tp"] += tp
        micro["fp"] += fp
        micro["fn"] += fn
        micro["tn"] += tn
        flags: list[str] = []
        precision = _ratio(tp, tp + fp, "precision", flags)
        recall = _ratio(tp, tp + fn, "recall", flags)
        f1 = _f1(precision, recall, flags)
        per_label[label] = LabelMetrics(
            counts=ConfusionCounts(tp, fp, fn, tn),
            accuracy=(tp + tn) / n,
            precision=precision,
            recall=recall,
            f1=f1,
            zero_division=tuple(flags),
        )
        f1_sum += f1

    micro_flags: list[str] = []
    micro_p = _ratio(micro["tp"], micro["tp"] + micro["fp"], "precision", micro_flags)
    micro_r = _ratio(micro["tp"], micro["tp"] + micro["fn"], "recall", micro_flags)
    micro_f1 = _f1(micro_p, micro_r, micro_flags)

    exact = sum(1 for g, p in zip(gold_rows, pred_rows) if g == p) / n

    return EvalReport(
        row_count=n,
        policy=policy,
        per_label=per_label,
        micro_f1=micro_f1,
        macro_f1=f1_sum / len(LABELS),
        exact_row_match=exact,
        micro_zero_division=tuple(micro_flags),
        dropped_gold=dropped_gold,
        dropped_pred=dropped_pred,
    )


def _f1(precision: float, recall: float, flags: list[str]) -> float:
    if precision + recall == 0.0:
        flags.append("f1")
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def render_report(report: EvalReport, format: Literal["table", "json"] = "table") -> str:
    """Render as an aligned text table (2 decimals) or canonical full-precision JSON."""
    if format == "json":
        payload = {
            "rows": report.row_count,
            "policy": report.policy,
            "per_label": {
                label: {
                    "accuracy": m.accuracy,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "counts": {"tp": m.counts.tp, "fp": m.counts.fp,
                               "fn": m.counts.fn, "tn": m.counts.tn},
                    "zero_division": list(m.zero_division),
                }
                for label, m in report.per_label.items()
            },
            "micro_f1": report.micro_f1,
            "macro_f1": report.macro_f1,
            "exact_row_match": report.exact_row_match,
            "micro_zero_division": list(report.micro_zero_division),
            "dropped_gold": report.dropped_gold,
            "dropped_pred": report.dropped_pred,
        }
        return json.dumps(payload, indent=2) + "\n"
    if format != "table":
        raise MetricsError(f"unknown report format {format!r}")

    width = max(len(label) for label in LABELS)
    lines = [f"rows: {report.row_count}  policy: {report.policy}"]
    if report.policy == "intersect" and (report.dropped_gold or report.dropped_pred):
        lines.append(f"dropped: gold {report.dropped_gold}, pred {report.dropped_pred}")
    header = f"{'Label':<{width}}  Accuracy  Precision  Recall    F1"
    lines.append(header)
    lines.append("-" * len(header))
    for label, m in report.per_label.items():
        star = " *" if m.zero_division else ""
        lines.append(f"{label:<{width}}  {m.accuracy:>8.2f}  {m.precision:>9.2f}"
                     f"  {m.recall:>6.2f}  {m.f1:>4.2f}{star}")
    lines.append("-" * len(header))
    lines.append(f"Micro F1         {report.micro_f1:>5.2f}")
    lines.append(f"Macro F1         {report.macro_f1:>5.2f}")
    lines.append(f"Exact Row Match  {report.exact_row_match:>5.2f}")
    if any(m.zero_division for m in report.per_label.values()):
        lines.append("* zero denominator defined as 0")
    return "\n".join(lines) + "\n"


def bits_from_mapping(values: Mapping[str, int]) -> Bits:
    """Six bits in canonical order from a {label: bit} mapping."""
    return tuple(values[label] for label in LABELS)  # type: ignore[return-value]


def table_from_rows(rows: Iterable[tuple[RowKey, Iterable[int]]]) -> LabelTable:
    return LabelTable(tuple((k, tuple(b)) for k, b in rows))  # type: ignore[arg-type]
