"""Confusion counts and accuracy/precision/recall, ransomware positive.

Metrics are computed as exact rationals and rounded only when rendered.
Undefined metrics (zero denominator) are reported as None and rendered
as "n/a" instead of being silently coerced to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(y_true, y_pred) -> ConfusionMatrix:
    true_labels = getattr(y_true, "labels", y_true)
    if len(true_labels) != len(y_pred):
        raise ValueError(
            f"length mismatch: {len(true_labels)} labels vs {len(y_pred)} predictions"
        )
    tp = tn = fp = fn = 0
    for t, p in zip(true_labels, y_pred):
        if t == 1:
            if p == 1:
                tp += 1
            else:
                fn += 1
        else:
            if p == 1:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def accuracy(cm: ConfusionMatrix) -> Fraction:
    if cm.total == 0:
        raise ValueError("accuracy undefined on zero samples")
    return Fraction(cm.tp + cm.tn, cm.total)


def precision(cm: ConfusionMatrix) -> Fraction | None:
    if cm.tp + cm.fp == 0:
        return None
    return Fraction(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> Fraction | None:
    if cm.tp + cm.fn == 0:
        return None
    return Fraction(cm.tp, cm.tp + cm.fn)


@dataclass(frozen=True)
class EvalReport:
    model_name: str
    cm: ConfusionMatrix

    @property
    def accuracy(self) -> Fraction:
        return accuracy(self.cm)

    @property
    def precision(self) -> Fraction | None:
        return precision(self.cm)

    @property
    def recall(self) -> Fraction | None:
        return recall(self.cm)

    def has_undefined(self) -> bool:
        return self.precision is None or self.recall is None


def evaluate_predictions(model_name: str, y_true, y_pred) -> EvalReport:
    return EvalReport(model_name, confusion(y_true, y_pred))


def _fmt_pct(value) -> str:
    return "n/a" if value is None else f"{float(value) * 100:.2f}"


def _fmt_ratio(value) -> str:
    return "n/a" if value is None else f"{float(value):.2f}"


COLUMNS = ("Model", "Accuracy(%)", "Precision", "Recall", "TP", "TN", "FP", "FN")


def report_cells(r: EvalReport) -> tuple[str, ...]:
    return (
        r.model_name,
        _fmt_pct(r.accuracy),
        _fmt_ratio(r.precision),
        _fmt_ratio(r.recall),
        str(r.cm.tp),
        str(r.cm.tn),
        str(r.cm.fp),
        str(r.cm.fn),
    )


def compare_models_text(reports: list[EvalReport]) -> str:
    """Aligned text table, models in input order."""
    if not reports:
        raise ValueError("no reports to compare")
    rows = [COLUMNS] + [report_cells(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(COLUMNS))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def compare_models_csv(reports: list[EvalReport]) -> str:
    if not reports:
        raise ValueError("no reports to compare")
    header = "model,accuracy_pct,precision,recall,tp,tn,fp,fn"
    lines = [header]
    for r in reports:
        cells = report_cells(r)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
