"""Max-confidence committee arbitration over per-model predictions.

Each classifier emits one record per subject with class confidences over
(non_demented, demented).  The committee keeps, for every subject, the record
whose top class confidence is largest and emits that record's arg-max class.
Ties are broken by a fixed model registry order so the decision never depends
on input ordering.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import FormatError

CLASSES = ("non_demented", "demented")
POSITIVE_CLASS = "demented"

# confidences must sum to 1 within this after normalization
NORMALIZATION_TOL = 1e-9

UNDEFINED = "undefined"

DECISION_CSV_FIELDS = ("subject_id", "chosen_model", "predicted_class", "confidence")
CONTRIBUTION_CSV_FIELDS = ("model_id", "decisions")
METRICS_CSV_FIELDS = ("metric", "value")
ABLATION_CSV_FIELDS = ("models", "tp", "tn", "fp", "fn",
                       "accuracy", "sensitivity", "specificity")


def softmax(scores: Sequence[float]) -> Tuple[float, ...]:
    """Stable softmax: shift by the max before exponentiating."""
    values = [float(s) for s in scores]
    if not values:
        raise ValueError("softmax needs at least one score")
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite scores {values}")
    peak = max(values)
    exps = [math.exp(v - peak) for v in values]
    total = sum(exps)
    return tuple(e / total for e in exps)


@dataclass(frozen=True)
class PredictionRecord:
    """One model's output for one subject.

    ``confidences`` follows the fixed class order (non_demented, demented) and
    is normalized to sum to 1 at construction.
    """

    subject_id: str
    model_id: str
    confidences: Tuple[float, float]

    def __post_init__(self):
        if not self.subject_id:
            raise ValueError("empty subject_id")
        if not self.model_id:
            raise ValueError("empty model_id")
        values = tuple(float(c) for c in self.confidences)
        if len(values) != len(CLASSES):
            raise ValueError(f"expected {len(CLASSES)} confidences, got {len(values)}")
        if not all(math.isfinite(v) and v >= 0.0 for v in values):
            raise ValueError(f"confidences must be finite and nonnegative, got {values}")
        total = sum(values)
        if total <= 0.0:
            raise ValueError("confidences sum to zero")
        values = tuple(v / total for v in values)
        if abs(sum(values) - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"normalization failed for {self.confidences}")
        object.__setattr__(self, "confidences", values)

    @classmethod
    def from_logits(cls, subject_id: str, model_id: str,
                    logits: Sequence[float]) -> "PredictionRecord":
        return cls(subject_id=subject_id, model_id=model_id,
                   confidences=softmax(logits))

    @property
    def predicted_class(self) -> str:
        # first max wins on an exact tie, matching the fixed class order
        best = max(range(len(CLASSES)), key=lambda i: (self.confidences[i], -i))
        return CLASSES[best]

    @property
    def confidence(self) -> float:
        """The scalar the committee compares: the top class probability."""
        return max(self.confidences)


@dataclass(frozen=True)
class CommitteeDecision:
    subject_id: str
    chosen_model: str
    predicted_class: str
    confidence: float


def _registry_from(records: Iterable[PredictionRecord]) -> Tuple[str, ...]:
    return tuple(sorted({r.model_id for r in records}))


def committee_decide(records: Iterable[PredictionRecord],
                     registry: Optional[Sequence[str]] = None) -> CommitteeDecision:
    """Pick the single record with the highest confidence for one subject.

    Exact confidence ties go to the model listed earlier in ``registry``
    (default: model ids in sorted order), so the result is invariant to the
    order records arrive in.
    """
    pool = list(records)
    if not pool:
        raise ValueError("no prediction records")
    subject = pool[0].subject_id
    if any(r.subject_id != subject for r in pool):
        subjects = sorted({r.subject_id for r in pool})
        raise ValueError(f"records span multiple subjects: {subjects}")
    by_model: Dict[str, PredictionRecord] = {}
    for rec in pool:
        if rec.model_id in by_model:
            raise ValueError(f"duplicate prediction for ({subject}, {rec.model_id})")
        by_model[rec.model_id] = rec
    order = tuple(registry) if registry is not None else _registry_from(pool)
    unknown = sorted(set(by_model) - set(order))
    if unknown:
        raise ValueError(f"models not in registry: {unknown}")
    best: Optional[PredictionRecord] = None
    for model in order:
        rec = by_model.get(model)
        if rec is None:
            continue
        if best is None or rec.confidence > best.confidence:
            best = rec
    assert best is not None
    return CommitteeDecision(subject_id=subject, chosen_model=best.model_id,
                             predicted_class=best.predicted_class,
                             confidence=best.confidence)


def decide_batch(records: Iterable[PredictionRecord],
                 registry: Optional[Sequence[str]] = None,
                 ) -> Tuple[Dict[str, CommitteeDecision], List[str]]:
    """Decide every subject present in ``records``.

    Returns decisions keyed by subject (sorted) plus warning lines for
    subjects missing output from some registry model.  A missing model skews
    a single subject, not the whole run, so it is reported rather than fatal.
    """
    pool = list(records)
    order = tuple(registry) if registry is not None else _registry_from(pool)
    grouped: Dict[str, List[PredictionRecord]] = {}
    for rec in pool:
        grouped.setdefault(rec.subject_id, []).append(rec)
    decisions: Dict[str, CommitteeDecision] = {}
    warnings: List[str] = []
    for subject in sorted(grouped):
        subject_records = grouped[subject]
        missing = [m for m in order if all(r.model_id != m for r in subject_records)]
        for model in missing:
            warnings.append(f"subject {subject}: no prediction from {model}")
        decisions[subject] = committee_decide(subject_records, registry=order)
    return decisions, warnings


def contribution_counts(decisions: Union[Mapping[str, CommitteeDecision],
                                         Iterable[CommitteeDecision]],
                        registry: Optional[Sequence[str]] = None) -> Dict[str, int]:
    """How many committee decisions each model won.

    Models in ``registry`` always appear, with zero when they never won;
    counts sum to the number of decisions.
    """
    if isinstance(decisions, Mapping):
        pool = list(decisions.values())
    else:
        pool = list(decisions)
    order = tuple(registry) if registry is not None \
        else tuple(sorted({d.chosen_model for d in pool}))
    counts = {model: 0 for model in order}
    for d in pool:
        if d.chosen_model not in counts:
            raise ValueError(f"decision by unregistered model {d.chosen_model!r}")
        counts[d.chosen_model] += 1
    return counts


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with demented as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(decisions: Union[Mapping[str, CommitteeDecision],
                               Iterable[CommitteeDecision]],
              truth: Mapping[str, str]) -> ConfusionMatrix:
    """Score decisions against truth labels."""
    if isinstance(decisions, Mapping):
        pool = list(decisions.values())
    else:
        pool = list(decisions)
    tp = tn = fp = fn = 0
    for d in pool:
        if d.subject_id not in truth:
            raise ValueError(f"no truth label for subject {d.subject_id}")
        label = truth[d.subject_id]
        if label not in CLASSES:
            raise ValueError(f"subject {d.subject_id}: unknown label {label!r}")
        predicted_positive = d.predicted_class == POSITIVE_CLASS
        actually_positive = label == POSITIVE_CLASS
        if predicted_positive and actually_positive:
            tp += 1
        elif predicted_positive:
            fp += 1
        elif actually_positive:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


@dataclass(frozen=True)
class MetricsReport:
    """Headline metrics; None marks an undefined (0/0) ratio."""

    accuracy: Optional[float]
    sensitivity: Optional[float]
    specificity: Optional[float]


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, sensitivity (recall on demented) and specificity.

    A zero denominator yields None rather than NaN so reports can spell out
    "undefined" instead of silently propagating.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return MetricsReport(
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
    )


@dataclass(frozen=True)
class AblationRow:
    models: Tuple[str, ...]
    cm: ConfusionMatrix
    report: MetricsReport
    contributions: Tuple[Tuple[str, int], ...]


def default_subsets(registry: Sequence[str]) -> Tuple[Tuple[str, ...], ...]:
    """All nonempty model combinations, smallest first, in registry order."""
    subsets: List[Tuple[str, ...]] = []
    for size in range(1, len(registry) + 1):
        subsets.extend(combinations(registry, size))
    return tuple(subsets)


def ablation(records: Iterable[PredictionRecord],
             truth: Mapping[str, str],
             subsets: Optional[Sequence[Sequence[str]]] = None,
             registry: Optional[Sequence[str]] = None) -> List[AblationRow]:
    """Re-run the committee restricted to each model subset and score it."""
    pool = list(records)
    order = tuple(registry) if registry is not None else _registry_from(pool)
    chosen = [tuple(s) for s in subsets] if subsets is not None \
        else list(default_subsets(order))
    rows: List[AblationRow] = []
    for subset in chosen:
        if not subset:
            raise ValueError("empty model subset")
        if len(set(subset)) != len(subset):
            raise ValueError(f"duplicate models in subset {subset}")
        unknown = sorted(set(subset) - set(order))
        if unknown:
            raise ValueError(f"unknown models in subset: {unknown}")
        # keep the global registry's tie-break priority inside the subset
        priority = tuple(m for m in order if m in subset)
        filtered = [r for r in pool if r.model_id in subset]
        decisions, _ = decide_batch(filtered, registry=priority)
        cm = confusion(decisions, truth)
        counts = contribution_counts(decisions, registry=priority)
        rows.append(AblationRow(models=subset, cm=cm, report=metrics(cm),
                                contributions=tuple(counts.items())))
    return rows


def read_predictions(path: Union[str, Path]) -> List[PredictionRecord]:
    """Parse a predictions file: one JSON object per line.

    Each object carries subject_id, model_id and exactly one of
    "logits": [a, b] or "confidences": [a, b], both in the fixed class order
    (non_demented, demented).  Blank lines are skipped.  Errors carry the
    1-based line number.
    """
    records: List[PredictionRecord] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise FormatError(f"{path}: line {lineno}: expected an object")
        try:
            subject_id = obj["subject_id"]
            model_id = obj["model_id"]
        except KeyError as exc:
            raise FormatError(f"{path}: line {lineno}: missing field {exc}") from exc
        has_logits = "logits" in obj
        has_conf = "confidences" in obj
        if has_logits == has_conf:
            raise FormatError(
                f"{path}: line {lineno}: need exactly one of logits/confidences")
        values = obj["logits"] if has_logits else obj["confidences"]
        if (not isinstance(values, list) or len(values) != len(CLASSES)
                or not all(isinstance(v, (int, float)) for v in values)):
            raise FormatError(
                f"{path}: line {lineno}: expected {len(CLASSES)} numbers")
        try:
            if has_logits:
                rec = PredictionRecord.from_logits(subject_id, model_id, values)
            else:
                rec = PredictionRecord(subject_id=subject_id, model_id=model_id,
                                       confidences=tuple(values))
        except ValueError as exc:
            raise FormatError(f"{path}: line {lineno}: {exc}") from exc
        records.append(rec)
    return records


def read_truth(path: Union[str, Path]) -> Dict[str, str]:
    """Parse a truth CSV with header subject_id,label."""
    truth: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["subject_id", "label"]:
            raise FormatError(f"{path}: expected header subject_id,label")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"{path}: line {lineno}: expected 2 columns")
            subject_id, label = row[0].strip(), row[1].strip()
            if label not in CLASSES:
                raise FormatError(f"{path}: line {lineno}: unknown label {label!r}")
            if subject_id in truth:
                raise FormatError(f"{path}: line {lineno}: duplicate subject "
                                  f"{subject_id}")
            truth[subject_id] = label
    return truth


def _metric_cell(value: Optional[float]) -> str:
    return UNDEFINED if value is None else repr(value)


def write_decisions_csv(path: Union[str, Path],
                        decisions: Mapping[str, CommitteeDecision]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(DECISION_CSV_FIELDS)
        for subject in sorted(decisions):
            d = decisions[subject]
            writer.writerow([d.subject_id, d.chosen_model, d.predicted_class,
                             repr(d.confidence)])


def write_contribution_csv(path: Union[str, Path],
                           counts: Mapping[str, int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CONTRIBUTION_CSV_FIELDS)
        for model, count in counts.items():
            writer.writerow([model, count])


def write_metrics_csv(path: Union[str, Path], cm: ConfusionMatrix,
                      report: MetricsReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_CSV_FIELDS)
        for name in ("tp", "tn", "fp", "fn"):
            writer.writerow([name, getattr(cm, name)])
        writer.writerow(["accuracy", _metric_cell(report.accuracy)])
        writer.writerow(["sensitivity", _metric_cell(report.sensitivity)])
        writer.writerow(["specificity", _metric_cell(report.specificity)])


def write_ablation_csv(path: Union[str, Path],
                       rows: Iterable[AblationRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ABLATION_CSV_FIELDS)
        for row in rows:
            writer.writerow(["+".join(row.models),
                             row.cm.tp, row.cm.tn, row.cm.fp, row.cm.fn,
                             _metric_cell(row.report.accuracy),
                             _metric_cell(row.report.sensitivity),
                             _metric_cell(row.report.specificity)])
