"""Cohort construction from scan-session metadata.

Filtering order: session match, first visit per subject, minimum age, then
CDR labeling.  Every input record lands in exactly one of the cohort or the
exclusion log, so dataset counts stay auditable end to end.
"""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import FormatError

CLASSES = ("non_demented", "demented")
ALLOWED_CDR = (0.0, 0.5, 1.0, 2.0)
SOURCES = ("oasis1", "oasis2", "other")

EXCLUDE_SESSION = "session_mismatch"
EXCLUDE_VISIT = "not_first_visit"
EXCLUDE_AGE = "under_min_age"
EXCLUDE_CDR = "missing_cdr"

METADATA_CSV_FIELDS = ("subject_id", "visit_id", "session_id", "age", "cdr", "source")
COHORT_CSV_FIELDS = METADATA_CSV_FIELDS[:4] + ("cdr", "label", "source")
EXCLUSION_CSV_FIELDS = ("subject_id", "visit_id", "session_id", "rule")
SPLIT_CSV_FIELDS = ("subject_id", "label", "partition")


@dataclass(frozen=True)
class SubjectRecord:
    """One scan session row from a metadata table."""

    subject_id: str
    visit_id: int
    session_id: str
    age: float
    cdr: Optional[float]
    source: str

    def __post_init__(self):
        if not self.subject_id:
            raise ValueError("empty subject_id")
        if int(self.visit_id) != self.visit_id or self.visit_id < 1:
            raise ValueError(f"visit_id must be a positive integer, got {self.visit_id}")
        object.__setattr__(self, "visit_id", int(self.visit_id))
        if not self.session_id:
            raise ValueError("empty session_id")
        age = float(self.age)
        if not math.isfinite(age) or age < 0:
            raise ValueError(f"age must be nonnegative, got {self.age}")
        object.__setattr__(self, "age", age)
        if self.cdr is not None:
            cdr = float(self.cdr)
            if cdr not in ALLOWED_CDR:
                raise ValueError(f"cdr must be one of {ALLOWED_CDR}, got {self.cdr}")
            object.__setattr__(self, "cdr", cdr)
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")


def label_from_cdr(cdr: Optional[float]) -> str:
    """Clinical dementia rating to class: 0 is non_demented, 0.5/1/2 demented."""
    if cdr is None:
        raise ValueError("missing cdr")
    value = float(cdr)
    if value == 0.0:
        return "non_demented"
    if value in ALLOWED_CDR:
        return "demented"
    raise ValueError(f"cdr must be one of {ALLOWED_CDR}, got {cdr}")


@dataclass(frozen=True)
class CohortRules:
    min_age: float = 60.0
    required_session: str = "mpr-1"
    first_visit_only: bool = True

    def __post_init__(self):
        if not math.isfinite(float(self.min_age)) or self.min_age < 0:
            raise ValueError(f"min_age must be nonnegative, got {self.min_age}")
        if not self.required_session:
            raise ValueError("empty required_session")


@dataclass(frozen=True)
class CohortEntry:
    record: SubjectRecord
    label: str


@dataclass(frozen=True)
class Exclusion:
    record: SubjectRecord
    rule: str


def build_cohort(records: Iterable[SubjectRecord],
                 rules: CohortRules = CohortRules(),
                 ) -> Tuple[List[CohortEntry], List[Exclusion]]:
    """Filter and label metadata records.

    Returns the cohort sorted by subject_id and the exclusion log in input
    order.  With the default rules each subject contributes at most one entry.
    """
    pool = list(records)
    seen = set()
    for rec in pool:
        key = (rec.subject_id, rec.visit_id, rec.session_id)
        if key in seen:
            raise ValueError(f"duplicate metadata row {key}")
        seen.add(key)

    exclusions: List[Exclusion] = []
    stage = []
    for rec in pool:
        if rec.session_id == rules.required_session:
            stage.append(rec)
        else:
            exclusions.append(Exclusion(rec, EXCLUDE_SESSION))

    if rules.first_visit_only:
        first_visit: Dict[str, SubjectRecord] = {}
        for rec in stage:
            best = first_visit.get(rec.subject_id)
            if best is None or rec.visit_id < best.visit_id:
                first_visit[rec.subject_id] = rec
        kept = []
        for rec in stage:
            if first_visit[rec.subject_id] is rec:
                kept.append(rec)
            else:
                exclusions.append(Exclusion(rec, EXCLUDE_VISIT))
        stage = kept

    kept = []
    for rec in stage:
        if rec.age >= rules.min_age:
            kept.append(rec)
        else:
            exclusions.append(Exclusion(rec, EXCLUDE_AGE))
    stage = kept

    entries: List[CohortEntry] = []
    for rec in stage:
        if rec.cdr is None:
            exclusions.append(Exclusion(rec, EXCLUDE_CDR))
        else:
            entries.append(CohortEntry(record=rec, label=label_from_cdr(rec.cdr)))

    entries.sort(key=lambda e: e.record.subject_id)
    return entries, exclusions


@dataclass(frozen=True)
class SplitResult:
    train: Tuple[CohortEntry, ...]
    test: Tuple[CohortEntry, ...]
    warnings: Tuple[str, ...] = ()


def _class_targets(sizes: Dict[str, int], fraction: float) -> Dict[str, int]:
    # per-class round, then nudge so the targets sum to round(total * fraction)
    total_target = round(sum(sizes.values()) * fraction)
    targets = {cls: min(round(n * fraction), n) for cls, n in sizes.items()}
    remainders = {cls: sizes[cls] * fraction - targets[cls] for cls in sizes}
    order = sorted(sizes, key=lambda cls: (-remainders[cls], cls))
    while sum(targets.values()) < total_target:
        for cls in order:
            if targets[cls] < sizes[cls]:
                targets[cls] += 1
                break
        else:
            break
    order = sorted(sizes, key=lambda cls: (remainders[cls], cls))
    while sum(targets.values()) > total_target:
        for cls in order:
            if targets[cls] > 0:
                targets[cls] -= 1
                break
        else:
            break
    return targets


def stratified_split(cohort: Sequence[CohortEntry], test_fraction: float = 0.10,
                     seed: int = 0) -> SplitResult:
    """Partition the cohort into train/test preserving class balance.

    Per-class test counts are round(class_size * fraction), adjusted by at
    most one so the test set totals round(cohort_size * fraction).  The
    shuffle is seeded, so identical inputs give identical partitions.
    """
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in [0, 1), got {test_fraction}")
    if not cohort:
        raise ValueError("empty cohort")
    by_class: Dict[str, List[CohortEntry]] = {}
    for entry in cohort:
        by_class.setdefault(entry.label, []).append(entry)
    warnings = []
    if test_fraction > 0:
        floor = 1.0 / test_fraction
        for cls in sorted(by_class):
            if len(by_class[cls]) < floor:
                warnings.append(
                    f"class {cls}: only {len(by_class[cls])} subjects, "
                    f"cannot stratify at fraction {test_fraction}")
    sizes = {cls: len(members) for cls, members in by_class.items()}
    targets = _class_targets(sizes, test_fraction)
    rng = random.Random(seed)
    train: List[CohortEntry] = []
    test: List[CohortEntry] = []
    for cls in sorted(by_class):
        members = sorted(by_class[cls], key=lambda e: e.record.subject_id)
        rng.shuffle(members)
        test.extend(members[:targets[cls]])
        train.extend(members[targets[cls]:])
    train.sort(key=lambda e: e.record.subject_id)
    test.sort(key=lambda e: e.record.subject_id)
    return SplitResult(train=tuple(train), test=tuple(test),
                       warnings=tuple(warnings))


def _num_cell(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _parse_cdr(cell: str) -> Optional[float]:
    text = cell.strip()
    return None if not text else float(text)


def read_metadata(path: Union[str, Path]) -> List[SubjectRecord]:
    """Parse a metadata CSV; errors carry the 1-based line number."""
    records: List[SubjectRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != METADATA_CSV_FIELDS:
            raise FormatError(
                f"{path}: expected header {','.join(METADATA_CSV_FIELDS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(METADATA_CSV_FIELDS):
                raise FormatError(f"{path}: line {lineno}: expected "
                                  f"{len(METADATA_CSV_FIELDS)} columns")
            try:
                records.append(SubjectRecord(
                    subject_id=row[0].strip(),
                    visit_id=int(row[1]),
                    session_id=row[2].strip(),
                    age=float(row[3]),
                    cdr=_parse_cdr(row[4]),
                    source=row[5].strip(),
                ))
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
    return records


def write_cohort_csv(path: Union[str, Path],
                     entries: Iterable[CohortEntry]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COHORT_CSV_FIELDS)
        for entry in entries:
            rec = entry.record
            writer.writerow([rec.subject_id, rec.visit_id, rec.session_id,
                             _num_cell(rec.age), _num_cell(rec.cdr),
                             entry.label, rec.source])


def write_exclusions_csv(path: Union[str, Path],
                         exclusions: Iterable[Exclusion]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(EXCLUSION_CSV_FIELDS)
        for exc in exclusions:
            rec = exc.record
            writer.writerow([rec.subject_id, rec.visit_id, rec.session_id,
                             exc.rule])


def write_split_csv(path: Union[str, Path], split: SplitResult) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SPLIT_CSV_FIELDS)
        for partition, entries in (("train", split.train), ("test", split.test)):
            for entry in entries:
                writer.writerow([entry.record.subject_id, entry.label, partition])
