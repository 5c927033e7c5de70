"""Synthetic metadata shaped like the two public OASIS releases.

oasis1: 416 single-visit subjects, every scan on the mpr-1 protocol; 198 are
aged 60 or over (95 with a nonzero dementia rating, 103 rated 0.0) and the
remaining 218 are younger controls that age screening removes.

oasis2: 150 subjects with two visits each.  146 were scanned on mpr-1 (69
rated demented, 77 rated 0.0, all aged 60+); the last 4 only have mpr-2
scans, so the session filter drops them entirely.

Combining both gives a 344-subject cohort (164 demented / 180 non-demented)
and a 310/34 split at a 0.1 test fraction (16 + 18 test subjects).
"""
from __future__ import annotations

from typing import List

from slicescout import SubjectRecord

OASIS1_TOTAL = 416
OASIS1_COHORT = 198
OASIS1_DEMENTED = 95
OASIS1_NON_DEMENTED = 103

OASIS2_SUBJECTS = 150
OASIS2_COHORT = 146
OASIS2_DEMENTED = 69
OASIS2_NON_DEMENTED = 77

COMBINED_COHORT = 344
COMBINED_DEMENTED = 164
COMBINED_NON_DEMENTED = 180
SPLIT_TRAIN = 310
SPLIT_TEST = 34
SPLIT_TEST_DEMENTED = 16
SPLIT_TEST_NON_DEMENTED = 18


def _o1_cdr(i: int) -> float:
    if i > OASIS1_DEMENTED:
        return 0.0
    if i % 17 == 0:
        return 1.0
    return 2.0 if i == 20 else 0.5


def oasis1_rows() -> List[SubjectRecord]:
    rows = []
    for i in range(1, OASIS1_TOTAL + 1):
        if i <= OASIS1_COHORT:
            age, cdr = 60 + (i % 31), _o1_cdr(i)
        else:
            age, cdr = 25 + (i % 35), 0.0
        rows.append(SubjectRecord(subject_id=f"OAS1_{i:04d}", visit_id=1,
                                  session_id="mpr-1", age=float(age), cdr=cdr,
                                  source="oasis1"))
    return rows


def oasis2_rows() -> List[SubjectRecord]:
    rows = []
    for i in range(1, OASIS2_SUBJECTS + 1):
        session = "mpr-1" if i <= OASIS2_COHORT else "mpr-2"
        if i <= OASIS2_DEMENTED:
            cdr = 0.5 if i % 3 else 1.0
        else:
            cdr = 0.0
        for visit in (1, 2):
            rows.append(SubjectRecord(subject_id=f"OAS2_{i:04d}", visit_id=visit,
                                      session_id=session,
                                      age=float(60 + (i % 29) + (visit - 1)),
                                      cdr=cdr, source="oasis2"))
    return rows


def combined_rows() -> List[SubjectRecord]:
    return oasis1_rows() + oasis2_rows()


def metadata_csv(rows: List[SubjectRecord]) -> str:
    def cdr_cell(rec):
        return "" if rec.cdr is None else f"{rec.cdr:g}"

    lines = ["subject_id,visit_id,session_id,age,cdr,source"]
    lines += [f"{r.subject_id},{r.visit_id},{r.session_id},{r.age:g},"
              f"{cdr_cell(r)},{r.source}" for r in rows]
    return "\n".join(lines) + "\n"
