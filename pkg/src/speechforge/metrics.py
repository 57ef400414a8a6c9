"""Reference-vs-hypothesis error analysis.

Levenshtein alignment with a deterministic backtrace, per-utterance
WER/CER/WMR/accuracy, dataset-level micro-averages, and per-word accuracy
tables for spotting systematic transcription errors.

Word match rate is the symmetric ratio 2*matches/(ref_words + hyp_words);
word accuracy is matches/ref_words.  Both definitions are documented in the
README since different toolkits disagree on them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, EmptyReference

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"


@dataclass(frozen=True)
class EditOp:
    kind: str
    ref: str | None = None
    hyp: str | None = None


@dataclass(frozen=True)
class ErrorReport:
    """Counts and rates for one utterance (or a micro-averaged collection)."""

    substitutions: int
    deletions: int
    insertions: int
    matches: int
    ref_len: int
    hyp_len: int
    char_edits: int
    char_ref_len: int
    wer: float
    cer: float
    wmr: float
    accuracy: float
    char_rate: float | None = None
    duration: float | None = None

    def manifest_fields(self) -> dict:
        """The metric keys written into manifest records."""
        fields = {
            "wer": self.wer,
            "cer": self.cer,
            "wmr": self.wmr,
            "accuracy": self.accuracy,
            "ins": self.insertions,
            "del": self.deletions,
            "sub": self.substitutions,
        }
        if self.char_rate is not None:
            fields["char_rate"] = self.char_rate
        return fields


def edit_alignment(ref: Sequence[str], hyp: Sequence[str]) -> list[EditOp]:
    """Levenshtein-minimal alignment with unit costs.

    Ties during the backtrace are broken deterministically: match over
    substitute over delete over insert, so diffs are stable across runs.
    """
    n, m = len(ref), len(hyp)
    if n == 0 and m == 0:
        return []
    dist = _distance_matrix(ref, hyp)
    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dist[i, j] == dist[i - 1, j - 1]:
            ops.append(EditOp(MATCH, ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and dist[i, j] == dist[i - 1, j - 1] + 1:
            ops.append(EditOp(SUBSTITUTE, ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and dist[i, j] == dist[i - 1, j] + 1:
            ops.append(EditOp(DELETE, ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(INSERT, None, hyp[j - 1]))
            j -= 1
    ops.reverse()
    return ops


def _distance_matrix(ref: Sequence[str], hyp: Sequence[str]) -> np.ndarray:
    n, m = len(ref), len(hyp)
    dist = np.zeros((n + 1, m + 1), dtype=np.int32)
    dist[0, :] = np.arange(m + 1)
    dist[:, 0] = np.arange(n + 1)
    if m == 0 or n == 0:
        return dist
    hyp_arr = np.asarray(hyp, dtype=object)
    js = np.arange(m + 1)
    for i in range(1, n + 1):
        cost = (hyp_arr != ref[i - 1]).astype(np.int32)
        base = np.minimum(dist[i - 1, 1:] + 1, dist[i - 1, :-1] + cost)
        # fold in insertions: dist[i, j] = min_{k<=j} a[k] + (j - k)
        a = np.concatenate(([np.int32(i)], base))
        dist[i] = np.minimum.accumulate(a - js) + js
    return dist


def _counts(ops: list[EditOp]) -> tuple[int, int, int, int]:
    s = sum(1 for op in ops if op.kind == SUBSTITUTE)
    d = sum(1 for op in ops if op.kind == DELETE)
    i = sum(1 for op in ops if op.kind == INSERT)
    mt = sum(1 for op in ops if op.kind == MATCH)
    return s, d, i, mt


def utterance_metrics(ref_text: str, hyp_text: str, duration: float | None = None) -> ErrorReport:
    """Word and character error rates for one (reference, hypothesis) pair.

    Words are maximal non-whitespace runs; the character distance runs over
    the literal texts, interior spaces included.  ``char_rate`` is reference
    characters per second and is only set when ``duration`` is given.
    """
    ref_words = ref_text.split()
    hyp_words = hyp_text.split()
    n = len(ref_words)
    if n == 0:
        raise EmptyReference("reference text has no words")
    h = len(hyp_words)
    s, d, i, mt = _counts(edit_alignment(ref_words, hyp_words))
    char_dist = int(_distance_matrix(list(ref_text), list(hyp_text))[-1, -1])
    char_ref_len = len(ref_text)
    return ErrorReport(
        substitutions=s,
        deletions=d,
        insertions=i,
        matches=mt,
        ref_len=n,
        hyp_len=h,
        char_edits=char_dist,
        char_ref_len=char_ref_len,
        wer=(s + d + i) / n,
        cer=char_dist / char_ref_len,
        wmr=2.0 * mt / (n + h),
        accuracy=mt / n,
        char_rate=(char_ref_len / duration) if duration else None,
        duration=duration,
    )


def aggregate_metrics(reports: Sequence[ErrorReport]) -> ErrorReport:
    """Micro-average: counts are summed and every rate is recomputed from the sums."""
    if not reports:
        raise EmptyInput("no reports to aggregate")
    s = sum(r.substitutions for r in reports)
    d = sum(r.deletions for r in reports)
    i = sum(r.insertions for r in reports)
    mt = sum(r.matches for r in reports)
    n = sum(r.ref_len for r in reports)
    h = sum(r.hyp_len for r in reports)
    ce = sum(r.char_edits for r in reports)
    cn = sum(r.char_ref_len for r in reports)
    durations = [r.duration for r in reports]
    total_dur = sum(durations) if all(x is not None for x in durations) else None
    return ErrorReport(
        substitutions=s,
        deletions=d,
        insertions=i,
        matches=mt,
        ref_len=n,
        hyp_len=h,
        char_edits=ce,
        char_ref_len=cn,
        wer=(s + d + i) / n if n else 0.0,
        cer=ce / cn if cn else 0.0,
        wmr=2.0 * mt / (n + h) if n + h else 0.0,
        accuracy=mt / n if n else 0.0,
        char_rate=(cn / total_dur) if total_dur else None,
        duration=total_dur,
    )


@dataclass(frozen=True)
class WordStats:
    occurrences: int
    matched: int

    @property
    def accuracy(self) -> float:
        return self.matched / self.occurrences if self.occurrences else 0.0


def word_accuracy_table(pairs: Sequence[tuple[str, str]]) -> dict[str, WordStats]:
    """Per reference word: how often it occurs and how often it aligned as a match.

    Words that are never matched surface systematic errors (bad normalization,
    spelling variants, OCR damage) when sorted by occurrences.
    """
    occ: dict[str, int] = {}
    hit: dict[str, int] = {}
    for ref_text, hyp_text in pairs:
        ops = edit_alignment(ref_text.split(), hyp_text.split())
        for op in ops:
            if op.ref is None:
                continue
            occ[op.ref] = occ.get(op.ref, 0) + 1
            if op.kind == MATCH:
                hit[op.ref] = hit.get(op.ref, 0) + 1
    return {w: WordStats(occurrences=c, matched=hit.get(w, 0)) for w, c in occ.items()}
