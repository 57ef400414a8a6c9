"""Manifest persistence, corpus statistics, rule-based filtering, k-fold splits.

The manifest is the toolbox interchange format: UTF-8, one JSON object per
line, required keys ``audio_filepath``, ``duration``, ``text``.  Unknown keys
are preserved verbatim on round trips so external tooling can enrich
manifests without losing anything.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyDataset,
    IncompatibleRule,
    KExceedsGroups,
    MalformedLine,
    MissingGroupKey,
    MissingRequiredField,
)

CHAR_RATE_HIGH = 30.0  # chars/second at or above which extra words are suspected
CHAR_RATE_LOW = 5.0  # chars/second at or below which missing words are suspected
SUSPECT_EXTRA_WORDS = "SUSPECT_EXTRA_WORDS"
SUSPECT_MISSING_WORDS = "SUSPECT_MISSING_WORDS"

_REQUIRED = ("audio_filepath", "duration", "text")
_KNOWN_OPTIONAL = ("pred_text", "score", "group_key")


@dataclass
class ManifestEntry:
    """One training sample; extra fields ride along untouched."""

    audio_filepath: str
    duration: float
    text: str
    pred_text: str | None = None
    score: float | None = None
    group_key: str | None = None
    extra: dict = field(default_factory=dict)

    def get(self, name: str):
        """Uniform access across declared fields and extras."""
        if name in _REQUIRED or name in _KNOWN_OPTIONAL:
            return getattr(self, name)
        return self.extra.get(name)

    def replace_extra(self, **updates) -> "ManifestEntry":
        """Copy with extra fields merged in (mutation always builds new entries)."""
        merged = dict(self.extra)
        merged.update(updates)
        return ManifestEntry(
            audio_filepath=self.audio_filepath,
            duration=self.duration,
            text=self.text,
            pred_text=self.pred_text,
            score=self.score,
            group_key=self.group_key,
            extra=merged,
        )

    def with_flag(self, flag: str) -> "ManifestEntry":
        flags = list(self.extra.get("flags", []))
        if flag not in flags:
            flags.append(flag)
        return self.replace_extra(flags=flags)

    def to_record(self) -> dict:
        record = {
            "audio_filepath": self.audio_filepath,
            "duration": self.duration,
            "text": self.text,
        }
        for key in _KNOWN_OPTIONAL:
            value = getattr(self, key)
            if value is not None:
                record[key] = value
        record.update(self.extra)
        return record

    @classmethod
    def from_record(cls, record: dict) -> "ManifestEntry":
        extra = {
            k: v for k, v in record.items() if k not in _REQUIRED and k not in _KNOWN_OPTIONAL
        }
        return cls(
            audio_filepath=record["audio_filepath"],
            duration=float(record["duration"]),
            text=record["text"],
            pred_text=record.get("pred_text"),
            score=record.get("score"),
            group_key=record.get("group_key"),
            extra=extra,
        )


def read_manifest(path: str | Path, allow_empty_text: bool = False) -> list[ManifestEntry]:
    entries: list[ManifestEntry] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as exc:
                raise MalformedLine(lineno, f"invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise MalformedLine(lineno, "line is not a JSON object")
            for name in _REQUIRED:
                if name not in record:
                    raise MissingRequiredField(lineno, name)
            if not record["text"] and not allow_empty_text:
                raise MissingRequiredField(lineno, "text")
            if not isinstance(record["duration"], (int, float)) or record["duration"] <= 0:
                raise MalformedLine(lineno, f"duration must be > 0, got {record['duration']!r}")
            if not record["audio_filepath"]:
                raise MalformedLine(lineno, "audio_filepath must be non-empty")
            entries.append(ManifestEntry.from_record(record))
    return entries


def write_manifest(path: str | Path, entries: Iterable[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for entry in entries:
            f.write(json.dumps(entry.to_record(), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class DatasetStats:
    entry_count: int
    total_hours: float
    alphabet: frozenset[str]
    vocabulary_size: int
    duration_histogram: Histogram
    char_rate_histogram: Histogram
    word_rate_histogram: Histogram

    def to_dict(self) -> dict:
        return {
            "entry_count": self.entry_count,
            "total_hours": self.total_hours,
            "alphabet": sorted(self.alphabet),
            "vocabulary_size": self.vocabulary_size,
            "duration_histogram": {
                "edges": list(self.duration_histogram.edges),
                "counts": list(self.duration_histogram.counts),
            },
            "char_rate_histogram": {
                "edges": list(self.char_rate_histogram.edges),
                "counts": list(self.char_rate_histogram.counts),
            },
            "word_rate_histogram": {
                "edges": list(self.word_rate_histogram.edges),
                "counts": list(self.word_rate_histogram.counts),
            },
        }


def _unit_histogram(values: Sequence[float]) -> Histogram:
    # 1-unit-wide bins from 0 up to the max, rounded up
    top = max(1, math.ceil(max(values))) if values else 1
    counts, edges = np.histogram(values, bins=np.arange(0, top + 1))
    return Histogram(edges=tuple(float(e) for e in edges), counts=tuple(int(c) for c in counts))


def compute_stats(entries: Sequence[ManifestEntry]) -> DatasetStats:
    if not entries:
        raise EmptyDataset("no entries")
    durations = [e.duration for e in entries]
    alphabet: set[str] = set()
    vocab: set[str] = set()
    for e in entries:
        alphabet.update(e.text)
        vocab.update(e.text.split())
    char_rates = [len(e.text) / e.duration for e in entries]
    word_rates = [len(e.text.split()) / e.duration for e in entries]
    return DatasetStats(
        entry_count=len(entries),
        total_hours=sum(durations) / 3600.0,
        alphabet=frozenset(alphabet),
        vocabulary_size=len(vocab),
        duration_histogram=_unit_histogram(durations),
        char_rate_histogram=_unit_histogram(char_rates),
        word_rate_histogram=_unit_histogram(word_rates),
    )


# ---------------------------------------------------------------------------
# filtering


_NUMERIC_OPS = {"<", "<=", ">", ">=", "=", "!="}
_STRING_OPS = {"=", "!=", "contains", "matches-regex"}
_OP_ALIASES = {"≤": "<=", "≥": ">=", "≠": "!=", "==": "=", "matches": "matches-regex"}


@dataclass(frozen=True)
class FilterRule:
    field: str
    op: str
    value: float | int | str
    action: str = "drop"  # or "flag"

    def __post_init__(self):
        object.__setattr__(self, "op", _OP_ALIASES.get(self.op, self.op))
        if self.op not in _NUMERIC_OPS | _STRING_OPS:
            raise IncompatibleRule(f"unknown operator {self.op!r}")
        if self.action not in ("drop", "flag"):
            raise IncompatibleRule(f"action must be drop or flag, got {self.action!r}")
        if self.op in ("contains", "matches-regex") and not isinstance(self.value, str):
            raise IncompatibleRule(f"{self.op} needs a string value")
        if self.op in ("<", "<=", ">", ">=") and not isinstance(self.value, (int, float)):
            raise IncompatibleRule(f"{self.op} needs a numeric value")
        if self.op == "matches-regex":
            try:
                re.compile(self.value)
            except re.error as exc:
                raise IncompatibleRule(f"bad regex {self.value!r}: {exc}") from exc

    def label(self) -> str:
        return f"{self.field}{self.op}{self.value}"

    def evaluate(self, entry) -> bool | None:
        """True/False when the predicate applies, None when the field is absent
        or has an incomparable type (the rule is skipped for that entry).
        Accepts anything with ``.get`` (a ManifestEntry or a plain record dict)."""
        value = entry.get(self.field)
        if value is None:
            return None
        if self.op in ("<", "<=", ">", ">="):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                return None
            rv = self.value
            return {"<": value < rv, "<=": value <= rv, ">": value > rv, ">=": value >= rv}[
                self.op
            ]
        if self.op == "=":
            return value == self.value
        if self.op == "!=":
            return value != self.value
        if not isinstance(value, str):
            return None
        if self.op == "contains":
            return self.value in value
        return re.search(self.value, value) is not None


def rule_from_dict(doc: dict) -> FilterRule:
    try:
        return FilterRule(
            field=doc["field"],
            op=doc["op"],
            value=doc["value"],
            action=doc.get("action", "drop"),
        )
    except KeyError as exc:
        raise IncompatibleRule(f"rule is missing key {exc}") from exc


@dataclass
class FilterReport:
    rule_fired: dict[str, int]
    rule_skipped: dict[str, int]
    kept_count: int
    dropped_count: int
    retained_hours: float
    dropped_hours: float

    def to_dict(self) -> dict:
        return {
            "rule_fired": self.rule_fired,
            "rule_skipped": self.rule_skipped,
            "kept_count": self.kept_count,
            "dropped_count": self.dropped_count,
            "retained_hours": self.retained_hours,
            "dropped_hours": self.dropped_hours,
        }


def apply_filters(
    entries: Sequence[ManifestEntry], rules: Sequence[FilterRule]
) -> tuple[list[ManifestEntry], list[ManifestEntry], FilterReport]:
    """Partition entries by the drop rules; flag rules annotate without removing.

    Any firing drop rule removes the entry (rules are independent); a rule
    whose field is absent on an entry is skipped there and counted.
    """
    fired = {r.label(): 0 for r in rules}
    skipped = {r.label(): 0 for r in rules}
    kept: list[ManifestEntry] = []
    dropped: list[ManifestEntry] = []
    for entry in entries:
        drop = False
        annotated = entry
        for rule in rules:
            verdict = rule.evaluate(entry)
            if verdict is None:
                skipped[rule.label()] += 1
                continue
            if not verdict:
                continue
            fired[rule.label()] += 1
            if rule.action == "drop":
                drop = True
            else:
                annotated = annotated.with_flag(rule.label())
        (dropped if drop else kept).append(entry if drop else annotated)
    return kept, dropped, FilterReport(
        rule_fired=fired,
        rule_skipped=skipped,
        kept_count=len(kept),
        dropped_count=len(dropped),
        retained_hours=sum(e.duration for e in kept) / 3600.0,
        dropped_hours=sum(e.duration for e in dropped) / 3600.0,
    )


def char_rate_screen(
    entries: Sequence[ManifestEntry],
    high: float = CHAR_RATE_HIGH,
    low: float = CHAR_RATE_LOW,
) -> list[ManifestEntry]:
    """Annotate every entry with its character rate and suspicion flags.

    At or above ``high`` chars/second the reference likely contains words that
    were never spoken; at or below ``low`` it likely misses spoken words.
    """
    out: list[ManifestEntry] = []
    for entry in entries:
        rate = len(entry.text) / entry.duration
        annotated = entry.replace_extra(char_rate=rate)
        if rate >= high:
            annotated = annotated.with_flag(SUSPECT_EXTRA_WORDS)
        elif rate <= low:
            annotated = annotated.with_flag(SUSPECT_MISSING_WORDS)
        out.append(annotated)
    return out


# ---------------------------------------------------------------------------
# grouped k-fold splitting


def kfold_split(
    entries: Sequence[ManifestEntry], k: int, group_field: str = "group_key"
) -> list[list[ManifestEntry]]:
    """Partition entries into k folds with no group spanning folds.

    Groups are packed longest-duration-first into the currently lightest fold,
    which balances fold durations under the group-disjointness constraint.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    group_duration: dict[str, float] = {}
    group_entries: dict[str, list[ManifestEntry]] = {}
    for entry in entries:
        key = entry.get(group_field)
        if key is None:
            raise MissingGroupKey(f"entry {entry.audio_filepath!r} has no {group_field!r}")
        key = str(key)
        group_duration[key] = group_duration.get(key, 0.0) + entry.duration
        group_entries.setdefault(key, []).append(entry)
    if k > len(group_duration):
        raise KExceedsGroups(f"{k} folds requested but only {len(group_duration)} groups exist")
    loads = [0.0] * k
    assignment: dict[str, int] = {}
    for key, dur in sorted(group_duration.items(), key=lambda kv: (-kv[1], kv[0])):
        fold = min(range(k), key=lambda i: loads[i])
        assignment[key] = fold
        loads[fold] += dur
    folds: list[list[ManifestEntry]] = [[] for _ in range(k)]
    for entry in entries:  # fold contents keep the input order
        folds[assignment[str(entry.get(group_field))]].append(entry)
    return folds
