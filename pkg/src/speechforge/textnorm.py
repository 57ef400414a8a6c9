"""Config-driven text preparation.

Turns raw book text into short, alignable utterances over a fixed character
alphabet: abbreviation substitution, per-digit number expansion,
transliteration, case folding, out-of-alphabet dropping, and sentence
splitting, in that order.  Every output utterance keeps a byte span into the
raw text and a set of flags recording which transforms fired, so suspect
segments (e.g. ones that contained digits) can be filtered downstream.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, EmptyDocument

DEFAULT_SENTENCE_END_MARKS = ".!?…"

HAD_DIGITS = "HAD_DIGITS"
HAD_TRANSLITERATION = "HAD_TRANSLITERATION"
HAD_SUBSTITUTION = "HAD_SUBSTITUTION"
HAD_OOV_DROP = "HAD_OOV_DROP"

_DIGITS = "0123456789"

# internal flag bits; exposed as the string names above
_F_DIGITS = 1
_F_TRANSLIT = 2
_F_SUB = 4
_F_OOV = 8

_FLAG_NAMES = (
    (_F_DIGITS, HAD_DIGITS),
    (_F_TRANSLIT, HAD_TRANSLITERATION),
    (_F_SUB, HAD_SUBSTITUTION),
    (_F_OOV, HAD_OOV_DROP),
)


@dataclass(frozen=True)
class NormalizationConfig:
    """Everything :func:`normalize` needs to know about the target language."""

    digit_lexicon: Mapping[str, str] = field(default_factory=dict)
    substitutions: Sequence[tuple[str, str]] = ()
    transliteration: Mapping[str, str] = field(default_factory=dict)
    sentence_end_marks: frozenset[str] = frozenset(DEFAULT_SENTENCE_END_MARKS)
    alphabet: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.alphabet:
            raise ConfigError("alphabet must not be empty")
        if " " not in self.alphabet:
            raise ConfigError("alphabet must contain the space character")
        if self.digit_lexicon and set(self.digit_lexicon) != set(_DIGITS):
            raise ConfigError("digit_lexicon must map exactly the digits 0-9")
        for pattern, _ in self.substitutions:
            if not pattern:
                raise ConfigError("substitution patterns must be non-empty")
        for ch in self.transliteration:
            if len(ch) != 1:
                raise ConfigError(f"transliteration keys must be single characters, got {ch!r}")


@dataclass(frozen=True)
class NormalizedUtterance:
    """One alignable sentence plus where it came from and what touched it."""

    text: str
    source_span: tuple[int, int]  # byte offsets into the raw UTF-8 text
    flags: frozenset[str] = frozenset()


def load_config(path: str | Path) -> NormalizationConfig:
    """Load a normalization config from a JSON file (see README for the schema)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load normalization config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("normalization config must be a JSON object")
    subs = doc.get("substitutions", [])
    if not isinstance(subs, list) or any(
        not (isinstance(p, list) and len(p) == 2) for p in subs
    ):
        raise ConfigError("'substitutions' must be an array of [pattern, replacement] pairs")
    return NormalizationConfig(
        digit_lexicon=dict(doc.get("digit_lexicon", {})),
        substitutions=tuple((p, r) for p, r in subs),
        transliteration=dict(doc.get("transliteration", {})),
        sentence_end_marks=frozenset(doc.get("sentence_end_marks", DEFAULT_SENTENCE_END_MARKS)),
        alphabet=frozenset(doc.get("alphabet", "")),
    )


def save_config(path: str | Path, config: NormalizationConfig) -> None:
    """Write a config back to JSON; substitution order is preserved exactly."""
    doc = {
        "digit_lexicon": dict(config.digit_lexicon),
        "substitutions": [[p, r] for p, r in config.substitutions],
        "transliteration": dict(config.transliteration),
        "sentence_end_marks": "".join(sorted(config.sentence_end_marks)),
        "alphabet": "".join(sorted(config.alphabet)),
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# single-string operations


def expand_numbers(text: str, lexicon: Mapping[str, str]) -> str:
    """Replace each maximal digit run with its space-joined per-digit words.

    A separating space is inserted next to the expansion when the adjacent
    original character is not already a space, so '19' becomes 'one nine'
    while 'v2' becomes 'v two'.
    """
    missing = set(_DIGITS) - set(lexicon)
    if missing:
        raise ConfigError(f"digit lexicon is missing {sorted(missing)}")
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in lexicon:
            j = i
            while j < n and text[j] in lexicon:
                j += 1
            words = " ".join(lexicon[d] for d in text[i:j])
            if i > 0 and text[i - 1] != " ":
                out.append(" ")
            out.append(words)
            if j < n and text[j] != " ":
                out.append(" ")
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _substitution_lookup(table: Sequence[tuple[str, str]]) -> dict[str, list[tuple[str, str]]]:
    by_first: dict[str, list[tuple[str, str]]] = {}
    for pattern, replacement in table:
        if not pattern:
            raise ConfigError("substitution patterns must be non-empty")
        by_first.setdefault(pattern[0], []).append((pattern, replacement))
    for cands in by_first.values():
        cands.sort(key=lambda pr: len(pr[0]), reverse=True)
    return by_first


def apply_substitutions(text: str, table: Sequence[tuple[str, str]]) -> str:
    """Single left-to-right pass, longest pattern first; replacements are never rescanned."""
    if not table:
        return text
    by_first = _substitution_lookup(table)
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        hit = None
        for pattern, replacement in by_first.get(text[i], ()):
            if text.startswith(pattern, i):
                hit = (pattern, replacement)
                break
        if hit is None:
            out.append(text[i])
            i += 1
        else:
            out.append(hit[1])
            i += len(hit[0])
    return "".join(out)


def transliterate(text: str, table: Mapping[str, str]) -> str:
    """Map single characters through the table; unmapped characters pass through."""
    return "".join(table.get(ch, ch) for ch in text)


def split_sentences(text: str, marks: Iterable[str]) -> list[tuple[str, tuple[int, int]]]:
    """Partition at each maximal run of sentence-end marks (run binds left).

    Returns stripped fragments with byte spans into ``text``; whitespace-only
    fragments are dropped.
    """
    mark_set = frozenset(marks)
    offs = _byte_offsets(text)
    fragments: list[tuple[str, tuple[int, int]]] = []

    def emit(lo: int, hi: int) -> None:
        # trim surrounding whitespace, keep byte offsets of the kept core
        while lo < hi and text[lo].isspace():
            lo += 1
        while hi > lo and text[hi - 1].isspace():
            hi -= 1
        if lo < hi:
            fragments.append((text[lo:hi], (offs[lo], offs[hi])))

    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in mark_set:
            j = i
            while j < n and text[j] in mark_set:
                j += 1
            emit(start, j)
            start = j
            i = j
        else:
            i += 1
    emit(start, n)
    return fragments


# ---------------------------------------------------------------------------
# the full pipeline
#
# normalize() threads per-character records through every transform so each
# output utterance can report a byte span into the raw text and the set of
# transforms that fired inside it.  A record is (char, byte_start, byte_end,
# flag_bits); characters produced by a replacement all share the span of the
# matched source text, and dropped characters survive as empty-text records
# so their flags still reach the right utterance.


def _byte_offsets(text: str) -> list[int]:
    offs = [0] * (len(text) + 1)
    pos = 0
    for i, ch in enumerate(text):
        offs[i] = pos
        pos += len(ch.encode("utf-8"))
    offs[len(text)] = pos
    return offs


def normalize(raw: str, config: NormalizationConfig) -> list[NormalizedUtterance]:
    """Run the whole preparation pipeline on one document.

    Order is fixed: substitutions, number expansion, transliteration, case
    folding, out-of-alphabet handling, sentence splitting.  Substitutions run
    first because abbreviations may contain digits or foreign letters.

    Raises :class:`EmptyDocument` if nothing alignable remains.
    """
    offs = _byte_offsets(raw)
    records = _apply_substitutions_records(raw, offs, config.substitutions)
    if config.digit_lexicon:
        records = _expand_numbers_records(records, config.digit_lexicon)
    if config.transliteration:
        records = _transliterate_records(records, config.transliteration)
    records = _casefold_records(records)
    records = _alphabet_records(records, config.alphabet, config.sentence_end_marks)
    utterances = _split_records(records, config.sentence_end_marks, config.alphabet)
    if not utterances:
        raise EmptyDocument("no alignable content")
    return utterances


_Record = tuple[str, int, int, int]  # (text, byte_start, byte_end, flag_bits)


def _apply_substitutions_records(
    raw: str, offs: list[int], table: Sequence[tuple[str, str]]
) -> list[_Record]:
    records: list[_Record] = []
    by_first = _substitution_lookup(table) if table else {}
    i = 0
    n = len(raw)
    while i < n:
        hit = None
        for pattern, replacement in by_first.get(raw[i], ()):
            if raw.startswith(pattern, i):
                hit = (pattern, replacement)
                break
        if hit is None:
            records.append((raw[i], offs[i], offs[i + 1], 0))
            i += 1
        else:
            pattern, replacement = hit
            span = (offs[i], offs[i + len(pattern)])
            for ch in replacement:
                records.append((ch, span[0], span[1], _F_SUB))
            if not replacement:
                records.append(("", span[0], span[1], _F_SUB))
            i += len(pattern)
    return records


def _expand_numbers_records(records: list[_Record], lexicon: Mapping[str, str]) -> list[_Record]:
    out: list[_Record] = []
    i = 0
    n = len(records)
    while i < n:
        ch = records[i][0]
        if ch and ch in lexicon:
            j = i
            while j < n and records[j][0] and records[j][0] in lexicon:
                j += 1
            prev_ch = out[-1][0] if out else ""
            if prev_ch and prev_ch != " ":
                out.append((" ", records[i][1], records[i][1], _F_DIGITS))
            for k in range(i, j):
                word = lexicon[records[k][0]]
                if k > i:
                    out.append((" ", records[k][1], records[k][1], _F_DIGITS))
                for wch in word:
                    out.append((wch, records[k][1], records[k][2], records[k][3] | _F_DIGITS))
            next_ch = records[j][0] if j < n else ""
            if next_ch and next_ch != " ":
                out.append((" ", records[j - 1][2], records[j - 1][2], _F_DIGITS))
            i = j
        else:
            out.append(records[i])
            i += 1
    return out


def _transliterate_records(records: list[_Record], table: Mapping[str, str]) -> list[_Record]:
    out: list[_Record] = []
    for ch, b0, b1, fl in records:
        if ch in table:
            mapped = table[ch]
            for mch in mapped:
                out.append((mch, b0, b1, fl | _F_TRANSLIT))
            if not mapped:
                out.append(("", b0, b1, fl | _F_TRANSLIT))
        else:
            out.append((ch, b0, b1, fl))
    return out


def _casefold_records(records: list[_Record]) -> list[_Record]:
    out: list[_Record] = []
    for ch, b0, b1, fl in records:
        folded = ch.casefold()
        if folded == ch:
            out.append((ch, b0, b1, fl))
        else:
            for fch in folded:
                out.append((fch, b0, b1, fl))
    return out


def _alphabet_records(
    records: list[_Record], alphabet: frozenset[str], marks: frozenset[str]
) -> list[_Record]:
    out: list[_Record] = []
    for ch, b0, b1, fl in records:
        if not ch:
            out.append((ch, b0, b1, fl))
        elif ch.isspace():
            out.append((" ", b0, b1, fl))  # whitespace is unified, never flagged
        elif ch in alphabet or ch in marks:
            out.append((ch, b0, b1, fl))
        else:
            out.append(("", b0, b1, fl | _F_OOV))
    return out


def _flag_names(bits: int) -> frozenset[str]:
    return frozenset(name for bit, name in _FLAG_NAMES if bits & bit)


def _finalize_sentence(
    records: list[_Record], marks: frozenset[str], alphabet: frozenset[str], prev_end: int
) -> NormalizedUtterance | None:
    bits = 0
    for _, _, _, fl in records:
        bits |= fl
    content = [(ch, b0, b1) for ch, b0, b1, _ in records if ch]
    if not any(ch in alphabet and ch != " " for ch, _, _ in content):
        return None
    # collapse whitespace runs, strip, and drop spaces before the trailing mark run
    chars: list[str] = []
    spans: list[tuple[int, int]] = []
    for ch, b0, b1 in content:
        if ch == " " and (not chars or chars[-1] == " "):
            continue
        chars.append(ch)
        spans.append((b0, b1))
    while chars and chars[-1] == " ":
        chars.pop()
        spans.pop()
    tail = len(chars)
    while tail > 0 and chars[tail - 1] in marks:
        tail -= 1
    while tail > 0 and chars[tail - 1] == " ":
        del chars[tail - 1]
        del spans[tail - 1]
        tail -= 1
    text = "".join(chars)
    real = [(b0, b1) for b0, b1 in spans if b1 > b0]
    lo = min(b0 for b0, _ in real) if real else spans[0][0]
    hi = max(b1 for _, b1 in real) if real else spans[-1][1]
    # keep spans strictly ordered even if a replacement straddled a split point
    if lo < prev_end:
        lo = prev_end
    if hi <= lo:
        hi = lo + 1
    return NormalizedUtterance(text=text, source_span=(lo, hi), flags=_flag_names(bits))


def _split_records(
    records: list[_Record], marks: frozenset[str], alphabet: frozenset[str]
) -> list[NormalizedUtterance]:
    utterances: list[NormalizedUtterance] = []
    prev_end = 0
    current: list[_Record] = []
    i = 0
    n = len(records)
    while i < n:
        ch = records[i][0]
        if ch and ch in marks:
            while i < n and records[i][0] and records[i][0] in marks:
                current.append(records[i])
                i += 1
            utt = _finalize_sentence(current, marks, alphabet, prev_end)
            if utt is not None:
                utterances.append(utt)
                prev_end = utt.source_span[1]
            current = []
        else:
            current.append(records[i])
            i += 1
    if current:
        utt = _finalize_sentence(current, marks, alphabet, prev_end)
        if utt is not None:
            utterances.append(utt)
    return utterances
