"""Character-level forced alignment over CTC log-probability matrices.

The aligner consumes a frames-by-vocabulary matrix of per-frame character
log-probabilities (produced by any CTC acoustic model) plus the tokenized
utterances in audio order, and recovers a time span and confidence score for
each utterance via banded trellis dynamic programming and backtracking.

Trellis definition, for concatenated tokens c_1..c_M over frames 0..T-1:

    A[m][t] = max( A[m][t-1] + max(logP[t][blank], logP[t][c_m]),   # stay
                   A[m-1][t-1] + logP[t][c_m] )                     # advance
    A[0][t] = 0 for all t                 # leading untranscribed audio is free
    end at t* = argmax_t A[M][t]          # trailing audio is free too

Ties resolve in favor of stay, so boundaries are never pushed later than the
evidence requires and backtracking is deterministic.  Each character's
recovered frame is the frame of its advance transition.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    BadMagic,
    ConfigError,
    DimensionOverflow,
    EmptyUtteranceList,
    MalformedLine,
    MismatchedRunShapes,
    OovCharacter,
    TextLongerThanAudio,
    TruncatedFile,
    UnsupportedVersion,
)

LOGPROB_FLOOR = -30.0  # stands in for -inf; dwarfs any realistic path difference
_INADMISSIBLE = -1.0e30  # trellis cells outside the band

BLANK_LITERAL = "<blank>"
SPACE_LITERAL = "<space>"

_MAGIC = b"CTCL"
_VERSION = 1
_FLAG_NORMALIZED = 1
_HEADER = struct.Struct("<4sHHQQd")  # magic, version, flags, T, V, frame_duration
_MAX_DIM = 1 << 32
_MAX_CELLS = 1 << 33


@dataclass(frozen=True)
class Vocabulary:
    """Ordered single-character tokens; line number equals token id."""

    tokens: tuple[str, ...]
    blank_index: int = 0

    def __post_init__(self):
        if len(self.tokens) < 2:
            raise ConfigError("vocabulary needs at least two tokens")
        if not 0 <= self.blank_index < len(self.tokens):
            raise ConfigError("blank_index out of range")
        if len(set(self.tokens)) != len(self.tokens):
            raise ConfigError("vocabulary tokens must be unique")
        if " " not in self.tokens:
            raise ConfigError("vocabulary must contain the space token")

    @property
    def size(self) -> int:
        return len(self.tokens)

    def char_to_id(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.tokens) if i != self.blank_index}


def load_vocabulary(path: str | Path) -> Vocabulary:
    """One token per line; ``<blank>`` and ``<space>`` are literal markers."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    tokens: list[str] = []
    blank_index = None
    for i, line in enumerate(lines):
        if line == BLANK_LITERAL:
            if blank_index is not None:
                raise ConfigError(f"duplicate {BLANK_LITERAL} at line {i + 1}")
            blank_index = i
            tokens.append("\x00")  # placeholder char never produced by tokenize
        elif line == SPACE_LITERAL:
            tokens.append(" ")
        else:
            if len(line) != 1:
                raise ConfigError(f"line {i + 1}: token must be a single character, got {line!r}")
            tokens.append(line)
    if blank_index is None:
        raise ConfigError(f"vocabulary has no {BLANK_LITERAL} token")
    return Vocabulary(tokens=tuple(tokens), blank_index=blank_index)


def save_vocabulary(path: str | Path, vocab: Vocabulary) -> None:
    lines = []
    for i, tok in enumerate(vocab.tokens):
        if i == vocab.blank_index:
            lines.append(BLANK_LITERAL)
        elif tok == " ":
            lines.append(SPACE_LITERAL)
        else:
            lines.append(tok)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class LogProbMatrix:
    """T x V natural-log character probabilities from an external CTC model."""

    values: np.ndarray  # (T, V) float32
    frame_duration: float
    normalized: bool = False

    @property
    def frames(self) -> int:
        return int(self.values.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class AlignParams:
    """Knobs for the banded aligner and the multi-window consensus."""

    window_frames: int = 8000
    window_set: tuple[int, ...] = (8000, 10000, 12000)
    score_window_chars: int = 30
    boundary_tolerance_frames: int = 0
    score_threshold: float = -2.0

    def __post_init__(self):
        if self.window_frames < 2:
            raise ConfigError("window_frames must be >= 2")
        if not self.window_set or list(self.window_set) != sorted(self.window_set):
            raise ConfigError("window_set must be non-empty and ascending")
        if self.score_window_chars < 1:
            raise ConfigError("score_window_chars must be >= 1")
        if self.boundary_tolerance_frames < 0:
            raise ConfigError("boundary_tolerance_frames must be >= 0")


@dataclass(frozen=True)
class AlignedSegment:
    """One utterance's recovered location inside a recording."""

    utterance_index: int
    start_frame: int
    end_frame: int
    start_time: float
    end_time: float
    score: float
    char_log_probs: tuple[float, ...]
    failed: bool = False


@dataclass(frozen=True)
class AlignResult:
    """Everything one trellis pass produces; ``align`` returns just the segments."""

    best_log_prob: float
    char_frames: tuple[int, ...]  # advance frame of every concatenated character
    segments: tuple[AlignedSegment, ...]


# ---------------------------------------------------------------------------
# log-prob file format (little-endian, bit-exact):
#   magic 'CTCL', u16 version=1, u16 flags (bit 0: rows are log-softmaxed),
#   u64 T, u64 V, f64 frame_duration, then T*V f32 values row-major.


def write_logprobs(path: str | Path, matrix: LogProbMatrix) -> None:
    values = np.ascontiguousarray(matrix.values, dtype="<f4")
    if values.ndim != 2:
        raise ValueError("values must be a 2-D array")
    t, v = values.shape
    if t < 1 or v < 2:
        raise ValueError(f"matrix must be at least 1x2, got {t}x{v}")
    if not matrix.frame_duration > 0:
        raise ValueError("frame_duration must be positive")
    if np.any(values > 0):
        raise ValueError("log-probabilities must be <= 0")
    if matrix.normalized:
        lse = np.log(np.sum(np.exp(values.astype(np.float64)), axis=1))
        if np.any(np.abs(lse) > 1e-3):
            raise ValueError("normalized flag set but rows are not log-softmaxed")
    flags = _FLAG_NORMALIZED if matrix.normalized else 0
    with open(path, "wb") as f:
        f.write(_HEADER.pack(_MAGIC, _VERSION, flags, t, v, matrix.frame_duration))
        f.write(values.tobytes())


def read_logprobs(path: str | Path) -> LogProbMatrix:
    """Load a log-prob file, validating the header; values come back bit-exact."""
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise TruncatedFile(f"{path}: header incomplete")
        magic, version, flags, t, v, frame_duration = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise BadMagic(f"{path}: expected magic {_MAGIC!r}, got {magic!r}")
        if version != _VERSION:
            raise UnsupportedVersion(f"{path}: version {version} not supported")
        if t < 1 or v < 2 or t > _MAX_DIM or v > _MAX_DIM or t * v > _MAX_CELLS:
            raise DimensionOverflow(f"{path}: dimensions {t}x{v} out of range")
        if not (frame_duration > 0 and np.isfinite(frame_duration)):
            raise DimensionOverflow(f"{path}: frame_duration {frame_duration!r} out of range")
        data = np.frombuffer(f.read(4 * t * v), dtype="<f4")
        if data.size < t * v:
            raise TruncatedFile(f"{path}: expected {t * v} values, found {data.size}")
    return LogProbMatrix(
        values=data.reshape(t, v),
        frame_duration=frame_duration,
        normalized=bool(flags & _FLAG_NORMALIZED),
    )


# ---------------------------------------------------------------------------
# tokenization


def tokenize(
    text: str, vocab: Vocabulary, strict: bool = False
) -> tuple[list[int], dict[int, str]]:
    """Map characters to token ids. Returns (ids, dropped) where ``dropped``
    records position -> character for out-of-vocabulary input (lenient mode);
    strict mode raises :class:`OovCharacter` instead."""
    table = vocab.char_to_id()
    ids: list[int] = []
    dropped: dict[int, str] = {}
    for pos, ch in enumerate(text):
        tok = table.get(ch)
        if tok is None:
            if strict:
                raise OovCharacter(pos, ch)
            dropped[pos] = ch
        else:
            ids.append(tok)
    return ids, dropped


# ---------------------------------------------------------------------------
# the aligner


def align(
    matrix: LogProbMatrix,
    utterances: Sequence[Sequence[int]],
    params: AlignParams,
    blank_index: int = 0,
) -> list[AlignedSegment]:
    """Align tokenized utterances (in audio order) against the matrix.

    Uses ``params.window_frames`` as the band width; run once per entry of
    ``params.window_set`` and combine with :func:`consensus` for the
    multi-window workflow.  A segment whose best path touches a band edge is
    returned with ``failed=True`` rather than with silently wrong boundaries.
    """
    return list(align_path(matrix, utterances, params, blank_index).segments)


def align_path(
    matrix: LogProbMatrix,
    utterances: Sequence[Sequence[int]],
    params: AlignParams,
    blank_index: int = 0,
) -> AlignResult:
    """Like :func:`align` but also exposes the best path log-probability and
    the advance frame of every character (useful for diagnostics)."""
    if not utterances:
        raise EmptyUtteranceList("utterance list is empty")
    for k, u in enumerate(utterances):
        if len(u) == 0:
            raise EmptyUtteranceList(f"utterance {k} is empty")
    chars = np.concatenate([np.asarray(u, dtype=np.int64) for u in utterances])
    t_frames = matrix.frames
    m_chars = int(chars.size)
    if m_chars > t_frames:
        raise TextLongerThanAudio(f"{m_chars} characters cannot fit in {t_frames} frames")
    if chars.min() < 0 or chars.max() >= matrix.vocab_size:
        raise ValueError("token id out of range for this matrix")
    if not 0 <= blank_index < matrix.vocab_size:
        raise ValueError("blank_index out of range for this matrix")

    logp = np.clip(matrix.values.astype(np.float64), LOGPROB_FLOOR, 0.0)
    width = min(params.window_frames, t_frames)
    unbanded = width >= t_frames

    # Columns u = 0..T; column u means "frames 0..u-1 consumed".  Row values
    # within a band are computed with a max-plus prefix scan: with stay mass
    # S[u] accumulated over the band, A[m][u] = S[u] + max_{u'<=u}(adv[u'] - S[u']).
    a_prev = np.zeros(t_frames + 1)
    peak = 0  # running path estimate: column of the previous row's maximum
    lows = np.empty(m_chars + 1, dtype=np.int64)
    highs = np.empty(m_chars + 1, dtype=np.int64)
    lows[0], highs[0] = 0, t_frames
    adv_index: list[np.ndarray] = []  # per row: advance column of the best path, per column

    blank_col = logp[:, blank_index]
    diverged_row = m_chars + 1  # first row whose band provably clipped a better path
    for m in range(1, m_chars + 1):
        c = int(chars[m - 1])
        if unbanded:
            lo, hi = 1, t_frames
        else:
            lo = max(1, min(peak + 1 - width // 2, t_frames - width + 1))
            hi = min(t_frames, lo + width - 1)
        lows[m], highs[m] = lo, hi

        char_col = logp[:, c]
        stay = np.maximum(blank_col[lo:hi], char_col[lo:hi])  # frame consumed entering u from u-1
        adv = a_prev[lo - 1 : hi] + char_col[lo - 1 : hi]  # advance into column u consumes frame u-1

        if not unbanded and diverged_row > m_chars:
            # a reachable advance cell outside the band that strictly beats
            # every in-band advance means the band lost the optimum here; the
            # damage propagates to every later row
            best_anywhere = float(np.max(a_prev[0:t_frames] + char_col))
            if best_anywhere > float(adv.max()) + 1e-9:
                diverged_row = m

        s = np.empty(hi - lo + 1)
        s[0] = 0.0
        np.cumsum(stay, out=s[1:])
        x = adv - s
        run_max = np.maximum.accumulate(x)
        row = run_max + s

        inc = np.empty(x.size, dtype=bool)
        inc[0] = True
        np.greater(x[1:], run_max[:-1], out=inc[1:])  # strict: ties keep the stay
        j = np.where(inc, np.arange(lo, hi + 1, dtype=np.int32), np.int32(-1))
        np.maximum.accumulate(j, out=j)
        adv_index.append(j)

        a_prev = np.full(t_frames + 1, _INADMISSIBLE)
        a_prev[lo : hi + 1] = row
        peak = lo + int(np.argmax(row))

    final_col = peak  # argmax of the last row (first occurrence on ties)
    best = a_prev[final_col]
    infeasible = bool(best <= _INADMISSIBLE / 2)

    # backtrack: advance columns per character, newest first
    adv_cols = np.empty(m_chars + 1, dtype=np.int64)
    u = final_col
    for m in range(m_chars, 0, -1):
        lo, hi = int(lows[m]), int(highs[m])
        u = min(max(u, lo), hi)
        col = int(adv_index[m - 1][u - lo])
        if col < 0:
            col = lo
        adv_cols[m] = col
        u = col - 1

    char_frames = adv_cols[1:] - 1
    char_lp = logp[char_frames, chars]

    # A character row is compromised when the backtracked path touches a
    # clipped band edge (the path occupies columns adv_cols[m] .. next advance
    # - 1) or when any row at or before it diverged from the reachable
    # optimum: either way the true path may lie outside the band.
    edge = np.zeros(m_chars + 1, dtype=bool)
    if not unbanded:
        for m in range(1, m_chars + 1):
            lo, hi = int(lows[m]), int(highs[m])
            row_end = int(adv_cols[m + 1] - 1) if m < m_chars else final_col
            if (lo > 1 and adv_cols[m] <= lo) or (hi < t_frames and row_end >= hi):
                edge[m] = True
        if diverged_row <= m_chars:
            edge[diverged_row:] = True

    segments: list[AlignedSegment] = []
    offset = 0
    window = params.score_window_chars
    fd = matrix.frame_duration
    for k, utt in enumerate(utterances):
        n = len(utt)
        frames = char_frames[offset : offset + n]
        lps = char_lp[offset : offset + n]
        failed = infeasible or bool(edge[1 + offset : 1 + offset + n].any())
        segments.append(
            AlignedSegment(
                utterance_index=k,
                start_frame=int(frames[0]),
                end_frame=int(frames[-1]),
                start_time=float(frames[0] * fd),
                end_time=float((frames[-1] + 1) * fd),
                score=_window_min_score(lps, window),
                char_log_probs=tuple(float(x) for x in lps),
                failed=failed,
            )
        )
        offset += n
    return AlignResult(
        best_log_prob=float(best),
        char_frames=tuple(int(f) for f in char_frames),
        segments=tuple(segments),
    )


def _window_min_score(char_lp: np.ndarray, window: int) -> float:
    """Minimum over all length-min(window, n) sliding means of char log-probs."""
    n = char_lp.size
    w = min(window, n)
    csum = np.concatenate(([0.0], np.cumsum(char_lp)))
    means = (csum[w:] - csum[:-w]) / w
    return float(means.min())


def multi_window_align(
    matrix: LogProbMatrix,
    utterances: Sequence[Sequence[int]],
    params: AlignParams,
    blank_index: int = 0,
) -> list[list[AlignedSegment]]:
    """One full alignment per window in ``params.window_set`` (ascending)."""
    return [
        align(matrix, utterances, replace(params, window_frames=w), blank_index)
        for w in params.window_set
    ]


def consensus(runs: Sequence[Sequence[AlignedSegment]], tolerance: int = 0) -> list[AlignedSegment]:
    """Keep segments whose boundaries agree across all runs within ``tolerance``.

    A segment flagged failed in any run is vetoed.  Kept segments take their
    boundaries and score from the first run, which callers order as the
    smallest window.
    """
    if not runs:
        raise ValueError("consensus needs at least one run")
    n = len(runs[0])
    for r in runs[1:]:
        if len(r) != n:
            raise MismatchedRunShapes(f"runs have {n} and {len(r)} segments")
    kept: list[AlignedSegment] = []
    for i in range(n):
        segs = [r[i] for r in runs]
        if any(s.failed for s in segs):
            continue
        starts = [s.start_frame for s in segs]
        ends = [s.end_frame for s in segs]
        if max(starts) - min(starts) <= tolerance and max(ends) - min(ends) <= tolerance:
            kept.append(segs[0])
    return kept


# ---------------------------------------------------------------------------
# segments checkpoint file: one line per segment, "start end score | text"


def _fmt_float(x: float) -> str:
    # six decimals when that round-trips exactly, else the shortest exact form
    s = f"{x:.6f}"
    if float(s) == x:
        return s
    return np.format_float_positional(x, unique=True, trim="0")


def persist_segments(
    path: str | Path, segments: Sequence[AlignedSegment], texts: Sequence[str]
) -> None:
    if len(segments) != len(texts):
        raise ValueError("segments and texts must have equal length")
    lines = []
    for seg, text in zip(segments, texts):
        if "\n" in text:
            raise ValueError("segment text must not contain newlines")
        lines.append(
            f"{_fmt_float(seg.start_time)} {_fmt_float(seg.end_time)} "
            f"{_fmt_float(seg.score)} | {text}\n"
        )
    Path(path).write_text("".join(lines), encoding="utf-8")


def load_segments(path: str | Path) -> list[tuple[float, float, float, str]]:
    """Read back (start_time, end_time, score, text) tuples."""
    out: list[tuple[float, float, float, str]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            head, sep, text = line.partition(" | ")
            if not sep:
                raise MalformedLine(lineno, "missing ' | ' separator")
            parts = head.split()
            if len(parts) != 3:
                raise MalformedLine(lineno, f"expected 3 numbers, got {len(parts)}")
            try:
                start, end, score = (float(p) for p in parts)
            except ValueError as exc:
                raise MalformedLine(lineno, str(exc)) from exc
            out.append((start, end, score, text))
    return out
