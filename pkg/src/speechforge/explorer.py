"""In-memory dataset index and the HTTP service behind the explorer UI.

The whole manifest is indexed at startup (metrics precomputed, audio read
lazily) and then served read-only: statistics, a paginated/sorted/filtered
sample table, per-sample detail with diffs and signal stats, raw audio, and
rendered waveform/spectrogram views.  ``POST /api/reload`` swaps in a freshly
built index atomically.
"""
from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import audio as audiomod
from . import dataset as datasetmod
from . import metrics as metricsmod
from .errors import (
    AudioMissing,
    BadPage,
    NotFound,
    SpeechForgeError,
    UnknownField,
)

log = logging.getLogger("speechforge.explorer")

_NUMERIC_FIELDS = ("duration", "score", "wer", "cer", "wmr", "accuracy", "char_rate")
_LIST_FIELDS = (
    "id", "audio_filepath", "duration", "text", "pred_text",
    "wer", "cer", "wmr", "score", "char_rate",
)


@dataclass
class DatasetIndex:
    """Immutable after construction; see :func:`build_index`."""

    manifest_path: Path
    audio_root: Path | None
    entries: list[datasetmod.ManifestEntry]
    records: list[dict]  # JSON-ready per-sample rows, id == list position
    stats: datasetmod.DatasetStats
    word_table: list[dict]
    load_seconds: float
    sort_cache: dict[str, list[int]] = field(default_factory=dict)
    _signal_cache: dict[int, dict | None] = field(default_factory=dict)
    _signal_lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def size(self) -> int:
        return len(self.records)

    def fields(self) -> set[str]:
        known = set()
        for record in self.records:
            known.update(record.keys())
        return known

    def audio_path(self, sample_id: int) -> Path:
        raw = Path(self.entries[sample_id].audio_filepath)
        if raw.is_absolute():
            return raw
        if self.audio_root is not None:
            return self.audio_root / raw
        return self.manifest_path.parent / raw


def build_index(manifest_path: str | Path, audio_root: str | Path | None = None) -> DatasetIndex:
    """Load a manifest and precompute every derivable metric.

    Audio files are not touched here; signal statistics are computed on the
    first detail request for a sample and memoized.
    """
    started = time.monotonic()
    manifest_path = Path(manifest_path)
    entries = datasetmod.read_manifest(manifest_path, allow_empty_text=True)
    records: list[dict] = []
    pairs: list[tuple[str, str]] = []
    for i, entry in enumerate(entries):
        record = dict(entry.to_record())
        record["id"] = i
        if "char_rate" not in record and entry.duration > 0:
            record["char_rate"] = len(entry.text) / entry.duration
        if entry.pred_text is not None and entry.text.split():
            pairs.append((entry.text, entry.pred_text))
            if "wer" not in record:
                report = metricsmod.utterance_metrics(
                    entry.text, entry.pred_text, entry.duration
                )
                record.update(report.manifest_fields())
        records.append(record)
    stats = datasetmod.compute_stats(entries)

    word_table = [
        {
            "word": word,
            "occurrences": ws.occurrences,
            "matched": ws.matched,
            "accuracy": ws.accuracy,
        }
        for word, ws in metricsmod.word_accuracy_table(pairs).items()
    ]
    word_table.sort(key=lambda row: (-row["occurrences"], row["word"]))

    index = DatasetIndex(
        manifest_path=manifest_path,
        audio_root=Path(audio_root) if audio_root else None,
        entries=entries,
        records=records,
        stats=stats,
        word_table=word_table,
        load_seconds=0.0,
    )
    for fname in _NUMERIC_FIELDS:
        index.sort_cache[fname] = _sorted_ids(records, fname)
    index.load_seconds = time.monotonic() - started
    log.info(
        "indexed %d entries from %s in %.2f s", len(entries), manifest_path, index.load_seconds
    )
    return index


def _sort_key(value):
    # custom attributes may mix types across entries; give them a total order
    # (numbers first, then strings, then everything else by repr)
    if isinstance(value, bool):
        return (1, str(value))
    if isinstance(value, (int, float)):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    return (2, repr(value))


def _sorted_ids(records: list[dict], fname: str) -> list[int]:
    # entries missing the field go last; ties keep id order (stable)
    present = [r["id"] for r in records if r.get(fname) is not None]
    absent = [r["id"] for r in records if r.get(fname) is None]
    present.sort(key=lambda i: _sort_key(records[i][fname]))
    return present + absent


def parse_filter_spec(spec: str) -> list[datasetmod.FilterRule]:
    """Comma-joined ``field:op:value`` triples, as used by the list endpoint."""
    rules = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":", 2)
        if len(pieces) != 3:
            raise UnknownField(f"bad filter {part!r}: expected field:op:value")
        fname, op, raw = pieces
        value: float | str
        try:
            value = float(raw)
        except ValueError:
            value = raw
        if op in ("contains", "matches-regex", "matches"):
            value = raw
        try:
            rules.append(datasetmod.FilterRule(field=fname, op=op, value=value, action="flag"))
        except SpeechForgeError as exc:
            raise UnknownField(str(exc)) from exc
    return rules


def query_samples(
    index: DatasetIndex,
    page: int = 0,
    page_size: int = 50,
    sort_field: str | None = None,
    sort_dir: str = "asc",
    filters: Sequence[datasetmod.FilterRule] = (),
) -> tuple[list[dict], int]:
    """Return one page of sample rows and the filtered total.

    Filters are pure predicates: a row matches when every rule fires on it;
    nothing is ever removed from the index.
    """
    if page < 0:
        raise BadPage(f"page must be >= 0, got {page}")
    if page_size < 1:
        raise BadPage(f"page_size must be >= 1, got {page_size}")
    known = index.fields()
    for rule in filters:
        if rule.field not in known:
            raise UnknownField(f"unknown filter field {rule.field!r}")

    if filters:
        ids = [
            r["id"]
            for r in index.records
            if all(rule.evaluate(r) is True for rule in filters)
        ]
    else:
        ids = list(range(index.size))

    if sort_field:
        if sort_field not in known:
            raise UnknownField(f"unknown sort field {sort_field!r}")
        if sort_field in index.sort_cache and not filters:
            ids = list(index.sort_cache[sort_field])
        else:
            present = [i for i in ids if index.records[i].get(sort_field) is not None]
            absent = [i for i in ids if index.records[i].get(sort_field) is None]
            present.sort(key=lambda i: _sort_key(index.records[i][sort_field]))
            ids = present + absent
        if sort_dir == "desc":
            present_n = sum(1 for i in ids if index.records[i].get(sort_field) is not None)
            ids = ids[:present_n][::-1] + ids[present_n:]
        elif sort_dir != "asc":
            raise BadPage(f"sort_dir must be asc or desc, got {sort_dir!r}")

    total = len(ids)
    window = ids[page * page_size : (page + 1) * page_size]
    items = [_list_row(index.records[i]) for i in window]
    return items, total


def _list_row(record: dict) -> dict:
    return {k: record[k] for k in _LIST_FIELDS if k in record}


def get_sample_detail(index: DatasetIndex, sample_id: int) -> dict:
    """Full record plus diff ops and (lazily computed) signal statistics."""
    if not 0 <= sample_id < index.size:
        raise NotFound(f"no sample {sample_id}")
    entry = index.entries[sample_id]
    detail = dict(index.records[sample_id])
    if entry.pred_text is not None:
        ops = metricsmod.edit_alignment(entry.text.split(), entry.pred_text.split())
        detail["diff"] = [
            {"kind": op.kind, **({"ref": op.ref} if op.ref is not None else {}),
             **({"hyp": op.hyp} if op.hyp is not None else {})}
            for op in ops
        ]
    else:
        detail["diff"] = None
    detail["signal"] = _signal_stats(index, sample_id)
    return detail


def _signal_stats(index: DatasetIndex, sample_id: int) -> dict | None:
    with index._signal_lock:
        if sample_id in index._signal_cache:
            return index._signal_cache[sample_id]
    path = index.audio_path(sample_id)
    result: dict | None
    try:
        clip = audiomod.read_wav(path)
        st = audiomod.analyze_signal(clip)
        result = {
            "sample_rate": st.sample_rate,
            "duration": st.duration,
            "peak_level": st.peak_level,
            "bandwidth": st.bandwidth,
            "tail_ma_ratio": st.tail_ma_ratio,
        }
    except (OSError, SpeechForgeError):
        result = None
    with index._signal_lock:
        index._signal_cache[sample_id] = result
    return result


def get_sample_audio_path(index: DatasetIndex, sample_id: int) -> Path:
    if not 0 <= sample_id < index.size:
        raise NotFound(f"no sample {sample_id}")
    path = index.audio_path(sample_id)
    if not path.is_file():
        raise AudioMissing(f"audio for sample {sample_id} not found at {path}")
    return path


def get_sample_views(index: DatasetIndex, sample_id: int, max_points: int = 1000) -> dict:
    if not 0 <= sample_id < index.size:
        raise NotFound(f"no sample {sample_id}")
    path = index.audio_path(sample_id)
    if not path.is_file():
        raise AudioMissing(f"audio for sample {sample_id} not found at {path}")
    clip = audiomod.read_wav(path)
    views = audiomod.render_views(clip, max_points=max_points)
    return {
        "envelope": views.envelope.tolist(),
        "envelope_times": views.envelope_times.tolist(),
        "spectrogram": np.round(views.spectrogram, 2).tolist(),
        "time_axis": views.time_axis.tolist(),
        "freq_axis": views.freq_axis.tolist(),
    }


def query_words(
    index: DatasetIndex, page: int = 0, page_size: int = 100,
    sort_field: str = "occurrences", sort_dir: str = "desc",
) -> tuple[list[dict], int]:
    if page < 0 or page_size < 1:
        raise BadPage("page must be >= 0 and page_size >= 1")
    if sort_field not in ("word", "occurrences", "matched", "accuracy"):
        raise UnknownField(f"unknown word sort field {sort_field!r}")
    rows = sorted(
        index.word_table,
        key=lambda r: r[sort_field],
        reverse=(sort_dir == "desc"),
    )
    total = len(rows)
    return rows[page * page_size : (page + 1) * page_size], total


# ---------------------------------------------------------------------------
# HTTP layer


class IndexHolder:
    """Atomic swap point so /api/reload never exposes a half-built index."""

    def __init__(self, index: DatasetIndex):
        self._index = index
        self._lock = threading.Lock()

    def get(self) -> DatasetIndex:
        return self._index

    def reload(self) -> DatasetIndex:
        fresh = build_index(self._index.manifest_path, self._index.audio_root)
        with self._lock:
            self._index = fresh
        return fresh


def create_app(
    manifest_path: str | Path,
    audio_root: str | Path | None = None,
    static_dir: str | Path | None = None,
):
    """Build the FastAPI application serving the explorer API (and UI, if built)."""
    from fastapi import FastAPI, HTTPException, Query, Response
    from fastapi.responses import FileResponse
    from fastapi.staticfiles import StaticFiles

    holder = IndexHolder(build_index(manifest_path, audio_root))
    app = FastAPI(title="speechforge explorer", docs_url=None, redoc_url=None)
    app.state.holder = holder

    def _http(exc: SpeechForgeError) -> HTTPException:
        status = 404 if isinstance(exc, (NotFound, AudioMissing)) else 400
        return HTTPException(status_code=status, detail=str(exc))

    @app.get("/api/stats")
    def api_stats():
        index = holder.get()
        doc = index.stats.to_dict()
        doc["load_seconds"] = index.load_seconds
        return doc

    @app.get("/api/samples")
    def api_samples(
        page: int = 0,
        page_size: int = Query(default=50, le=1000),
        sort: str | None = None,
        dir: str = "asc",
        filter: str = "",
    ):
        try:
            rules = parse_filter_spec(filter) if filter else []
            items, total = query_samples(
                holder.get(), page=page, page_size=page_size,
                sort_field=sort, sort_dir=dir, filters=rules,
            )
        except SpeechForgeError as exc:
            raise _http(exc) from exc
        return {"total": total, "items": items}

    @app.get("/api/samples/{sample_id}")
    def api_sample_detail(sample_id: int):
        try:
            return get_sample_detail(holder.get(), sample_id)
        except SpeechForgeError as exc:
            raise _http(exc) from exc

    @app.get("/api/samples/{sample_id}/audio")
    def api_sample_audio(sample_id: int):
        try:
            path = get_sample_audio_path(holder.get(), sample_id)
        except SpeechForgeError as exc:
            raise _http(exc) from exc
        return FileResponse(path, media_type="audio/wav")

    @app.get("/api/samples/{sample_id}/views")
    def api_sample_views(sample_id: int, max_points: int = Query(default=1000, ge=8, le=20000)):
        try:
            return get_sample_views(holder.get(), sample_id, max_points=max_points)
        except SpeechForgeError as exc:
            raise _http(exc) from exc

    @app.get("/api/words")
    def api_words(
        page: int = 0,
        page_size: int = Query(default=100, le=1000),
        sort: str = "occurrences",
        dir: str = "desc",
    ):
        try:
            rows, total = query_words(
                holder.get(), page=page, page_size=page_size, sort_field=sort, sort_dir=dir
            )
        except SpeechForgeError as exc:
            raise _http(exc) from exc
        return {"total": total, "items": rows}

    @app.post("/api/reload", status_code=204)
    def api_reload():
        holder.reload()
        return Response(status_code=204)

    resolved_static = _resolve_static_dir(static_dir)
    if resolved_static is not None:
        app.mount("/", StaticFiles(directory=resolved_static, html=True), name="ui")
    else:

        @app.get("/")
        def api_root():
            return {
                "service": "speechforge explorer",
                "endpoints": [
                    "/api/stats", "/api/samples", "/api/samples/{id}",
                    "/api/samples/{id}/audio", "/api/samples/{id}/views",
                    "/api/words", "/api/reload",
                ],
                "note": "UI assets not built; see README",
            }

    return app


def _resolve_static_dir(static_dir: str | Path | None) -> Path | None:
    import os

    candidates = []
    if static_dir:
        candidates.append(Path(static_dir))
    env = os.environ.get("SPEECHFORGE_UI")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).parent / "static")
    for cand in candidates:
        if cand.is_dir() and (cand / "index.html").is_file():
            return cand
    return None
