"""Command-line entry point.

Four subcommands cover the two workflows:

* dataset construction: ``segment`` (normalize, align, cut, manifest)
* dataset analysis: ``analyze`` (enrich + stats report + figures),
  ``filter`` (rule-based keep/drop), ``serve`` (explorer web service)

Every run that produces files also writes ``resolved_config.json`` next to
them so results are reproducible from the echoed config alone.  The
``SPEECHFORGE_LOG`` environment variable sets log verbosity.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import audio as audiomod
from . import dataset as datasetmod
from . import metrics as metricsmod
from . import report as reportmod
from . import textnorm
from .ctcseg import (
    AlignParams,
    load_vocabulary,
    multi_window_align,
    consensus,
    persist_segments,
    read_logprobs,
)
from .errors import SpeechForgeError

log = logging.getLogger("speechforge")


def default_config() -> dict:
    """The fully-resolved defaults for the whole pipeline."""
    return {
        "text_dir": None,
        "logprob_dir": None,
        "audio_dir": None,
        "vocab": None,
        "normalization": None,
        "align": {
            "window_frames": 8000,
            "window_set": [8000, 10000, 12000],
            "score_window_chars": 30,
            "boundary_tolerance_frames": 0,
            "score_threshold": -2.0,
        },
        "padding": 0.0,
        "jobs": 1,
        "out_dir": None,
        "rules": [
            {"field": "cer", "op": ">", "value": 0.10, "action": "drop"},
            {"field": "duration", "op": ">", "value": 20.0, "action": "flag"},
        ],
        "char_rate": {"high": 30.0, "low": 5.0},
    }


def resolve_config(config_path: str | None, overrides: dict) -> dict:
    """defaults <- config file <- command-line flags, last writer wins."""
    config = default_config()
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise SpeechForgeError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise SpeechForgeError(f"config {config_path} must be a JSON object")
        for key, value in loaded.items():
            if key == "align" and isinstance(value, dict):
                config["align"].update(value)
            elif key == "char_rate" and isinstance(value, dict):
                config["char_rate"].update(value)
            else:
                config[key] = value
    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("windows",):
            config["align"]["window_set"] = value
            config["align"]["window_frames"] = value[0]
        elif key == "threshold":
            config["align"]["score_threshold"] = value
        else:
            config[key] = value
    return config


def _write_resolved_config(config: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    echo = copy.deepcopy(config)
    (out_dir / "resolved_config.json").write_text(
        json.dumps(echo, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def _align_params(config: dict) -> AlignParams:
    a = config["align"]
    return AlignParams(
        window_frames=int(a["window_frames"]),
        window_set=tuple(int(w) for w in a["window_set"]),
        score_window_chars=int(a["score_window_chars"]),
        boundary_tolerance_frames=int(a["boundary_tolerance_frames"]),
        score_threshold=float(a["score_threshold"]),
    )


def _normalization_config(spec) -> textnorm.NormalizationConfig:
    if isinstance(spec, str):
        return textnorm.load_config(spec)
    if isinstance(spec, dict):
        return textnorm.NormalizationConfig(
            digit_lexicon=spec.get("digit_lexicon", {}),
            substitutions=tuple((p, r) for p, r in spec.get("substitutions", [])),
            transliteration=spec.get("transliteration", {}),
            sentence_end_marks=frozenset(
                spec.get("sentence_end_marks", textnorm.DEFAULT_SENTENCE_END_MARKS)
            ),
            alphabet=frozenset(spec.get("alphabet", "")),
        )
    raise SpeechForgeError("config needs a 'normalization' path or object")


# ---------------------------------------------------------------------------
# segment


def discover_triples(text_dir: Path, logprob_dir: Path, audio_dir: Path) -> list[tuple[str, Path, Path, Path]]:
    """Match (text, log-prob, audio) files that share a basename."""
    texts = {p.stem: p for p in sorted(text_dir.glob("*.txt"))}
    logprobs = {p.stem: p for p in sorted(logprob_dir.glob("*.ctcl"))}
    audios = {p.stem: p for p in sorted(audio_dir.glob("*.wav"))}
    shared = sorted(set(texts) & set(logprobs) & set(audios))
    for stem in sorted(set(texts) | set(logprobs) | set(audios)):
        if stem not in shared:
            log.warning("recording %s lacks a matching text/logprob/audio file; ignored", stem)
    return [(stem, texts[stem], logprobs[stem], audios[stem]) for stem in shared]


def explicit_triples(inputs: list) -> list[tuple[str, Path, Path, Path]]:
    """Triples named one by one in the config: [{id, text, logprobs, audio}]."""
    triples = []
    for i, spec in enumerate(inputs):
        try:
            rec_id = spec.get("id") or Path(spec["text"]).stem
            triples.append(
                (str(rec_id), Path(spec["text"]), Path(spec["logprobs"]), Path(spec["audio"]))
            )
        except (TypeError, KeyError) as exc:
            raise SpeechForgeError(
                f"inputs[{i}] must carry text/logprobs/audio paths: {exc}"
            ) from exc
    if len({t[0] for t in triples}) != len(triples):
        raise SpeechForgeError("inputs contain duplicate recording ids")
    return sorted(triples)


def segment_recording(
    rec_id: str,
    text_path: Path,
    logprob_path: Path,
    audio_path: Path,
    norm_config: textnorm.NormalizationConfig,
    vocab,
    params: AlignParams,
    padding: float,
    out_dir: Path,
) -> dict:
    """Run the full construction pipeline for one recording.

    Returns manifest entry records and skipped-utterance records; clip WAVs
    and the segments checkpoint are written under ``out_dir`` as a side
    effect (paths are unique per recording, so jobs never collide).
    """
    raw = text_path.read_text(encoding="utf-8")
    utterances = textnorm.normalize(raw, norm_config)
    matrix = read_logprobs(logprob_path)
    clip = audiomod.read_wav(audio_path)

    skipped: list[dict] = []

    def skip(idx: int, reason: str, score: float | None = None) -> None:
        skipped.append(
            {
                "recording": rec_id,
                "utterance_index": idx,
                "text": utterances[idx].text,
                "reason": reason,
                **({"score": score} if score is not None else {}),
            }
        )

    token_seqs: list[list[int]] = []
    kept_idx: list[int] = []
    for i, utt in enumerate(utterances):
        ids, _dropped = tokenize_lenient(utt.text, vocab)
        if ids:
            token_seqs.append(ids)
            kept_idx.append(i)
        else:
            skip(i, "no in-vocabulary characters")

    entries: list[dict] = []
    if token_seqs:
        runs = multi_window_align(matrix, token_seqs, params, vocab.blank_index)
        kept_segments = {s.utterance_index: s for s in consensus(runs, params.boundary_tolerance_frames)}

        final_segments = []
        final_texts = []
        audio_duration = clip.duration
        for k in range(len(token_seqs)):
            orig = kept_idx[k]
            seg = kept_segments.get(k)
            if seg is None:
                if any(r[k].failed for r in runs):
                    skip(orig, "band edge contact")
                else:
                    skip(orig, "window consensus mismatch")
                continue
            if seg.score < params.score_threshold:
                skip(orig, "below score threshold", seg.score)
                continue
            if seg.start_time >= audio_duration:
                skip(orig, "beyond audio end", seg.score)
                continue
            end_time = min(seg.end_time, audio_duration)  # frame grid may spill past the last sample
            final_segments.append(replace(seg, utterance_index=orig, end_time=end_time))
            final_texts.append(utterances[orig].text)

        seg_dir = out_dir / "segments"
        seg_dir.mkdir(parents=True, exist_ok=True)
        persist_segments(seg_dir / f"{rec_id}.txt", final_segments, final_texts)

        clip_paths = audiomod.export_clips(
            clip, final_segments, padding, out_dir / "clips", rec_id
        )
        for seg, text, path in zip(final_segments, final_texts, clip_paths):
            piece = audiomod.read_wav(path)
            entry = {
                "audio_filepath": str(path.relative_to(out_dir)),
                "duration": piece.duration,
                "text": text,
                "score": seg.score,
                "group_key": rec_id,
                "start": seg.start_time,
                "end": seg.end_time,
            }
            flags = sorted(utterances[seg.utterance_index].flags)
            if flags:
                entry["flags"] = flags
            entries.append(entry)
    return {"recording": rec_id, "entries": entries, "skipped": skipped}


def tokenize_lenient(text: str, vocab):
    from .ctcseg import tokenize

    return tokenize(text, vocab, strict=False)


def cmd_segment(args: argparse.Namespace) -> int:
    config = resolve_config(
        args.config,
        {
            "windows": _parse_windows(args.windows),
            "threshold": args.threshold,
            "padding": args.padding,
            "jobs": args.jobs,
            "out_dir": args.out,
        },
    )
    explicit = config.get("inputs")
    required = ("vocab", "out_dir") if explicit else (
        "text_dir", "logprob_dir", "audio_dir", "vocab", "out_dir"
    )
    for key in required:
        if not config.get(key):
            log.error("config is missing %r", key)
            return 2
    if explicit:
        triples = explicit_triples(explicit)
    else:
        text_dir, logprob_dir, audio_dir = (
            Path(config["text_dir"]), Path(config["logprob_dir"]), Path(config["audio_dir"])
        )
        for p in (text_dir, logprob_dir, audio_dir):
            if not p.is_dir():
                log.error("directory %s does not exist", p)
                return 2
        triples = discover_triples(text_dir, logprob_dir, audio_dir)
    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    norm_config = _normalization_config(config["normalization"])
    vocab = load_vocabulary(config["vocab"])
    params = _align_params(config)
    padding = float(config["padding"])
    jobs = max(1, int(config["jobs"]))

    if not triples:
        log.error("no matched (text, logprob, audio) triples found")
        return 1

    results: dict[str, dict] = {}
    failures: dict[str, str] = {}

    def run_one(triple):
        rec_id, tpath, lpath, apath = triple
        return rec_id, segment_recording(
            rec_id, tpath, lpath, apath, norm_config, vocab, params, padding, out_dir
        )

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(run_one, t): t[0] for t in triples}
        for future, rec_id in futures.items():
            try:
                _, result = future.result()
                results[rec_id] = result
            except (SpeechForgeError, OSError, ValueError) as exc:
                log.error("recording %s failed: %s", rec_id, exc)
                failures[rec_id] = str(exc)

    # aggregation is sorted by recording id so output is independent of job order
    entries: list[datasetmod.ManifestEntry] = []
    skipped: list[dict] = []
    for rec_id in sorted(results):
        entries.extend(datasetmod.ManifestEntry.from_record(r) for r in results[rec_id]["entries"])
        skipped.extend(results[rec_id]["skipped"])

    datasetmod.write_manifest(out_dir / "manifest.jsonl", entries)
    with open(out_dir / "skipped.jsonl", "w", encoding="utf-8") as f:
        for record in skipped:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
        for rec_id in sorted(failures):
            f.write(json.dumps({"recording": rec_id, "reason": failures[rec_id]}) + "\n")
    _write_resolved_config(config, out_dir)
    log.info(
        "segment: %d recordings, %d entries, %d skipped, %d failed",
        len(results), len(entries), len(skipped), len(failures),
    )
    return 1 if failures else 0


def _parse_windows(spec: str | None) -> list[int] | None:
    if spec is None:
        return None
    try:
        windows = [int(w) for w in spec.split(",") if w.strip()]
    except ValueError as exc:
        raise SpeechForgeError(f"bad --windows value {spec!r}") from exc
    if not windows:
        raise SpeechForgeError("--windows must name at least one window")
    return sorted(windows)


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args: argparse.Namespace) -> int:
    config = resolve_config(args.config, {"out_dir": args.out})
    entries = datasetmod.read_manifest(args.manifest, allow_empty_text=True)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    audio_root = Path(args.audio_root) if args.audio_root else None

    rates = config["char_rate"]
    entries = datasetmod.char_rate_screen(entries, high=rates["high"], low=rates["low"])

    reports = []
    enriched: list[datasetmod.ManifestEntry] = []
    for entry in entries:
        updates: dict = {}
        if entry.pred_text is not None and entry.text.split():
            rep = metricsmod.utterance_metrics(entry.text, entry.pred_text, entry.duration)
            reports.append(rep)
            updates.update(rep.manifest_fields())
        if audio_root is not None:
            wav = Path(entry.audio_filepath)
            if not wav.is_absolute():
                wav = audio_root / wav
            try:
                stats = audiomod.analyze_signal(audiomod.read_wav(wav))
                updates.update(
                    sample_rate=stats.sample_rate,
                    peak_level=stats.peak_level,
                    bandwidth=stats.bandwidth,
                    tail_ma_ratio=stats.tail_ma_ratio,
                )
            except (OSError, SpeechForgeError) as exc:
                updates["audio_error"] = str(exc)
        enriched.append(entry.replace_extra(**updates) if updates else entry)

    datasetmod.write_manifest(out_dir / "enriched.jsonl", enriched)
    stats = datasetmod.compute_stats(enriched)
    aggregate = metricsmod.aggregate_metrics(reports) if reports else None
    reportmod.write_reports(stats, out_dir, aggregate)
    _write_resolved_config(config, out_dir)
    log.info("analyze: %d entries, %d with prediction metrics", len(enriched), len(reports))
    return 0


# ---------------------------------------------------------------------------
# filter


def load_rules(path: str | Path) -> list[datasetmod.FilterRule]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    raw_rules = doc["rules"] if isinstance(doc, dict) else doc
    if not isinstance(raw_rules, list):
        raise SpeechForgeError("rules file must be a list or {'rules': [...]}")
    return [datasetmod.rule_from_dict(r) for r in raw_rules]


def cmd_filter(args: argparse.Namespace) -> int:
    try:
        rules = load_rules(args.rules)
    except (OSError, ValueError, KeyError, SpeechForgeError) as exc:
        log.error("bad rules file %s: %s", args.rules, exc)
        return 2
    config = resolve_config(args.config, {"out_dir": args.out})
    config["rules"] = [
        {"field": r.field, "op": r.op, "value": r.value, "action": r.action} for r in rules
    ]
    entries = datasetmod.read_manifest(args.manifest, allow_empty_text=True)
    kept, dropped, freport = datasetmod.apply_filters(entries, rules)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasetmod.write_manifest(out_dir / "kept.jsonl", kept)
    datasetmod.write_manifest(out_dir / "dropped.jsonl", dropped)
    (out_dir / "report.json").write_text(
        json.dumps(freport.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    _write_resolved_config(config, out_dir)
    log.info(
        "filter: kept %d (%.2f h), dropped %d (%.2f h)",
        freport.kept_count, freport.retained_hours, freport.dropped_count, freport.dropped_hours,
    )
    return 0


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    from .explorer import create_app

    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        log.error("--bind must look like host:port, got %r", args.bind)
        return 2
    if not Path(args.manifest).is_file():
        log.error("manifest %s does not exist", args.manifest)
        return 1
    try:
        app = create_app(args.manifest, args.audio_root, static_dir=args.ui)
    except SpeechForgeError as exc:
        log.error("cannot build index: %s", exc)
        return 1
    import uvicorn

    try:
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    except (OSError, SystemExit) as exc:
        log.error("server failed to start on %s: %s", args.bind, exc)
        return 1
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speechforge",
        description="Construct ASR training datasets from long recordings and analyze them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="normalize, align, cut, and manifest a corpus")
    seg.add_argument("--config", help="pipeline config JSON")
    seg.add_argument("--windows", help="comma-separated band widths, e.g. 8000,10000,12000")
    seg.add_argument("--threshold", type=float, help="minimum confidence score")
    seg.add_argument("--padding", type=float, help="seconds added around each cut")
    seg.add_argument("--jobs", type=int, help="concurrent recordings")
    seg.add_argument("--out", help="output directory")
    seg.set_defaults(func=cmd_segment)

    ana = sub.add_parser("analyze", help="enrich a manifest and write a stats report")
    ana.add_argument("--manifest", required=True)
    ana.add_argument("--audio-root", help="directory for resolving relative audio paths")
    ana.add_argument("--config", help="pipeline config JSON")
    ana.add_argument("--out", required=True)
    ana.set_defaults(func=cmd_analyze)

    flt = sub.add_parser("filter", help="apply drop/flag rules to a manifest")
    flt.add_argument("--manifest", required=True)
    flt.add_argument("--rules", required=True, help="rules JSON file")
    flt.add_argument("--config", help="pipeline config JSON")
    flt.add_argument("--out", required=True)
    flt.set_defaults(func=cmd_filter)

    srv = sub.add_parser("serve", help="run the dataset explorer service")
    srv.add_argument("--manifest", required=True)
    srv.add_argument("--audio-root", help="directory for resolving relative audio paths")
    srv.add_argument("--bind", default="127.0.0.1:8080")
    srv.add_argument("--ui", help=argparse.SUPPRESS)  # static assets override
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SPEECHFORGE_LOG", "INFO").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpeechForgeError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
