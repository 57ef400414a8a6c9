"""PCM audio ingestion, clip extraction, and per-clip signal statistics.

Reads RIFF/WAVE files (16-bit PCM or 32-bit IEEE float, any channel count,
averaged to mono), cuts clips at aligned boundaries, and measures the signals
a dataset curator cares about: peak level, frequency bandwidth, and the
tail mean-absolute ratio that exposes abruptly cut utterance endings.
"""
from __future__ import annotations

import struct
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import signal as spsignal

from .ctcseg import AlignedSegment
from .errors import (
    EmptyClip,
    NotWav,
    SegmentOutOfRange,
    TruncatedData,
    UnsupportedEncoding,
)

PEAK_FLOOR_DB = -120.0
BANDWIDTH_THRESHOLD_DB = 50.0  # power within this many dB of the spectral peak
DEFAULT_TAIL_WINDOW = 0.1  # seconds


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray  # float64 mono in [-1, 1]
    sample_rate: int
    source: tuple[str, int] | None = None  # (file path, sample offset)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class SignalStats:
    sample_rate: int
    duration: float
    peak_level: float  # dBFS
    bandwidth: float  # Hz
    tail_ma_ratio: float


@dataclass(frozen=True)
class RenderedViews:
    envelope: np.ndarray  # (N, 2) per-bin (min, max)
    envelope_times: np.ndarray  # (N,) bin centers, seconds
    spectrogram: np.ndarray  # (frames, freq bins) log-magnitude dB
    time_axis: np.ndarray  # (frames,) seconds
    freq_axis: np.ndarray  # (freq bins,) Hz


def read_wav(path: str | Path) -> AudioClip:
    """Load a WAV file as mono float64; int samples are scaled by 1/32768."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise NotWav(f"{path}: not a RIFF/WAVE file")
    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        if chunk_id == b"fmt ":
            if body_start + 16 > len(raw):
                raise TruncatedData(f"{path}: fmt chunk incomplete")
            fmt = struct.unpack_from("<HHIIHH", raw, body_start)
        elif chunk_id == b"data":
            if body_start + chunk_size > len(raw):
                raise TruncatedData(
                    f"{path}: data chunk declares {chunk_size} bytes, "
                    f"file has {len(raw) - body_start}"
                )
            data = raw[body_start : body_start + chunk_size]
        pos = body_start + chunk_size + (chunk_size & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise NotWav(f"{path}: missing fmt or data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels < 1 or sample_rate <= 0:
        raise UnsupportedEncoding(f"{path}: bad fmt header")
    if audio_format == 1 and bits == 16:
        frame_bytes = 2 * channels
        usable = len(data) - len(data) % frame_bytes
        samples = np.frombuffer(data[:usable], dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        frame_bytes = 4 * channels
        usable = len(data) - len(data) % frame_bytes
        samples = np.frombuffer(data[:usable], dtype="<f4").astype(np.float64)
        samples = np.clip(np.nan_to_num(samples), -1.0, 1.0)
    else:
        raise UnsupportedEncoding(f"{path}: format {audio_format} / {bits}-bit not supported")
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return AudioClip(samples=samples, sample_rate=sample_rate, source=(str(path), 0))


def write_wav(path: str | Path, clip: AudioClip) -> None:
    """Write mono 16-bit PCM; samples scale by 32768 so a read round-trips exactly."""
    pcm = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate)
        w.writeframes(pcm.tobytes())


def cut_segments(
    clip: AudioClip, segments: Sequence[AlignedSegment], padding: float = 0.0
) -> list[AudioClip]:
    """Extract one clip per segment, padded and clamped to the source clip."""
    duration = clip.duration
    sr = clip.sample_rate
    out: list[AudioClip] = []
    for seg in segments:
        if seg.start_time < 0 or seg.end_time > duration or seg.start_time > seg.end_time:
            raise SegmentOutOfRange(
                f"segment {seg.utterance_index} spans "
                f"[{seg.start_time:.3f}, {seg.end_time:.3f}] s in a {duration:.3f} s clip"
            )
        lo = max(0.0, seg.start_time - padding)
        hi = min(duration, seg.end_time + padding)
        i0 = int(round(lo * sr))
        i1 = int(round(hi * sr))
        base = clip.source[0] if clip.source else ""
        offset = (clip.source[1] if clip.source else 0) + i0
        out.append(AudioClip(samples=clip.samples[i0:i1], sample_rate=sr, source=(base, offset)))
    return out


def export_clips(
    clip: AudioClip,
    segments: Sequence[AlignedSegment],
    padding: float,
    out_dir: str | Path,
    recording_id: str,
) -> list[Path]:
    """Cut and write ``<recording_id>_<utterance_index>.wav`` files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    for seg, piece in zip(segments, cut_segments(clip, segments, padding)):
        path = out_dir / f"{recording_id}_{seg.utterance_index}.wav"
        write_wav(path, piece)
        paths.append(path)
    return paths


def analyze_signal(clip: AudioClip, tail_window: float = DEFAULT_TAIL_WINDOW,
                   bandwidth_threshold_db: float = BANDWIDTH_THRESHOLD_DB) -> SignalStats:
    """Peak level (dBFS), frequency bandwidth, and the tail mean-absolute ratio.

    Bandwidth is the highest frequency whose Welch power (Hann segments of
    min(4096, len), 50% overlap) stays within ``bandwidth_threshold_db`` of
    the spectral peak.  The tail ratio divides the mean |x| over the trailing
    ``tail_window`` seconds by the mean |x| over the whole clip; values near
    zero mean the clip fades out, values above 1 suggest an abrupt ending.
    """
    x = clip.samples
    if x.size == 0:
        raise EmptyClip("cannot analyze an empty clip")
    peak = float(np.max(np.abs(x)))
    peak_level = 20.0 * np.log10(peak) if peak > 0 else PEAK_FLOOR_DB

    if x.size >= 2:
        nperseg = min(4096, x.size)
        freqs, power = spsignal.welch(
            x, fs=clip.sample_rate, window="hann", nperseg=nperseg,
            noverlap=nperseg // 2, detrend=False,
        )
        top = float(power.max())
        if top > 0:
            mask = power >= top * 10.0 ** (-bandwidth_threshold_db / 10.0)
            bandwidth = float(freqs[mask].max())
        else:
            bandwidth = 0.0
    else:
        bandwidth = 0.0

    tail_n = min(x.size, max(1, int(round(tail_window * clip.sample_rate))))
    ma_all = float(np.mean(np.abs(x)))
    ma_tail = float(np.mean(np.abs(x[-tail_n:])))
    tail_ma_ratio = ma_tail / ma_all if ma_all > 0 else 0.0

    return SignalStats(
        sample_rate=clip.sample_rate,
        duration=clip.duration,
        peak_level=float(peak_level),
        bandwidth=bandwidth,
        tail_ma_ratio=tail_ma_ratio,
    )


def render_views(
    clip: AudioClip,
    max_points: int = 1000,
    stft_window: float = 0.025,
    stft_hop: float = 0.010,
    max_columns: int = 1200,
) -> RenderedViews:
    """Downsampled waveform envelope plus a Hann-window STFT spectrogram in dB."""
    x = clip.samples
    if x.size == 0:
        raise EmptyClip("cannot render an empty clip")
    sr = clip.sample_rate

    bins = np.array_split(x, min(max_points, x.size))
    envelope = np.array([(b.min(), b.max()) for b in bins])
    edges = np.cumsum([0] + [b.size for b in bins])
    envelope_times = (edges[:-1] + edges[1:]) / 2.0 / sr

    win = max(2, int(round(stft_window * sr)))
    hop = max(1, int(round(stft_hop * sr)))
    if x.size < win:
        frames = np.zeros((1, win))
        frames[0, : x.size] = x
        starts = np.array([0])
    else:
        frames = np.lib.stride_tricks.sliding_window_view(x, win)[::hop]
        starts = np.arange(0, x.size - win + 1, hop)
    if frames.shape[0] > max_columns:
        step = int(np.ceil(frames.shape[0] / max_columns))
        frames = frames[::step]
        starts = starts[::step]
    window = np.hanning(win)
    spectrum = np.fft.rfft(frames * window, axis=1)
    spectrogram = 20.0 * np.log10(np.abs(spectrum) + 1e-10)
    return RenderedViews(
        envelope=envelope,
        envelope_times=envelope_times,
        spectrogram=spectrogram,
        time_axis=(starts + win / 2.0) / sr,
        freq_axis=np.fft.rfftfreq(win, 1.0 / sr),
    )
