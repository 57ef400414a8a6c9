import struct

import numpy as np
import pytest

from speechforge.audio import (
    AudioClip,
    analyze_signal,
    cut_segments,
    export_clips,
    read_wav,
    render_views,
    write_wav,
)
from speechforge.ctcseg import AlignedSegment
from speechforge.errors import (
    EmptyClip,
    NotWav,
    SegmentOutOfRange,
    TruncatedData,
    UnsupportedEncoding,
)

from oracles import tone_frequency


def segment(start_time, end_time, idx=0):
    return AlignedSegment(
        utterance_index=idx,
        start_frame=int(start_time / 0.02),
        end_frame=int(end_time / 0.02) - 1,
        start_time=start_time,
        end_time=end_time,
        score=-0.1,
        char_log_probs=(-0.1,),
    )


def tone(freq, seconds, sample_rate=16000, amplitude=1.0):
    t = np.arange(int(seconds * sample_rate)) / sample_rate
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq * t), sample_rate=sample_rate)


class TestReadWav:
    def test_pcm16_scaling(self, tmp_path):
        path = tmp_path / "pcm.wav"
        write_wav(path, AudioClip(samples=np.array([0.0, 0.5, -1.0]), sample_rate=8000))
        clip = read_wav(path)
        assert clip.sample_rate == 8000
        assert clip.samples.tolist() == [0.0, 0.5, -1.0]

    def test_stereo_averaged(self, tmp_path):
        import wave

        path = tmp_path / "stereo.wav"
        with wave.open(str(path), "wb") as w:
            w.setnchannels(2)
            w.setsampwidth(2)
            w.setframerate(8000)
            w.writeframes(struct.pack("<4h", 32767, 0, -32768, 0))
        clip = read_wav(path)
        assert clip.samples == pytest.approx([32767 / 32768 / 2, -0.5])

    def test_float32_encoding(self, tmp_path):
        path = tmp_path / "f32.wav"
        samples = np.array([0.25, -0.75], dtype="<f4")
        data = samples.tobytes()
        payload = (
            b"WAVE"
            + b"fmt " + struct.pack("<I", 16) + struct.pack("<HHIIHH", 3, 1, 16000, 64000, 4, 32)
            + b"data" + struct.pack("<I", len(data)) + data
        )
        path.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(payload) - 4) + payload)
        clip = read_wav(path)
        assert clip.samples == pytest.approx([0.25, -0.75])
        assert clip.sample_rate == 16000

    def test_not_wav(self, tmp_path):
        path = tmp_path / "x.wav"
        path.write_bytes(b"definitely not riff data")
        with pytest.raises(NotWav):
            read_wav(path)

    def test_unsupported_encoding(self, tmp_path):
        path = tmp_path / "ulaw.wav"
        payload = (
            b"WAVE"
            + b"fmt " + struct.pack("<I", 16) + struct.pack("<HHIIHH", 7, 1, 8000, 8000, 1, 8)
            + b"data" + struct.pack("<I", 4) + b"\x00" * 4
        )
        path.write_bytes(b"RIFF" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(UnsupportedEncoding):
            read_wav(path)

    def test_truncated_data_chunk(self, tmp_path):
        path = tmp_path / "trunc.wav"
        payload = (
            b"WAVE"
            + b"fmt " + struct.pack("<I", 16) + struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
            + b"data" + struct.pack("<I", 100) + b"\x00" * 10
        )
        path.write_bytes(b"RIFF" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(TruncatedData):
            read_wav(path)

    def test_pcm16_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        ints = rng.integers(-32768, 32768, size=500, dtype=np.int16)
        original = AudioClip(samples=ints.astype(np.float64) / 32768.0, sample_rate=22050)
        path = tmp_path / "rt.wav"
        write_wav(path, original)
        assert np.array_equal(read_wav(path).samples, original.samples)


class TestCutSegments:
    def test_sample_count(self):
        clip = AudioClip(samples=np.zeros(160000), sample_rate=16000)
        (cut,) = cut_segments(clip, [segment(1.0, 2.5)], padding=0.0)
        assert len(cut.samples) == 24000

    def test_padding_clamped_at_start(self):
        clip = AudioClip(samples=np.arange(16000) / 16000.0, sample_rate=16000)
        (cut,) = cut_segments(clip, [segment(0.0, 0.5)], padding=0.2)
        assert len(cut.samples) == int(round(0.7 * 16000))
        assert cut.samples[0] == clip.samples[0]

    def test_out_of_range(self):
        clip = AudioClip(samples=np.zeros(160000), sample_rate=16000)
        with pytest.raises(SegmentOutOfRange):
            cut_segments(clip, [segment(9.5, 11.0)], padding=0.0)

    def test_tiling_cuts_conserve_samples(self):
        rng = np.random.default_rng(1)
        clip = AudioClip(samples=rng.uniform(-1, 1, 32000), sample_rate=16000)
        bounds = [0.0, 0.37, 0.52, 1.1, 1.62, 2.0]
        segments = [segment(a, b, i) for i, (a, b) in enumerate(zip(bounds, bounds[1:]))]
        cuts = cut_segments(clip, segments, padding=0.0)
        rebuilt = np.concatenate([c.samples for c in cuts])
        assert np.array_equal(rebuilt, clip.samples)

    def test_export_clip_names(self, tmp_path):
        clip = AudioClip(samples=np.zeros(16000), sample_rate=16000)
        paths = export_clips(clip, [segment(0.0, 0.25, idx=3)], 0.0, tmp_path, "bookA")
        assert [p.name for p in paths] == ["bookA_3.wav"]
        assert paths[0].exists()


class TestAnalyzeSignal:
    def test_peak_level_analytic(self):
        clip = AudioClip(samples=np.full(8000, 0.5), sample_rate=8000)
        stats = analyze_signal(clip)
        assert stats.peak_level == pytest.approx(20 * np.log10(0.5), abs=1e-9)

    def test_peak_floor_for_silence(self):
        clip = AudioClip(samples=np.zeros(4000), sample_rate=8000)
        stats = analyze_signal(clip)
        assert stats.peak_level == -120.0
        assert stats.tail_ma_ratio == 0.0

    def test_peak_scale_covariance(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-0.4, 0.4, 8000)
        base = analyze_signal(AudioClip(samples=x, sample_rate=8000)).peak_level
        scaled = analyze_signal(AudioClip(samples=2.0 * x, sample_rate=8000)).peak_level
        assert scaled - base == pytest.approx(20 * np.log10(2.0), abs=1e-9)

    def test_tone_bandwidth_within_one_bin(self):
        clip = tone(1000.0, 1.0)
        located = tone_frequency(clip.samples, clip.sample_rate)
        assert located == pytest.approx(1000.0, abs=2.0)
        stats = analyze_signal(clip)
        bin_width = clip.sample_rate / 4096
        assert abs(stats.bandwidth - 1000.0) <= bin_width

    def test_silent_tail_ratio_zero(self):
        clip = tone(440.0, 1.0)
        samples = clip.samples.copy()
        samples[-1600:] = 0.0  # final 0.1 s of digital silence
        stats = analyze_signal(AudioClip(samples=samples, sample_rate=16000))
        assert stats.tail_ma_ratio == 0.0

    def test_constant_clip_ratio_one(self):
        clip = AudioClip(samples=np.full(8000, 0.3), sample_rate=8000)
        assert analyze_signal(clip).tail_ma_ratio == pytest.approx(1.0)

    def test_abrupt_ending_beats_faded_twin(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            sr = 8000
            length = int(rng.integers(sr // 2, 2 * sr))
            x = rng.uniform(0.2, 0.9) * np.sin(
                2 * np.pi * rng.uniform(100, 1000) * np.arange(length) / sr
            )
            abrupt = analyze_signal(AudioClip(samples=x, sample_rate=sr)).tail_ma_ratio
            fade_len = int(0.15 * sr)
            fade = x[-1] * np.linspace(1.0, 0.0, fade_len)
            faded = analyze_signal(
                AudioClip(samples=np.concatenate([x, fade]), sample_rate=sr)
            ).tail_ma_ratio
            assert abrupt > faded

    def test_empty_clip(self):
        with pytest.raises(EmptyClip):
            analyze_signal(AudioClip(samples=np.array([]), sample_rate=8000))


class TestRenderViews:
    def test_constant_envelope(self):
        clip = AudioClip(samples=np.full(1600, 0.3), sample_rate=16000)
        views = render_views(clip, max_points=10)
        assert views.envelope.shape == (10, 2)
        assert np.allclose(views.envelope, 0.3)

    def test_partition_arithmetic(self):
        clip = AudioClip(samples=np.zeros(16000), sample_rate=16000)
        views = render_views(clip, max_points=100)
        assert views.envelope.shape == (100, 2)
        assert len(views.envelope_times) == 100

    def test_envelope_min_le_max(self):
        rng = np.random.default_rng(4)
        clip = AudioClip(samples=rng.uniform(-1, 1, 5000), sample_rate=8000)
        views = render_views(clip, max_points=64)
        assert (views.envelope[:, 0] <= views.envelope[:, 1]).all()

    def test_tone_dominates_nearest_bin_per_column(self):
        clip = tone(2000.0, 0.5)
        views = render_views(clip)
        target = int(np.argmin(np.abs(views.freq_axis - 2000.0)))
        peaks = np.argmax(views.spectrogram, axis=1)
        assert np.all(np.abs(peaks - target) <= 1)

    def test_column_cap(self):
        clip = tone(500.0, 4.0)
        views = render_views(clip, max_columns=50)
        assert views.spectrogram.shape[0] <= 50
        assert len(views.time_axis) == views.spectrogram.shape[0]

    def test_empty_clip(self):
        with pytest.raises(EmptyClip):
            render_views(AudioClip(samples=np.array([]), sample_rate=8000))
