"""speechforge: build ASR training datasets from long recordings and explore them.

The toolbox has two halves.  The construction half normalizes raw text,
force-aligns it against CTC log-probability matrices, cuts audio clips, and
emits training manifests.  The analysis half computes error metrics and
signal statistics over manifests, filters them by rules, and serves an
interactive dataset explorer.
"""
from .audio import AudioClip, RenderedViews, SignalStats, analyze_signal, cut_segments, read_wav, render_views, write_wav
from .ctcseg import (
    AlignParams,
    AlignedSegment,
    LogProbMatrix,
    Vocabulary,
    align,
    consensus,
    load_segments,
    load_vocabulary,
    multi_window_align,
    persist_segments,
    read_logprobs,
    tokenize,
    write_logprobs,
)
from .dataset import (
    DatasetStats,
    FilterRule,
    ManifestEntry,
    apply_filters,
    char_rate_screen,
    compute_stats,
    kfold_split,
    read_manifest,
    write_manifest,
)
from .metrics import (
    EditOp,
    ErrorReport,
    aggregate_metrics,
    edit_alignment,
    utterance_metrics,
    word_accuracy_table,
)
from .textnorm import (
    NormalizationConfig,
    NormalizedUtterance,
    apply_substitutions,
    expand_numbers,
    load_config,
    normalize,
    save_config,
    split_sentences,
    transliterate,
)

__version__ = "0.1.0"
