// Shapes mirror the HTTP API exactly; unknown fields are carried through
// untouched so custom manifest attributes stay visible.

export interface SampleRow {
  id: number;
  audio_filepath: string;
  duration: number;
  text: string;
  pred_text?: string;
  wer?: number;
  cer?: number;
  wmr?: number;
  score?: number;
  char_rate?: number;
  [extra: string]: unknown;
}

export interface SamplePage {
  total: number;
  items: SampleRow[];
}

export type DiffKind = "match" | "substitute" | "delete" | "insert";

export interface DiffOp {
  kind: DiffKind;
  ref?: string;
  hyp?: string;
}

export interface SignalStats {
  sample_rate: number;
  duration: number;
  peak_level: number;
  bandwidth: number;
  tail_ma_ratio: number;
}

export interface SampleDetail extends SampleRow {
  diff: DiffOp[] | null;
  signal: SignalStats | null;
}

export interface HistogramData {
  edges: number[];
  counts: number[];
}

export interface DatasetStats {
  entry_count: number;
  total_hours: number;
  alphabet: string[];
  vocabulary_size: number;
  duration_histogram: HistogramData;
  char_rate_histogram: HistogramData;
  word_rate_histogram: HistogramData;
}

export interface RenderedViews {
  envelope: [number, number][];
  envelope_times: number[];
  spectrogram: number[][]; // [time][freq], dB
  time_axis: number[];
  freq_axis: number[];
}

export interface WordRow {
  word: string;
  occurrences: number;
  matched: number;
  accuracy: number;
}

export interface WordPage {
  total: number;
  items: WordRow[];
}
