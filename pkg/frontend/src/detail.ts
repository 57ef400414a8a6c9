import { api } from "./api.js";
import { buildDiffLanes } from "./diff.js";
import { clear, el } from "./dom.js";
import { displayValue, formatPercent } from "./format.js";
import type { SampleDetail } from "./types.js";
import { drawSpectrogram, drawWaveform } from "./waveform.js";

export function renderDetail(root: HTMLElement, id: number, onBack: () => void): void {
  clear(root);
  const back = el("button", { class: "back" }, ["← back to table"]);
  back.addEventListener("click", onBack);
  const panel = el("div", { class: "detail" });
  root.append(back, panel);

  api
    .detail(id)
    .then((detail) => {
      panel.append(metricsBadges(detail));
      panel.append(
        el("div", { class: "texts" }, [
          el("div", { class: "label" }, ["reference"]),
          diffLane(detail, "ref"),
          el("div", { class: "label" }, ["hypothesis"]),
          diffLane(detail, "hyp"),
        ]),
      );
      panel.append(audioPlayer(id));
      panel.append(signalBlock(detail));
      const waveCanvas = el("canvas", {
        class: "wave",
        width: "900",
        height: "160",
        "aria-label": "waveform",
      });
      const specCanvas = el("canvas", {
        class: "spec",
        width: "900",
        height: "240",
        "aria-label": "spectrogram",
      });
      panel.append(waveCanvas, specCanvas);
      api
        .views(id)
        .then((views) => {
          drawWaveform(waveCanvas, views);
          drawSpectrogram(specCanvas, views);
        })
        .catch(() => {
          waveCanvas.replaceWith(
            el("div", { class: "notice" }, ["no audio available for rendering"]),
          );
          specCanvas.remove();
        });
    })
    .catch((error: unknown) => {
      panel.append(el("div", { class: "banner", role: "alert" }, [String(error)]));
    });
}

function metricsBadges(detail: SampleDetail): HTMLElement {
  const badges = el("div", { class: "badges" });
  const entries: [string, string][] = [
    ["wer", formatPercent(detail.wer)],
    ["cer", formatPercent(detail.cer)],
    ["wmr", formatPercent(detail.wmr)],
    ["score", displayValue(detail.score)],
    ["char_rate", displayValue(detail.char_rate)],
    ["duration", `${displayValue(detail.duration)} s`],
  ];
  for (const [name, value] of entries) {
    if (!value) continue;
    badges.append(
      el("span", { class: `badge badge-${name}`, "data-metric": name }, [`${name} ${value}`]),
    );
  }
  return badges;
}

function diffLane(detail: SampleDetail, lane: "ref" | "hyp"): HTMLElement {
  const container = el("div", { class: `lane lane-${lane}` });
  if (!detail.diff) {
    container.append(lane === "ref" ? detail.text : (detail.pred_text ?? ""));
    return container;
  }
  const lanes = buildDiffLanes(detail.diff);
  for (const span of lanes[lane]) {
    const node = el("span", { class: `diff diff-${span.kind}` }, [span.text]);
    if (span.pair) node.title = `↔ ${span.pair}`;
    container.append(node, " ");
  }
  return container;
}

function audioPlayer(id: number): HTMLElement {
  const wrap = el("div", { class: "player" });
  const audio = el("audio", { controls: "", preload: "none" }) as HTMLAudioElement;
  audio.src = api.audioUrl(id);
  audio.addEventListener("error", () => {
    audio.replaceWith(el("div", { class: "notice" }, ["audio missing — player disabled"]));
  });
  wrap.append(audio);
  return wrap;
}

function signalBlock(detail: SampleDetail): HTMLElement {
  const block = el("div", { class: "signal" });
  if (!detail.signal) return block;
  const s = detail.signal;
  block.append(
    el("span", {}, [`sample rate ${s.sample_rate} Hz`]),
    el("span", {}, [`peak ${s.peak_level.toFixed(2)} dBFS`]),
    el("span", {}, [`bandwidth ${s.bandwidth.toFixed(0)} Hz`]),
    el("span", {}, [`tail MA ratio ${s.tail_ma_ratio.toFixed(3)}`]),
  );
  return block;
}
