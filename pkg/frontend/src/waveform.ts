import type { RenderedViews } from "./types.js";
import { colorFor } from "./colormap.js";

export function drawWaveform(canvas: HTMLCanvasElement, views: RenderedViews): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10243a";
  ctx.fillRect(0, 0, width, height);
  const n = views.envelope.length;
  if (n === 0) return;
  const mid = height / 2;
  ctx.fillStyle = "#6fc3ff";
  const bar = Math.max(1, width / n);
  for (let i = 0; i < n; i++) {
    const [lo, hi] = views.envelope[i]!;
    const x = (i / n) * width;
    const top = mid - hi * mid;
    const bottom = mid - lo * mid;
    ctx.fillRect(x, top, bar, Math.max(1, bottom - top));
  }
  ctx.strokeStyle = "rgba(255,255,255,0.25)";
  ctx.beginPath();
  ctx.moveTo(0, mid);
  ctx.lineTo(width, mid);
  ctx.stroke();
}

export function drawSpectrogram(canvas: HTMLCanvasElement, views: RenderedViews): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const frames = views.spectrogram.length;
  const bins = frames > 0 ? views.spectrogram[0]!.length : 0;
  if (frames === 0 || bins === 0) return;

  let lo = Infinity;
  let hi = -Infinity;
  for (const column of views.spectrogram) {
    for (const v of column) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const floor = Math.max(lo, hi - 80); // 80 dB display range
  const span = hi - floor || 1;

  const image = ctx.createImageData(frames, bins);
  for (let t = 0; t < frames; t++) {
    const column = views.spectrogram[t]!;
    for (let f = 0; f < bins; f++) {
      const [r, g, b] = colorFor((column[f]! - floor) / span);
      const y = bins - 1 - f; // low frequencies at the bottom
      const offset = (y * frames + t) * 4;
      image.data[offset] = r;
      image.data[offset + 1] = g;
      image.data[offset + 2] = b;
      image.data[offset + 3] = 255;
    }
  }
  // paint at native resolution then scale to the css size
  const staging = document.createElement("canvas");
  staging.width = frames;
  staging.height = bins;
  staging.getContext("2d")!.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = true;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(staging, 0, 0, canvas.width, canvas.height);
}
