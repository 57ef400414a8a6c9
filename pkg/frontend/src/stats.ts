import { api } from "./api.js";
import { clear, el } from "./dom.js";
import { formatHours, formatPercent } from "./format.js";
import type { DatasetStats, HistogramData, WordRow } from "./types.js";

export function renderStats(root: HTMLElement): void {
  clear(root);
  const panel = el("div", { class: "stats" });
  root.append(panel);

  api
    .stats()
    .then((stats) => {
      panel.append(
        el("div", { class: "headline" }, [
          el("span", { class: "stat", "data-stat": "hours" }, [formatHours(stats.total_hours)]),
          el("span", { class: "stat", "data-stat": "count" }, [`${stats.entry_count} utterances`]),
          el("span", { class: "stat" }, [`${stats.vocabulary_size} distinct words`]),
        ]),
      );
      const chips = el("div", { class: "alphabet" });
      for (const ch of stats.alphabet) {
        chips.append(el("span", { class: "chip" }, [ch === " " ? "␣" : ch]));
      }
      panel.append(el("h3", {}, [`alphabet (${stats.alphabet.length})`]), chips);
      panel.append(
        histogram("duration (s)", stats.duration_histogram),
        histogram("characters / second", stats.char_rate_histogram),
        histogram("words / second", stats.word_rate_histogram),
      );
      panel.append(el("h3", {}, ["word accuracy"]));
      const zeroOnly = el("input", { type: "checkbox", id: "zero-acc" }) as HTMLInputElement;
      const zeroLabel = el("label", { for: "zero-acc" }, ["zero-accuracy words only"]);
      const wordsTable = el("table", { class: "words" });
      panel.append(el("div", { class: "words-controls" }, [zeroOnly, zeroLabel]), wordsTable);
      const refresh = () => loadWords(wordsTable, zeroOnly.checked);
      zeroOnly.addEventListener("change", refresh);
      refresh();
    })
    .catch((error: unknown) => {
      panel.append(el("div", { class: "banner", role: "alert" }, [String(error)]));
    });
}

function histogram(title: string, hist: HistogramData): HTMLElement {
  const block = el("div", { class: "histogram" });
  block.append(el("h3", {}, [title]));
  const bars = el("div", { class: "bars" });
  const top = Math.max(1, ...hist.counts);
  hist.counts.forEach((count, i) => {
    const bar = el("div", {
      class: "bar",
      title: `${hist.edges[i]}–${hist.edges[i + 1]}: ${count}`,
      "data-count": String(count),
    });
    bar.style.height = `${(count / top) * 100}%`;
    bars.append(bar);
  });
  block.append(bars);
  return block;
}

function loadWords(table: HTMLElement, zeroOnly: boolean): void {
  api
    .words("occurrences", "desc", 0, 500)
    .then((page) => {
      clear(table);
      const head = el("tr");
      for (const name of ["word", "occurrences", "matched", "accuracy"]) {
        head.append(el("th", {}, [name]));
      }
      table.append(el("thead", {}, [head]));
      const body = el("tbody");
      const rows: WordRow[] = zeroOnly
        ? page.items.filter((row) => row.accuracy === 0)
        : page.items;
      for (const row of rows.slice(0, 100)) {
        body.append(
          el("tr", {}, [
            el("td", {}, [row.word]),
            el("td", {}, [String(row.occurrences)]),
            el("td", {}, [String(row.matched)]),
            el("td", {}, [formatPercent(row.accuracy)]),
          ]),
        );
      }
      table.append(body);
    })
    .catch(() => {
      clear(table);
      table.append(el("caption", {}, ["word table unavailable"]));
    });
}
