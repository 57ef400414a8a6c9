import { api } from "./api.js";
import { clear, debounce, el } from "./dom.js";
import { TABLE_COLUMNS, buildRow } from "./format.js";
import type { QueryState } from "./state.js";
import { toggleSort } from "./state.js";

export interface TableCallbacks {
  onStateChange(next: QueryState): void;
  onOpenDetail(id: number): void;
}

// One in-flight list request at a time: every request takes a sequence
// number and stale responses are dropped.
let requestSeq = 0;

export function renderTable(
  root: HTMLElement,
  state: QueryState,
  callbacks: TableCallbacks,
): void {
  clear(root);

  const banner = el("div", { class: "banner hidden", role: "alert" });
  const filterBox = el("input", {
    class: "filter-box",
    type: "text",
    placeholder: "filter: field:op:value (e.g. cer:>:0.1, text:contains:foo)",
    value: state.filter,
    "aria-label": "filter samples",
  });
  filterBox.addEventListener(
    "input",
    debounce(() => {
      callbacks.onStateChange({ ...state, filter: filterBox.value.trim(), page: 0 });
    }, 300),
  );

  const table = el("table", { class: "samples" });
  const head = el("tr");
  for (const column of TABLE_COLUMNS) {
    const th = el("th", { tabindex: "0", role: "button" }, [column]);
    if (state.sort === column) th.classList.add(state.dir === "asc" ? "sorted-asc" : "sorted-desc");
    const fire = () => callbacks.onStateChange(toggleSort(state, column));
    th.addEventListener("click", fire);
    th.addEventListener("keydown", (event) => {
      if (event.key === "Enter" || event.key === " ") {
        event.preventDefault();
        fire();
      }
    });
    head.append(th);
  }
  table.append(el("thead", {}, [head]));
  const body = el("tbody");
  table.append(body);

  const pager = el("div", { class: "pager" });
  root.append(banner, filterBox, table, pager);

  const seq = ++requestSeq;
  api
    .samples(state)
    .then((page) => {
      if (seq !== requestSeq) return; // superseded by a newer query
      banner.classList.add("hidden");
      clear(body);
      for (const item of page.items) {
        const cells = buildRow(item);
        const tr = el("tr", { class: "sample-row", "data-id": String(item.id) });
        for (const column of TABLE_COLUMNS) {
          const cell = cells[column];
          tr.append(
            el("td", { class: `col-${column}`, "data-raw": JSON.stringify(cell.raw ?? null) }, [
              cell.display,
            ]),
          );
        }
        tr.addEventListener("click", () => callbacks.onOpenDetail(item.id));
        body.append(tr);
      }
      renderPager(pager, state, page.total, callbacks);
    })
    .catch((error: unknown) => {
      if (seq !== requestSeq) return;
      banner.textContent = `request failed: ${String(error)}`;
      banner.classList.remove("hidden"); // table keeps its previous rows
    });
}

function renderPager(
  pager: HTMLElement,
  state: QueryState,
  total: number,
  callbacks: TableCallbacks,
): void {
  clear(pager);
  const pages = Math.max(1, Math.ceil(total / state.pageSize));
  const prev = el("button", {}, ["prev"]) as HTMLButtonElement;
  const next = el("button", {}, ["next"]) as HTMLButtonElement;
  prev.disabled = state.page <= 0;
  next.disabled = state.page >= pages - 1;
  prev.addEventListener("click", () => callbacks.onStateChange({ ...state, page: state.page - 1 }));
  next.addEventListener("click", () => callbacks.onStateChange({ ...state, page: state.page + 1 }));
  pager.append(
    prev,
    el("span", { class: "page-info" }, [
      `page ${state.page + 1} / ${pages} — ${total} samples`,
    ]),
    next,
  );
}
