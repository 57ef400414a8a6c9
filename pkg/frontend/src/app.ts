import { renderDetail } from "./detail.js";
import { renderStats } from "./stats.js";
import { renderTable } from "./table.js";
import { DEFAULT_STATE, decodeState, encodeState, type QueryState } from "./state.js";

function main(): void {
  const root = document.getElementById("app");
  const nav = document.getElementById("nav");
  if (!root || !nav) return;

  let state = decodeState(window.location.search);

  const setState = (next: QueryState, push = true) => {
    state = next;
    const url = `${window.location.pathname}${encodeState(state)}`;
    if (push) window.history.pushState(null, "", url);
    render();
  };

  const render = () => {
    for (const link of nav.querySelectorAll("a[data-view]")) {
      link.classList.toggle("active", link.getAttribute("data-view") === state.view);
    }
    if (state.view === "detail" && state.detailId !== null) {
      renderDetail(root, state.detailId, () =>
        setState({ ...state, view: "table", detailId: null }),
      );
    } else if (state.view === "stats") {
      renderStats(root);
    } else {
      renderTable(root, state, {
        onStateChange: (next) => setState(next),
        onOpenDetail: (id) => setState({ ...state, view: "detail", detailId: id }),
      });
    }
  };

  nav.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("a[data-view]");
    if (!target) return;
    event.preventDefault();
    const view = target.getAttribute("data-view");
    if (view === "stats") setState({ ...state, view: "stats" });
    else setState({ ...DEFAULT_STATE, filter: state.filter });
  });

  window.addEventListener("popstate", () => {
    state = decodeState(window.location.search);
    render();
  });

  render();
}

document.addEventListener("DOMContentLoaded", main);
