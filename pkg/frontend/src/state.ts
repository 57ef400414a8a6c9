// The table's query state lives in the URL so any view is shareable and a
// refresh reproduces it exactly.

export type SortDir = "asc" | "desc";
export type ViewName = "table" | "detail" | "stats";

export interface QueryState {
  view: ViewName;
  page: number;
  pageSize: number;
  sort: string | null;
  dir: SortDir;
  filter: string;
  detailId: number | null;
}

export const DEFAULT_STATE: QueryState = {
  view: "table",
  page: 0,
  pageSize: 50,
  sort: null,
  dir: "asc",
  filter: "",
  detailId: null,
};

export function encodeState(state: QueryState): string {
  const params = new URLSearchParams();
  if (state.view !== "table") params.set("view", state.view);
  if (state.page !== 0) params.set("page", String(state.page));
  if (state.pageSize !== DEFAULT_STATE.pageSize) params.set("page_size", String(state.pageSize));
  if (state.sort) {
    params.set("sort", state.sort);
    if (state.dir !== "asc") params.set("dir", state.dir);
  }
  if (state.filter) params.set("filter", state.filter);
  if (state.detailId !== null) params.set("id", String(state.detailId));
  const query = params.toString();
  return query ? `?${query}` : "";
}

export function decodeState(search: string): QueryState {
  const params = new URLSearchParams(search);
  const view = params.get("view");
  const sort = params.get("sort");
  const dir = params.get("dir");
  const id = params.get("id");
  return {
    view: view === "detail" || view === "stats" ? view : "table",
    page: intOr(params.get("page"), 0),
    pageSize: intOr(params.get("page_size"), DEFAULT_STATE.pageSize),
    sort: sort || null,
    dir: dir === "desc" ? "desc" : "asc",
    filter: params.get("filter") ?? "",
    detailId: id === null ? null : intOr(id, 0),
  };
}

function intOr(raw: string | null, fallback: number): number {
  if (raw === null) return fallback;
  const value = Number.parseInt(raw, 10);
  return Number.isFinite(value) && value >= 0 ? value : fallback;
}

export function toggleSort(state: QueryState, field: string): QueryState {
  if (state.sort !== field) return { ...state, sort: field, dir: "desc", page: 0 };
  if (state.dir === "desc") return { ...state, dir: "asc", page: 0 };
  return { ...state, sort: null, dir: "asc", page: 0 };
}
