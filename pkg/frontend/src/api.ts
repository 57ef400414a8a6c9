import type {
  DatasetStats,
  RenderedViews,
  SampleDetail,
  SamplePage,
  WordPage,
} from "./types.js";
import type { QueryState } from "./state.js";

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url} -> ${response.status}`);
  }
  return (await response.json()) as T;
}

export function sampleQueryUrl(state: QueryState, base = ""): string {
  const params = new URLSearchParams();
  params.set("page", String(state.page));
  params.set("page_size", String(state.pageSize));
  if (state.sort) {
    params.set("sort", state.sort);
    params.set("dir", state.dir);
  }
  if (state.filter) params.set("filter", state.filter);
  return `${base}/api/samples?${params.toString()}`;
}

export const api = {
  stats: (base = "") => getJson<DatasetStats>(`${base}/api/stats`),
  samples: (state: QueryState, base = "") => getJson<SamplePage>(sampleQueryUrl(state, base)),
  detail: (id: number, base = "") => getJson<SampleDetail>(`${base}/api/samples/${id}`),
  views: (id: number, maxPoints = 600, base = "") =>
    getJson<RenderedViews>(`${base}/api/samples/${id}/views?max_points=${maxPoints}`),
  words: (sort: string, dir: string, page = 0, pageSize = 200, base = "") =>
    getJson<WordPage>(
      `${base}/api/words?sort=${sort}&dir=${dir}&page=${page}&page_size=${pageSize}`,
    ),
  audioUrl: (id: number, base = "") => `${base}/api/samples/${id}/audio`,
};
