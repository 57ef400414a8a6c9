import type { SampleRow } from "./types.js";

// Every number shown in the UI is fetched, never computed here; cells carry
// the raw API value alongside the display string so the two can be compared.

export interface Cell {
  raw: unknown; // exactly what the API returned
  display: string;
}

export const TABLE_COLUMNS = [
  "id",
  "text",
  "pred_text",
  "duration",
  "wer",
  "cer",
  "score",
  "char_rate",
] as const;

export type ColumnName = (typeof TABLE_COLUMNS)[number];

export function cellFor(row: SampleRow, column: ColumnName): Cell {
  const raw = row[column];
  return { raw, display: displayValue(raw) };
}

export function displayValue(raw: unknown): string {
  if (raw === undefined || raw === null) return "";
  if (typeof raw === "number") {
    if (Number.isInteger(raw)) return String(raw);
    return raw.toFixed(4);
  }
  return String(raw);
}

export function buildRow(row: SampleRow): Record<ColumnName, Cell> {
  const cells = {} as Record<ColumnName, Cell>;
  for (const column of TABLE_COLUMNS) {
    cells[column] = cellFor(row, column);
  }
  return cells;
}

export function formatHours(hours: number): string {
  return `${hours.toFixed(4)} h`;
}

export function formatPercent(rate: number | undefined): string {
  return rate === undefined ? "" : `${(rate * 100).toFixed(1)}%`;
}
