import type { DiffOp } from "./types.js";

// Rendering rule: matches plain; substitutions highlighted pairwise; deletes
// struck out in the reference lane; inserts highlighted in the hypothesis
// lane.  The two lanes read as the reference and hypothesis sentences.

export interface DiffSpan {
  text: string;
  kind: "plain" | "substitute" | "delete" | "insert";
  pair?: string; // for substitutions: the token on the other side
}

export interface DiffLanes {
  ref: DiffSpan[];
  hyp: DiffSpan[];
}

export function buildDiffLanes(ops: DiffOp[]): DiffLanes {
  const ref: DiffSpan[] = [];
  const hyp: DiffSpan[] = [];
  for (const op of ops) {
    switch (op.kind) {
      case "match":
        ref.push({ text: op.ref ?? "", kind: "plain" });
        hyp.push({ text: op.hyp ?? "", kind: "plain" });
        break;
      case "substitute":
        ref.push({ text: op.ref ?? "", kind: "substitute", pair: op.hyp });
        hyp.push({ text: op.hyp ?? "", kind: "substitute", pair: op.ref });
        break;
      case "delete":
        ref.push({ text: op.ref ?? "", kind: "delete" });
        break;
      case "insert":
        hyp.push({ text: op.hyp ?? "", kind: "insert" });
        break;
    }
  }
  return { ref, hyp };
}

export function countKind(lanes: DiffLanes, kind: DiffSpan["kind"]): number {
  return [...lanes.ref, ...lanes.hyp].filter((span) => span.kind === kind).length;
}
