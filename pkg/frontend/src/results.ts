/** Experimenter dashboard: tally tables, similarity heatmap and embedding
 * scatter with RGB swatches.
 *
 * Every displayed number comes from the service results payload or from
 * files written by the analysis CLI (embedding.csv / rgb.csv); nothing is
 * computed in the browser.
 */

import { MinimalDocument, el, textCell } from "./dom.js";
import { ResultsSummary } from "./types.js";

export interface TallyRow {
  taskId: string;
  option: string;
  most: number;
  least: number;
}

export interface ScatterPoint {
  label: string;
  x: number;
  y: number;
  z?: number;
  rgb?: [number, number, number];
}

export interface ResultsViewModel {
  experiment: number;
  participantCount: number;
  retainedCount?: number;
  excludedCount?: number;
  tallyRows: TallyRow[];
  lateResponses: [string, string][];
  similarityLabels: string[];
  similarityValues: number[][];
  scatter: ScatterPoint[];
}

export function buildResultsView(
  summary: ResultsSummary,
  embeddingCsv?: string,
  rgbCsv?: string,
): ResultsViewModel {
  const tallyRows: TallyRow[] = [];
  for (const taskId of Object.keys(summary.perTaskTallies).sort()) {
    const tally = summary.perTaskTallies[taskId];
    for (const option of Object.keys(tally).sort()) {
      tallyRows.push({
        taskId,
        option,
        most: tally[option].most,
        least: tally[option].least,
      });
    }
  }
  const sim = summary.similarity;
  return {
    experiment: summary.experiment,
    participantCount: summary.participantCount,
    retainedCount: summary.retainedCount,
    excludedCount: summary.excluded?.length,
    tallyRows,
    lateResponses: summary.lateResponses,
    similarityLabels: sim ? sim.labels : [],
    similarityValues: sim ? sim.values : [],
    scatter: embeddingCsv ? parseEmbedding(embeddingCsv, rgbCsv) : [],
  };
}

/** Parse the embedding CSV (label,x,y[,z]) and optional RGB table emitted
 * by the analysis CLI's embed command. */
export function parseEmbedding(
  embeddingCsv: string,
  rgbCsv?: string,
): ScatterPoint[] {
  const rgb = new Map<string, [number, number, number]>();
  if (rgbCsv) {
    for (const line of csvRows(rgbCsv)) {
      const [label, r, g, b] = line;
      rgb.set(label, [Number(r), Number(g), Number(b)]);
    }
  }
  const out: ScatterPoint[] = [];
  for (const cols of csvRows(embeddingCsv)) {
    const [label, x, y, z] = cols;
    const p: ScatterPoint = { label, x: Number(x), y: Number(y) };
    if (z !== undefined) {
      p.z = Number(z);
    }
    const c = rgb.get(label);
    if (c) {
      p.rgb = c;
    }
    out.push(p);
  }
  return out;
}

function csvRows(text: string): string[][] {
  return text
    .trim()
    .split(/\r?\n/)
    .slice(1)
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function heatColor(v: number): string {
  const t = Math.max(0, Math.min(1, v));
  const r = Math.round(40 + 200 * t);
  const g = Math.round(50 + 120 * t);
  const b = Math.round(140 - 100 * t);
  return `rgb(${r},${g},${b})`;
}

export function renderResults(
  doc: MinimalDocument,
  view: ResultsViewModel,
): ReturnType<MinimalDocument["createElement"]> {
  const root = el(doc, "div", { class: "results" });

  const headline =
    view.experiment === 1 && view.retainedCount !== undefined
      ? `experiment 1: ${view.participantCount} participants, ` +
        `${view.retainedCount} retained, ${view.excludedCount ?? 0} excluded`
      : `experiment ${view.experiment}: ${view.participantCount} participants`;
  root.appendChild(textCell(doc, "h2", headline));

  const table = el(doc, "table", { class: "tally" });
  const head = el(doc, "tr", {}, [
    textCell(doc, "th", "task"),
    textCell(doc, "th", "option"),
    textCell(doc, "th", "most"),
    textCell(doc, "th", "least"),
  ]);
  table.appendChild(head);
  for (const row of view.tallyRows) {
    table.appendChild(
      el(doc, "tr", { class: "tally-row" }, [
        textCell(doc, "td", row.taskId),
        textCell(doc, "td", row.option),
        textCell(doc, "td", String(row.most)),
        textCell(doc, "td", String(row.least)),
      ]),
    );
  }
  root.appendChild(table);

  if (view.similarityLabels.length > 0) {
    const grid = el(doc, "table", { class: "heatmap" });
    const header = el(doc, "tr", {}, [textCell(doc, "th", "")]);
    for (const label of view.similarityLabels) {
      header.appendChild(textCell(doc, "th", label));
    }
    grid.appendChild(header);
    view.similarityValues.forEach((rowVals, i) => {
      const tr = el(doc, "tr", {}, [
        textCell(doc, "th", view.similarityLabels[i]),
      ]);
      rowVals.forEach((v) => {
        const cell = textCell(doc, "td", v.toFixed(2));
        cell.setAttribute("style", `background:${heatColor(v)}`);
        cell.className = "heat-cell";
        tr.appendChild(cell);
      });
      grid.appendChild(tr);
    });
    root.appendChild(grid);
  }

  if (view.scatter.length > 0) {
    const plot = el(doc, "div", { class: "scatter" });
    const xs = view.scatter.map((p) => p.x);
    const ys = view.scatter.map((p) => p.y);
    const span = (vals: number[]) => {
      const lo = Math.min(...vals);
      const hi = Math.max(...vals);
      return hi - lo > 0 ? [lo, hi - lo] : [lo - 0.5, 1];
    };
    const [x0, xw] = span(xs);
    const [y0, yw] = span(ys);
    for (const p of view.scatter) {
      const dot = el(doc, "div", { class: "scatter-dot" });
      dot.textContent = p.label;
      const left = (100 * (p.x - x0)) / xw;
      const top = (100 * (p.y - y0)) / yw;
      const color = p.rgb ? `rgb(${p.rgb[0]},${p.rgb[1]},${p.rgb[2]})` : "#333";
      dot.setAttribute(
        "style",
        `left:${left.toFixed(2)}%;top:${top.toFixed(2)}%;background:${color}`,
      );
      plot.appendChild(dot);
    }
    root.appendChild(plot);
  }

  if (view.lateResponses.length > 0) {
    root.appendChild(
      textCell(
        doc,
        "p",
        `late responses: ${view.lateResponses
          .map(([p, t]) => `${p}/${t}`)
          .join(", ")}`,
      ),
    );
  }
  return root;
}
