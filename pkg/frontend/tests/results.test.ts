import { describe, expect, it } from "vitest";

import { buildResultsView, parseEmbedding, renderResults } from "../src/results.js";
import { ResultsSummary } from "../src/types.js";
import { StubDocument, StubElement } from "./stubDom.js";

const summary: ResultsSummary = {
  experiment: 2,
  participantCount: 20,
  participants: ["p001", "p002"],
  taskCount: 2,
  warmupCount: 1,
  perTaskTallies: {
    t01: { cmm_ol: { most: 10, least: 0 }, p6m_1: { most: 10, least: 0 } },
    t02: { p3: { most: 4, least: 0 }, p4m_1: { most: 16, least: 0 } },
  },
  lateResponses: [["p002", "t02"]],
  similarity: {
    labels: ["cmm_ol", "moroccan", "p6m_1"],
    values: [
      [1.0, 0.75, 1.0],
      [0.75, 1.0, 0.5],
      [1.0, 0.5, 1.0],
    ],
    observed: [
      [true, true, true],
      [true, true, true],
      [true, true, true],
    ],
    meta: {},
  },
};

const embeddingCsv = `label,x,y,z
cmm_ol,0,0,0
moroccan,10,10,10
p6m_1,5,5,5
`;

const rgbCsv = `label,r,g,b
cmm_ol,0,0,0
moroccan,255,255,255
p6m_1,128,128,128
`;

describe("results view", () => {
  it("builds one tally row per (task, option)", () => {
    const view = buildResultsView(summary);
    expect(view.tallyRows).toHaveLength(4);
    const row = view.tallyRows.find(
      (r) => r.taskId === "t01" && r.option === "cmm_ol",
    );
    expect(row).toMatchObject({ most: 10, least: 0 });
  });

  it("parses the analysis CLI embedding and RGB formats", () => {
    const pts = parseEmbedding(embeddingCsv, rgbCsv);
    expect(pts).toHaveLength(3);
    expect(pts[0]).toMatchObject({ label: "cmm_ol", x: 0, rgb: [0, 0, 0] });
    expect(pts[1].rgb).toEqual([255, 255, 255]);
  });

  it("renders service numbers verbatim (no fabricated values)", () => {
    const doc = new StubDocument();
    const view = buildResultsView(summary, embeddingCsv, rgbCsv);
    const root = renderResults(doc, view) as StubElement;

    const rows = root.findAll((e) => e.className === "tally-row");
    expect(rows).toHaveLength(4);

    // the 0.75 similarity of the overlap ornament is displayed
    const heatCells = root.findAll((e) => e.className === "heat-cell");
    expect(heatCells.some((c) => c.textContent === "0.75")).toBe(true);

    // scatter dots carry the RGB swatch colors from the table
    const dots = root.findAll((e) => e.className === "scatter-dot");
    expect(dots).toHaveLength(3);
    const moroccan = dots.find((d) => d.textContent === "moroccan")!;
    expect(moroccan.attrs.style).toContain("rgb(255,255,255)");

    // late response listed
    expect(root.allText()).toContain("p002/t02");
  });

  it("renders experiment-1 headline from retained/excluded counts", () => {
    const doc = new StubDocument();
    const view = buildResultsView({
      ...summary,
      experiment: 1,
      similarity: undefined,
      retainedCount: 17,
      excluded: new Array(13).fill("p"),
    });
    const root = renderResults(doc, view) as StubElement;
    expect(root.allText()).toContain("17 retained");
    expect(root.allText()).toContain("13 excluded");
  });
});
