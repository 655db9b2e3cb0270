/** Experimenter dashboard page: read-only rendering of GET /api/results,
 * plus the embedding scatter when the analysis CLI's embedding.csv and
 * rgb.csv are served next to the page. */

import { ApiError, ServiceClient } from "./api.js";
import { buildResultsView, renderResults } from "./results.js";

function param(name: string, fallback: string): string {
  const v = new URLSearchParams(window.location.search).get(name);
  return v === null || v === "" ? fallback : v;
}

async function fetchOptional(url: string): Promise<string | undefined> {
  try {
    const resp = await fetch(url);
    return resp.ok ? await resp.text() : undefined;
  } catch {
    return undefined;
  }
}

async function boot(): Promise<void> {
  const base = param("base", "http://localhost:8000");
  const client = new ServiceClient(base, (url, init) => fetch(url, init));
  const container = document.getElementById("dashboard");
  if (container === null) {
    throw new Error("missing #dashboard");
  }
  try {
    const summary = await client.results();
    const embedding = await fetchOptional(param("embedding", "embedding.csv"));
    const rgb = await fetchOptional(param("rgb", "rgb.csv"));
    const view = buildResultsView(summary, embedding, rgb);
    container.innerHTML = "";
    container.appendChild(
      renderResults(document, view) as unknown as HTMLElement,
    );
  } catch (err) {
    container.textContent =
      err instanceof ApiError && err.status === 409
        ? "session still running"
        : `failed to load results: ${String(err)}`;
  }
}

void boot();
