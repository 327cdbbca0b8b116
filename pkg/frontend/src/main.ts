// Page wiring: one in-flight search at a time (a new submission cancels
// the pending one), plus a periodic health poll.  The coordinator address
// is the single runtime config value `window.MATHSEARCH_COORDINATOR`.

import { fetchHealth, searchFormulas } from "./api.js";
import { renderError, renderHealthView, renderSearchView } from "./render.js";
import { toErrorView, toHealthView, toSearchView } from "./view.js";

declare global {
  interface Window {
    MATHSEARCH_COORDINATOR?: string;
  }
}

const HEALTH_POLL_MS = 3000;

function coordinatorBase(): string {
  return window.MATHSEARCH_COORDINATOR ?? "http://127.0.0.1:8080";
}

function main(): void {
  const form = document.getElementById("search-form") as HTMLFormElement;
  const queryBox = document.getElementById("query") as HTMLInputElement;
  const kBox = document.getElementById("k") as HTMLInputElement;
  const results = document.getElementById("results") as HTMLElement;
  const health = document.getElementById("health") as HTMLElement;

  let inFlight: AbortController | null = null;

  async function submit(): Promise<void> {
    const query = queryBox.value;
    if (!query.trim()) {
      return;
    }
    inFlight?.abort();
    const controller = new AbortController();
    inFlight = controller;
    const k = Math.max(1, Number(kBox.value) || 10);
    try {
      const resp = await searchFormulas(coordinatorBase(), query, k, controller.signal);
      if (controller.signal.aborted) {
        return; // a newer submission took over
      }
      renderSearchView(results, toSearchView(resp));
    } catch (err) {
      if (controller.signal.aborted) {
        return;
      }
      renderError(results, toErrorView(err), () => void submit());
    } finally {
      if (inFlight === controller) {
        inFlight = null;
      }
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });

  async function pollHealth(): Promise<void> {
    try {
      renderHealthView(health, toHealthView(await fetchHealth(coordinatorBase())));
    } catch {
      renderHealthView(health, toHealthView(null));
    }
  }

  void pollHealth();
  setInterval(() => void pollHealth(), HEALTH_POLL_MS);
}

document.addEventListener("DOMContentLoaded", main);
