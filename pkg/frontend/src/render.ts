// DOM rendering.  Formula typesetting uses KaTeX when the page has loaded
// it; any typesetting failure falls back to the plain LaTeX source so a
// malformed corpus entry can never break the page.

import type { ErrorView, HealthView, SearchView } from "./view.js";

declare global {
  interface Window {
    katex?: { render(latex: string, el: HTMLElement, opts?: object): void };
  }
}

export function typesetFormula(el: HTMLElement, latex: string): void {
  if (window.katex) {
    try {
      window.katex.render(latex, el, { throwOnError: true, displayMode: false });
      return;
    } catch {
      // fall through to plain text
    }
  }
  el.textContent = latex;
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderSearchView(container: HTMLElement, view: SearchView): void {
  container.replaceChildren();
  const meta = el("div", "search-meta");
  meta.append(
    el("span", "latency", `search time ${view.latency}`),
  );
  if (view.partial) {
    meta.append(el("span", "partial-flag", "partial result: one or more shards missing"));
  }
  container.append(meta);

  if (view.hits.length === 0) {
    container.append(el("p", "no-hits", "no similar formulas found"));
    return;
  }
  const list = el("ol", "hits");
  for (const hit of view.hits) {
    const item = el("li", "hit");
    const rendered = el("div", "hit-rendered");
    typesetFormula(rendered, hit.latex);
    item.append(rendered);
    item.append(el("code", "hit-source-text", hit.latex));
    item.append(el("span", "hit-score", `score ${hit.score}`));
    item.append(el("span", "hit-origin", `${hit.source} · id ${hit.id}`));
    list.append(item);
  }
  container.append(list);
}

export function renderError(container: HTMLElement, view: ErrorView, onRetry: () => void): void {
  container.replaceChildren();
  const box = el("div", `error error-${view.kind}`, view.message);
  if (view.retry) {
    const button = el("button", "retry", "retry") as HTMLButtonElement;
    button.addEventListener("click", onRetry);
    box.append(" ");
    box.append(button);
  }
  container.append(box);
}

export function renderHealthView(container: HTMLElement, view: HealthView): void {
  container.replaceChildren();
  if (!view.coordinatorReachable) {
    container.append(el("div", "banner banner-down", "coordinator unreachable"));
    return;
  }
  if (view.degraded) {
    container.append(el("div", "banner banner-degraded", "degraded: some shards unreachable"));
  }
  const row = el("div", "badges");
  for (const badge of view.badges) {
    row.append(el("span", `badge badge-${badge.state}`, badge.label));
  }
  container.append(row);
}
