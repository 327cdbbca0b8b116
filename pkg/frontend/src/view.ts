// Pure view-model builders; everything the page shows is derived here.
// Hits are presented exactly in the order the coordinator returned them:
// no reordering, filtering, or re-scoring on the client.

import type { HealthResponse, SearchResponse } from "./api.js";

export interface HitView {
  rank: number;
  id: number;
  latex: string;
  source: string;
  score: string;
}

export interface SearchView {
  query: string;
  k: number;
  hits: HitView[];
  latency: string;
  searchTimeS: number;
  partial: boolean;
}

export function formatScore(score: number): string {
  return score.toFixed(2);
}

export function formatLatency(seconds: number): string {
  if (seconds < 1) {
    return `${(seconds * 1000).toFixed(1)} ms`;
  }
  return `${seconds.toFixed(3)} s`;
}

export function toSearchView(resp: SearchResponse): SearchView {
  return {
    query: resp.query,
    k: resp.k,
    hits: resp.hits.map((hit, i) => ({
      rank: i + 1,
      id: hit.id,
      latex: hit.latex ?? "",
      source: hit.source ?? "unknown",
      score: formatScore(hit.score),
    })),
    latency: formatLatency(resp.search_time_s),
    searchTimeS: resp.search_time_s,
    partial: resp.partial,
  };
}

export type BadgeState = "healthy" | "unreachable";

export interface ShardBadge {
  shard: number;
  address: string;
  state: BadgeState;
  label: string;
}

export interface HealthView {
  coordinatorReachable: boolean;
  degraded: boolean;
  badges: ShardBadge[];
}

/** Pass null when the coordinator itself could not be reached. */
export function toHealthView(resp: HealthResponse | null): HealthView {
  if (resp === null) {
    return { coordinatorReachable: false, degraded: true, badges: [] };
  }
  const badges = resp.workers.map((w) => ({
    shard: w.shard,
    address: w.address,
    state: w.status === "healthy" ? ("healthy" as const) : ("unreachable" as const),
    label:
      w.status === "healthy"
        ? `shard ${w.shard}: ${w.formula_count ?? 0} formulas`
        : `shard ${w.shard}: unreachable`,
  }));
  return {
    coordinatorReachable: true,
    degraded: resp.status !== "ok",
    badges,
  };
}

export type ErrorKind = "coordinator" | "network";

export interface ErrorView {
  kind: ErrorKind;
  message: string;
  retry: boolean; // network failures get a retry affordance
}

export function toErrorView(err: unknown): ErrorView {
  if (err instanceof Error && err.name === "CoordinatorError") {
    return { kind: "coordinator", message: err.message, retry: false };
  }
  const message = err instanceof Error ? err.message : String(err);
  return { kind: "network", message: `coordinator unreachable (${message})`, retry: true };
}
