// Typed client for the coordinator HTTP API.

export interface SearchHit {
  id: number;
  score: number;
  latex: string | null;
  source: string | null;
}

export interface SearchResponse {
  query: string;
  k: number;
  hits: SearchHit[];
  search_time_s: number;
  partial: boolean;
}

export interface WorkerHealth {
  shard: number;
  address: string;
  status: "healthy" | "unreachable";
  formula_count: number | null;
}

export interface HealthResponse {
  status: string;
  shards: number;
  workers: WorkerHealth[];
}

/** Coordinator answered with an error payload (e.g. MalformedLatex). */
export class CoordinatorError extends Error {
  constructor(readonly reason: string, readonly detail?: string) {
    super(detail ? `${reason}: ${detail}` : reason);
    this.name = "CoordinatorError";
  }
}

export function buildSearchUrl(base: string, query: string, k: number): string {
  const url = new URL("/search", base);
  url.searchParams.set("q", query);
  url.searchParams.set("k", String(k));
  return url.toString();
}

export function buildHealthUrl(base: string): string {
  return new URL("/health", base).toString();
}

export async function searchFormulas(
  base: string,
  query: string,
  k: number,
  signal?: AbortSignal,
): Promise<SearchResponse> {
  const resp = await fetch(buildSearchUrl(base, query, k), { signal });
  let body: unknown;
  try {
    body = await resp.json();
  } catch {
    throw new CoordinatorError(`HTTP ${resp.status}`, "response was not JSON");
  }
  if (!resp.ok) {
    const err = body as { error?: string; detail?: string };
    throw new CoordinatorError(err.error ?? `HTTP ${resp.status}`, err.detail);
  }
  return body as SearchResponse;
}

export async function fetchHealth(
  base: string,
  signal?: AbortSignal,
): Promise<HealthResponse> {
  const resp = await fetch(buildHealthUrl(base), { signal });
  if (!resp.ok) {
    throw new CoordinatorError(`HTTP ${resp.status}`);
  }
  return (await resp.json()) as HealthResponse;
}
