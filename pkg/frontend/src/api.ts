/**
 * Typed HTTP client for the decision service.
 *
 * Every response is validated against its schema before it reaches the
 * rest of the app, and every non-2xx status becomes a ServiceError with
 * the service's machine-readable reason attached. The fetch function is
 * injectable so tests can run against recorded response bodies.
 */

import {
  applyOutcomeResponseSchema,
  bundlesResponseSchema,
  errorReason,
  healthResponseSchema,
  recommendResponseSchema,
  simulateResponseSchema,
  whatIfResponseSchema,
  type ApplyOutcomeResponse,
  type BundlesResponse,
  type HealthResponse,
  type MatchStateBody,
  type OutcomeToken,
  type RecommendResponse,
  type SimulateResponse,
  type WhatIfResponse,
} from "./schemas.js";

/** Minimal fetch surface the client needs; global fetch satisfies it. */
export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

/** A non-2xx answer from the service, with its reason when one was given. */
export class ServiceError extends Error {
  readonly status: number;
  readonly reason: string;
  readonly body: unknown;

  constructor(status: number, reason: string, body: unknown) {
    super(`service returned ${status}: ${reason}`);
    this.name = "ServiceError";
    this.status = status;
    this.reason = reason;
    this.body = body;
  }
}

export class ExplorerClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? (fetch as FetchLike);
  }

  async health(): Promise<HealthResponse> {
    return healthResponseSchema.parse(await this.get("/health"));
  }

  async bundles(): Promise<BundlesResponse> {
    return bundlesResponseSchema.parse(await this.get("/bundles"));
  }

  async recommend(bundleId: string, state: MatchStateBody): Promise<RecommendResponse> {
    const body = await this.post("/recommend", {
      schema_version: 1,
      bundle_id: bundleId,
      state,
    });
    return recommendResponseSchema.parse(body);
  }

  async whatIf(bundleId: string, state: MatchStateBody): Promise<WhatIfResponse> {
    const body = await this.post("/what-if", {
      schema_version: 1,
      bundle_id: bundleId,
      state,
    });
    return whatIfResponseSchema.parse(body);
  }

  async simulate(
    bundleId: string,
    state: MatchStateBody,
    episodes: number,
    seed: number,
  ): Promise<SimulateResponse> {
    const body = await this.post("/simulate", {
      schema_version: 1,
      bundle_id: bundleId,
      state,
      episodes,
      seed,
    });
    return simulateResponseSchema.parse(body);
  }

  async applyOutcome(state: MatchStateBody, outcome: OutcomeToken): Promise<ApplyOutcomeResponse> {
    const body = await this.post("/apply-outcome", {
      schema_version: 1,
      state,
      outcome,
    });
    return applyOutcomeResponseSchema.parse(body);
  }

  private async get(path: string): Promise<unknown> {
    const resp = await this.fetchFn(this.baseUrl + path);
    return this.decode(resp);
  }

  private async post(path: string, payload: unknown): Promise<unknown> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return this.decode(resp);
  }

  private async decode(resp: {
    ok: boolean;
    status: number;
    text(): Promise<string>;
  }): Promise<unknown> {
    const text = await resp.text();
    let body: unknown = null;
    try {
      body = JSON.parse(text);
    } catch {
      if (resp.ok) throw new ServiceError(resp.status, "unparseable_body", text);
    }
    if (!resp.ok) {
      throw new ServiceError(resp.status, errorReason(body) ?? `http_${resp.status}`, body);
    }
    return body;
  }
}
