/**
 * Fixture plumbing for the test suites.
 *
 * Fixtures are raw response bodies recorded from the decision service,
 * byte for byte. A stub fetch serves them by route and request content,
 * so the client and session modules run against exactly what the live
 * service would send without needing it running.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type { ReplayPort } from "../src/session.js";
import type { MatchStateBody, OutcomeToken } from "../src/schemas.js";

const here = path.dirname(fileURLToPath(import.meta.url));

/** Raw recorded body, exactly as the service sent it. */
export function fixtureText(name: string): string {
  return readFileSync(path.join(here, "fixtures", name), "utf8");
}

/** Parsed recorded body. */
export function fixture<T = unknown>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

function stateKey(state: MatchStateBody): string {
  return `${state.runs_needed},${state.balls_remaining},${state.wickets_in_hand}`;
}

const QUERY_FIXTURES: Record<string, string> = {
  "50,30,5": "50_30_5",
  "46,29,5": "46_29_5",
  "50,29,4": "50_29_4",
  "46,28,4": "46_28_4",
  "12,9,1": "12_9_1",
  "3,4,2": "3_4_2",
};

const APPLY_FIXTURES: Record<string, string> = {
  "50,30,5 4": "apply_4_from_50_30_5.json",
  "50,30,5 W": "apply_W_from_50_30_5.json",
  "46,29,5 W": "apply_W_from_46_29_5.json",
  "12,9,1 W": "apply_W_loss.json",
  "3,4,2 4": "apply_4_win.json",
};

interface RequestLog {
  url: string;
  method: string;
  payload: unknown;
}

/** Stub fetch wired to the recorded fixtures, with a call log. */
export function serviceFetch(): { fetchFn: FetchLike; log: RequestLog[] } {
  const log: RequestLog[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const payload = init?.body === undefined ? null : JSON.parse(init.body);
    log.push({ url, method, payload });
    const route = new URL(url).pathname;
    const { status, name } = resolve(route, payload);
    return new Response(fixtureText(name), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, log };
}

function resolve(route: string, payload: unknown): { status: number; name: string } {
  const body = payload as {
    bundle_id?: string;
    state?: MatchStateBody;
    outcome?: string;
  } | null;
  if (route === "/health") return { status: 200, name: "health.json" };
  if (route === "/bundles") return { status: 200, name: "bundles.json" };
  if (route === "/recommend" || route === "/what-if") {
    if (body?.bundle_id !== "demo") {
      return { status: 404, name: "error_unknown_bundle.json" };
    }
    const key = stateKey(body.state as MatchStateBody);
    if (key === "0,5,3") return { status: 422, name: "error_terminal.json" };
    if (key === "99,30,5") return { status: 400, name: "error_out_of_bounds.json" };
    const tag = QUERY_FIXTURES[key];
    if (tag === undefined) throw new Error(`no recorded fixture for state ${key}`);
    const prefix = route === "/recommend" ? "recommend" : "whatif";
    return { status: 200, name: `${prefix}_${tag}.json` };
  }
  if (route === "/apply-outcome") {
    const key = `${stateKey(body?.state as MatchStateBody)} ${body?.outcome}`;
    const name = APPLY_FIXTURES[key];
    if (name === undefined) throw new Error(`no recorded fixture for apply ${key}`);
    return { status: 200, name };
  }
  if (route === "/simulate") return { status: 200, name: "simulate_50_30_5.json" };
  throw new Error(`unrouted path ${route}`);
}

/** ReplayPort backed by the recorded fixtures, with a call counter. */
export function fixturePort(): ReplayPort & { calls: string[] } {
  const calls: string[] = [];
  return {
    calls,
    async recommend(state: MatchStateBody) {
      const tag = QUERY_FIXTURES[stateKey(state)];
      if (tag === undefined) throw new Error(`no recommend fixture for ${stateKey(state)}`);
      calls.push(`recommend ${stateKey(state)}`);
      return fixture(`recommend_${tag}.json`);
    },
    async whatIf(state: MatchStateBody) {
      const tag = QUERY_FIXTURES[stateKey(state)];
      if (tag === undefined) throw new Error(`no what-if fixture for ${stateKey(state)}`);
      calls.push(`what-if ${stateKey(state)}`);
      return fixture(`whatif_${tag}.json`);
    },
    async applyOutcome(state: MatchStateBody, outcome: OutcomeToken) {
      const name = APPLY_FIXTURES[`${stateKey(state)} ${outcome}`];
      if (name === undefined) {
        throw new Error(`no apply fixture for ${stateKey(state)} ${outcome}`);
      }
      calls.push(`apply ${stateKey(state)} ${outcome}`);
      return fixture(name);
    },
  };
}

/** Every numeric leaf in a parsed JSON value, depth first. */
export function numericLeaves(value: unknown): number[] {
  if (typeof value === "number") return [value];
  if (Array.isArray(value)) return value.flatMap(numericLeaves);
  if (value !== null && typeof value === "object") {
    return Object.values(value).flatMap(numericLeaves);
  }
  return [];
}
