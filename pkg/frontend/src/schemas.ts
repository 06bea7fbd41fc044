/**
 * Zod mirrors of the decision service's JSON bodies.
 *
 * The service speaks snake_case with an explicit schema_version. Response
 * schemas are strict: an unexpected field means the service and this client
 * have drifted apart, and that should fail loudly at the boundary instead
 * of flowing through the UI unnoticed.
 */

import { z } from "zod";

/** Ball outcomes the service accepts, in scoring order. */
export const OUTCOME_TOKENS = ["0", "1", "2", "3", "4", "6", "W"] as const;

export const outcomeTokenSchema = z.enum(OUTCOME_TOKENS);

export type OutcomeToken = z.infer<typeof outcomeTokenSchema>;

/** Chase state: runs still needed, balls left, wickets in hand. */
export const matchStateSchema = z
  .object({
    runs_needed: z.number().int().nonnegative(),
    balls_remaining: z.number().int().nonnegative(),
    wickets_in_hand: z.number().int().nonnegative(),
  })
  .strict();

export type MatchStateBody = z.infer<typeof matchStateSchema>;

export const terminalStatusSchema = z.enum(["WIN", "LOSS", "IN_PROGRESS"]);

export type TerminalStatus = z.infer<typeof terminalStatusSchema>;

export const healthResponseSchema = z
  .object({
    schema_version: z.literal(1),
    status: z.string(),
  })
  .strict();

export type HealthResponse = z.infer<typeof healthResponseSchema>;

const boundsSchema = z
  .object({
    max_runs: z.number().int(),
    max_balls: z.number().int(),
    max_wickets: z.number().int(),
  })
  .strict();

const rewardSchema = z
  .object({
    win_reward: z.number(),
    loss_reward: z.number(),
    per_wicket_penalty: z.number(),
  })
  .strict();

export const bundleInfoSchema = z
  .object({
    bundle_id: z.string(),
    created_at: z.string(),
    model_hash: z.string(),
    bounds: boundsSchema,
    reward: rewardSchema,
  })
  .strict();

export type BundleInfo = z.infer<typeof bundleInfoSchema>;

export const bundlesResponseSchema = z
  .object({
    schema_version: z.literal(1),
    bundles: z.array(bundleInfoSchema),
  })
  .strict();

export type BundlesResponse = z.infer<typeof bundlesResponseSchema>;

/** One action with the value the service computed for it. */
export const rankedActionSchema = z
  .object({
    action: z.string(),
    value: z.number(),
  })
  .strict();

export type RankedAction = z.infer<typeof rankedActionSchema>;

export const recommendResponseSchema = z
  .object({
    schema_version: z.literal(1),
    bundle_id: z.string(),
    state: matchStateSchema,
    recommendations: z.array(rankedActionSchema).nonempty(),
  })
  .strict();

export type RecommendResponse = z.infer<typeof recommendResponseSchema>;

export const branchSchema = z
  .object({
    outcome: z.string(),
    probability: z.number(),
    successor: matchStateSchema,
    successor_value: z.number(),
    contribution: z.number(),
  })
  .strict();

export type Branch = z.infer<typeof branchSchema>;

export const actionWhatIfSchema = z
  .object({
    action: z.string(),
    value: z.number(),
    branches: z.array(branchSchema),
  })
  .strict();

export type ActionWhatIf = z.infer<typeof actionWhatIfSchema>;

export const whatIfResponseSchema = z
  .object({
    schema_version: z.literal(1),
    bundle_id: z.string(),
    state: matchStateSchema,
    per_action: z.array(actionWhatIfSchema).nonempty(),
  })
  .strict();

export type WhatIfResponse = z.infer<typeof whatIfResponseSchema>;

export const simulateResponseSchema = z
  .object({
    schema_version: z.literal(1),
    bundle_id: z.string(),
    state: matchStateSchema,
    episodes: z.number().int(),
    wins: z.number().int(),
    win_rate: z.number(),
    standard_error: z.number(),
    seed: z.number().int(),
  })
  .strict();

export type SimulateResponse = z.infer<typeof simulateResponseSchema>;

export const applyOutcomeResponseSchema = z
  .object({
    schema_version: z.literal(1),
    state: matchStateSchema,
    terminal_status: terminalStatusSchema,
  })
  .strict();

export type ApplyOutcomeResponse = z.infer<typeof applyOutcomeResponseSchema>;

/**
 * Error envelope. The service puts structured details under `detail`
 * with a machine-readable `reason`; framework-level validation errors
 * put a list there instead, so `detail` stays loose and the client
 * extracts `reason` only when it is present.
 */
export const errorBodySchema = z.object({ detail: z.unknown() });

export type ErrorBody = z.infer<typeof errorBodySchema>;

/** Pull the machine-readable reason out of an error body, if it has one. */
export function errorReason(body: unknown): string | null {
  const parsed = errorBodySchema.safeParse(body);
  if (!parsed.success) return null;
  const detail = parsed.data.detail;
  if (typeof detail === "object" && detail !== null && !Array.isArray(detail)) {
    const reason = (detail as Record<string, unknown>)["reason"];
    if (typeof reason === "string") return reason;
  }
  return null;
}

/**
 * Exported session history: enough to replay a session ball by ball
 * against the service and verify the same trajectory comes back.
 */
export const historyDocSchema = z
  .object({
    schema_version: z.literal(1),
    kind: z.literal("explorer-history"),
    bundle_id: z.string(),
    start: matchStateSchema,
    events: z.array(
      z
        .object({
          state: matchStateSchema,
          action: z.string(),
          outcome: outcomeTokenSchema,
        })
        .strict(),
    ),
    trajectory: z.array(z.number()),
  })
  .strict();

export type HistoryDoc = z.infer<typeof historyDocSchema>;
