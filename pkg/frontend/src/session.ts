/**
 * Explorer session state and its pure transitions.
 *
 * A session walks one chase ball by ball. The service owns every number:
 * each point on the win-probability trajectory is the value the service
 * reported for the top-ranked action at that moment, never something the
 * client derived. Terminal points are the status itself (a win plots at 1,
 * a loss at 0) because the service has no value to report once the chase
 * is decided.
 *
 * All transitions return new session objects; undo and redo restore and
 * re-apply whole snapshots, so undo(redo(s)) and redo(undo(s)) give back
 * exactly the session they started from.
 */

import {
  historyDocSchema,
  type ApplyOutcomeResponse,
  type HistoryDoc,
  type MatchStateBody,
  type OutcomeToken,
  type RankedAction,
  type RecommendResponse,
  type TerminalStatus,
  type WhatIfResponse,
} from "./schemas.js";

/** One recorded delivery: the state it was faced in, the action the
 * service recommended at the time, and what actually happened. */
export interface BallRecord {
  state: MatchStateBody;
  action: string;
  outcome: OutcomeToken;
}

/** Everything the screen shows for the current state. Recommendation and
 * what-if are null exactly when the chase is over. */
export interface SessionView {
  state: MatchStateBody;
  terminalStatus: TerminalStatus;
  recommendation: RecommendResponse | null;
  whatIf: WhatIfResponse | null;
}

interface Snapshot {
  view: SessionView;
  history: BallRecord[];
  trajectory: number[];
}

export interface ExplorerSession {
  bundleId: string;
  start: MatchStateBody;
  view: SessionView;
  history: BallRecord[];
  /** Win-probability trajectory: one point per view, starting point first. */
  trajectory: number[];
  past: Snapshot[];
  future: Snapshot[];
}

/** Service answers needed to advance the session by one ball. The
 * recommendation and what-if are required while the chase is live and
 * must be null once it is decided. */
export interface BallResolution {
  applied: ApplyOutcomeResponse;
  recommendation: RecommendResponse | null;
  whatIf: WhatIfResponse | null;
}

/** The service's top-ranked action: first entry, server order. */
export function topAction(recommendation: RecommendResponse): RankedAction {
  return recommendation.recommendations[0];
}

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

function snapshot(session: ExplorerSession): Snapshot {
  return clone({
    view: session.view,
    history: session.history,
    trajectory: session.trajectory,
  });
}

function trajectoryPoint(status: TerminalStatus, recommendation: RecommendResponse | null): number {
  if (status === "WIN") return 1;
  if (status === "LOSS") return 0;
  if (recommendation === null) {
    throw new Error("a live state needs a recommendation to plot");
  }
  return topAction(recommendation).value;
}

/** Begin a session from the service's answers for the starting state. */
export function startSession(
  bundleId: string,
  recommendation: RecommendResponse,
  whatIf: WhatIfResponse,
): ExplorerSession {
  const state = clone(recommendation.state);
  return {
    bundleId,
    start: state,
    view: {
      state,
      terminalStatus: "IN_PROGRESS",
      recommendation: clone(recommendation),
      whatIf: clone(whatIf),
    },
    history: [],
    trajectory: [topAction(recommendation).value],
    past: [],
    future: [],
  };
}

/** Record one ball. Consumes the service's apply-outcome answer plus the
 * follow-up recommendation and what-if for the new state (null at a
 * terminal). Pushes the old view onto the undo stack and clears redo. */
export function recordBall(
  session: ExplorerSession,
  outcome: OutcomeToken,
  resolution: BallResolution,
): ExplorerSession {
  if (session.view.terminalStatus !== "IN_PROGRESS") {
    throw new Error("the chase is already decided; undo to explore further");
  }
  if (session.view.recommendation === null) {
    throw new Error("cannot record a ball without a current recommendation");
  }
  const status = resolution.applied.terminal_status;
  if (status === "IN_PROGRESS" && resolution.recommendation === null) {
    throw new Error("a live successor state needs a recommendation");
  }
  if (status !== "IN_PROGRESS" && resolution.recommendation !== null) {
    throw new Error("a terminal state has no recommendation");
  }
  const record: BallRecord = {
    state: clone(session.view.state),
    action: topAction(session.view.recommendation).action,
    outcome,
  };
  return {
    ...session,
    view: {
      state: clone(resolution.applied.state),
      terminalStatus: status,
      recommendation: resolution.recommendation && clone(resolution.recommendation),
      whatIf: resolution.whatIf && clone(resolution.whatIf),
    },
    history: [...session.history, record],
    trajectory: [...session.trajectory, trajectoryPoint(status, resolution.recommendation)],
    past: [...session.past, snapshot(session)],
    future: [],
  };
}

export function canUndo(session: ExplorerSession): boolean {
  return session.past.length > 0;
}

export function canRedo(session: ExplorerSession): boolean {
  return session.future.length > 0;
}

/** Step back one ball, restoring the exact prior view. */
export function undo(session: ExplorerSession): ExplorerSession {
  const prior = session.past[session.past.length - 1];
  if (prior === undefined) throw new Error("nothing to undo");
  return {
    ...session,
    ...clone(prior),
    past: session.past.slice(0, -1),
    future: [...session.future, snapshot(session)],
  };
}

/** Re-apply the most recently undone ball, exactly as it was. */
export function redo(session: ExplorerSession): ExplorerSession {
  const next = session.future[session.future.length - 1];
  if (next === undefined) throw new Error("nothing to redo");
  return {
    ...session,
    ...clone(next),
    past: [...session.past, snapshot(session)],
    future: session.future.slice(0, -1),
  };
}

/** Serialize the session's history as structured text. The document holds
 * the start state, every recorded ball, and the trajectory as reported by
 * the service, so a reader can replay it and check the same numbers come
 * back. */
export function exportHistory(session: ExplorerSession): string {
  const doc: HistoryDoc = {
    schema_version: 1,
    kind: "explorer-history",
    bundle_id: session.bundleId,
    start: session.start,
    events: session.history.map((record) => clone(record)),
    trajectory: [...session.trajectory],
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

/** Service calls importHistory needs; ExplorerClient satisfies it with a
 * bundle id baked in, and tests satisfy it from recorded responses. */
export interface ReplayPort {
  recommend(state: MatchStateBody): Promise<RecommendResponse>;
  whatIf(state: MatchStateBody): Promise<WhatIfResponse>;
  applyOutcome(state: MatchStateBody, outcome: OutcomeToken): Promise<ApplyOutcomeResponse>;
}

/** Rebuild a session from exported history by replaying every ball through
 * the service. Refuses the document if the replayed states or trajectory
 * disagree with what it recorded: the service is deterministic for a given
 * bundle, so any mismatch means the document and bundle do not belong
 * together. */
export async function importHistory(text: string, port: ReplayPort): Promise<ExplorerSession> {
  const doc = historyDocSchema.parse(JSON.parse(text));
  let session = startSession(
    doc.bundle_id,
    await port.recommend(doc.start),
    await port.whatIf(doc.start),
  );
  for (const event of doc.events) {
    if (!sameState(session.view.state, event.state)) {
      throw new Error("history does not replay: recorded state diverged");
    }
    const applied = await port.applyOutcome(session.view.state, event.outcome);
    const live = applied.terminal_status === "IN_PROGRESS";
    session = recordBall(session, event.outcome, {
      applied,
      recommendation: live ? await port.recommend(applied.state) : null,
      whatIf: live ? await port.whatIf(applied.state) : null,
    });
  }
  if (
    session.trajectory.length !== doc.trajectory.length ||
    session.trajectory.some((v, i) => v !== doc.trajectory[i])
  ) {
    throw new Error("history does not replay: trajectory diverged");
  }
  return session;
}

function sameState(a: MatchStateBody, b: MatchStateBody): boolean {
  return (
    a.runs_needed === b.runs_needed &&
    a.balls_remaining === b.balls_remaining &&
    a.wickets_in_hand === b.wickets_in_hand
  );
}

/** Validate raw form input for a new session before any request is made.
 * Returns human-readable problems; an empty list means go. */
export function validateStartInput(runs: string, balls: string, wickets: string): string[] {
  const problems: string[] = [];
  const fields: Array<[string, string]> = [
    ["runs target", runs],
    ["balls remaining", balls],
    ["wickets in hand", wickets],
  ];
  const parsed: number[] = [];
  for (const [label, raw] of fields) {
    const text = raw.trim();
    if (!/^-?\d+$/.test(text)) {
      problems.push(`${label} must be a whole number`);
      continue;
    }
    const value = Number(text);
    if (value < 0) {
      problems.push(`${label} must be non-negative`);
      continue;
    }
    parsed.push(value);
  }
  if (problems.length === 0 && parsed[0] === 0) {
    problems.push("state is already a win");
  }
  return problems;
}
