/**
 * Browser wiring for the match explorer.
 *
 * All decision data comes from the service; this file only moves it
 * between the DOM and the pure session/render modules. One request runs
 * at a time: controls are disabled while a call is in flight, and a
 * failed call leaves the last good screen up behind a stale-data banner.
 */

import { ExplorerClient, ServiceError } from "./api.js";
import {
  canRedo,
  canUndo,
  exportHistory,
  importHistory,
  recordBall,
  redo,
  startSession,
  undo,
  validateStartInput,
  type BallResolution,
  type ExplorerSession,
  type ReplayPort,
} from "./session.js";
import { renderErrorBanner, renderSession, renderValidation } from "./render.js";
import { OUTCOME_TOKENS, type MatchStateBody, type OutcomeToken } from "./schemas.js";

interface App {
  client: ExplorerClient;
  bundleId: string;
  session: ExplorerSession | null;
  busy: boolean;
}

const DEFAULT_START: MatchStateBody = {
  runs_needed: 50,
  balls_remaining: 30,
  wickets_in_hand: 5,
};

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) throw new Error(`missing element #${id}`);
  return found as T;
}

function describe(error: unknown): string {
  if (error instanceof ServiceError) return error.reason;
  if (error instanceof Error) return error.message;
  return String(error);
}

function replayPort(app: App): ReplayPort {
  return {
    recommend: (state) => app.client.recommend(app.bundleId, state),
    whatIf: (state) => app.client.whatIf(app.bundleId, state),
    applyOutcome: (state, outcome) => app.client.applyOutcome(state, outcome),
  };
}

function paint(app: App, banner = ""): void {
  const pane = element<HTMLDivElement>("session-pane");
  pane.innerHTML = (banner ? renderErrorBanner(banner) : "") +
    (app.session ? renderSession(app.session) : "<p>start a session to explore a chase</p>");
  const terminal = app.session !== null && app.session.view.terminalStatus !== "IN_PROGRESS";
  for (const token of OUTCOME_TOKENS) {
    element<HTMLButtonElement>(`outcome-${token}`).disabled = app.busy || app.session === null || terminal;
  }
  element<HTMLButtonElement>("undo").disabled = app.busy || app.session === null || !canUndo(app.session);
  element<HTMLButtonElement>("redo").disabled = app.busy || app.session === null || !canRedo(app.session);
  element<HTMLButtonElement>("start").disabled = app.busy;
  element<HTMLButtonElement>("export").disabled = app.busy || app.session === null;
  element<HTMLButtonElement>("import").disabled = app.busy;
}

async function guarded(app: App, work: () => Promise<void>): Promise<void> {
  if (app.busy) return;
  app.busy = true;
  paint(app);
  try {
    await work();
    paint(app);
  } catch (error) {
    paint(app, describe(error));
  } finally {
    app.busy = false;
    paint(app);
  }
}

async function begin(app: App, state: MatchStateBody): Promise<void> {
  const recommendation = await app.client.recommend(app.bundleId, state);
  const whatIf = await app.client.whatIf(app.bundleId, state);
  app.session = startSession(app.bundleId, recommendation, whatIf);
}

async function resolveBall(app: App, outcome: OutcomeToken): Promise<BallResolution> {
  if (app.session === null) throw new Error("no session");
  const applied = await app.client.applyOutcome(app.session.view.state, outcome);
  if (applied.terminal_status !== "IN_PROGRESS") {
    return { applied, recommendation: null, whatIf: null };
  }
  return {
    applied,
    recommendation: await app.client.recommend(app.bundleId, applied.state),
    whatIf: await app.client.whatIf(app.bundleId, applied.state),
  };
}

export function boot(): void {
  const app: App = {
    client: new ExplorerClient(element<HTMLInputElement>("base-url").value || window.location.origin),
    bundleId: element<HTMLInputElement>("bundle-id").value || "demo",
    session: null,
    busy: false,
  };

  element<HTMLButtonElement>("start").addEventListener("click", () => {
    const runs = element<HTMLInputElement>("start-runs").value;
    const balls = element<HTMLInputElement>("start-balls").value;
    const wickets = element<HTMLInputElement>("start-wickets").value;
    const problems = validateStartInput(runs, balls, wickets);
    element<HTMLDivElement>("validation").innerHTML = renderValidation(problems);
    if (problems.length > 0) return;
    app.client = new ExplorerClient(element<HTMLInputElement>("base-url").value || window.location.origin);
    app.bundleId = element<HTMLInputElement>("bundle-id").value || "demo";
    void guarded(app, () =>
      begin(app, {
        runs_needed: Number(runs),
        balls_remaining: Number(balls),
        wickets_in_hand: Number(wickets),
      }),
    );
  });

  for (const token of OUTCOME_TOKENS) {
    element<HTMLButtonElement>(`outcome-${token}`).addEventListener("click", () => {
      void guarded(app, async () => {
        if (app.session === null) return;
        const resolution = await resolveBall(app, token);
        app.session = recordBall(app.session, token, resolution);
      });
    });
  }

  element<HTMLButtonElement>("undo").addEventListener("click", () => {
    if (app.session !== null && canUndo(app.session)) {
      app.session = undo(app.session);
      paint(app);
    }
  });

  element<HTMLButtonElement>("redo").addEventListener("click", () => {
    if (app.session !== null && canRedo(app.session)) {
      app.session = redo(app.session);
      paint(app);
    }
  });

  element<HTMLButtonElement>("export").addEventListener("click", () => {
    if (app.session !== null) {
      element<HTMLTextAreaElement>("history-text").value = exportHistory(app.session);
    }
  });

  element<HTMLButtonElement>("import").addEventListener("click", () => {
    const text = element<HTMLTextAreaElement>("history-text").value;
    void guarded(app, async () => {
      app.session = await importHistory(text, replayPort(app));
    });
  });

  element<HTMLInputElement>("start-runs").value = String(DEFAULT_START.runs_needed);
  element<HTMLInputElement>("start-balls").value = String(DEFAULT_START.balls_remaining);
  element<HTMLInputElement>("start-wickets").value = String(DEFAULT_START.wickets_in_hand);
  paint(app);
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
