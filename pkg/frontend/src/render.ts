/**
 * Pure HTML renderers for the explorer screens.
 *
 * Every function maps service data to a markup string with no DOM access,
 * so the views are testable as plain strings. Numbers pass through
 * String(), which prints the same shortest decimal form the service wrote
 * into the JSON body: what the user reads is the service's number to every
 * digit, not a client-side reformat. Row order is the service's ranking
 * order, preserved as served.
 */

import { topAction } from "./session.js";
import type { ExplorerSession } from "./session.js";
import type {
  MatchStateBody,
  RecommendResponse,
  SimulateResponse,
  TerminalStatus,
  WhatIfResponse,
} from "./schemas.js";

/** Escape text for interpolation into markup. */
export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function num(value: number): string {
  return escapeHtml(String(value));
}

/** One-line chase summary, e.g. "50 needed off 30 balls, 5 wickets in hand". */
export function renderState(state: MatchStateBody): string {
  return (
    `<p class="state" data-runs="${state.runs_needed}"` +
    ` data-balls="${state.balls_remaining}" data-wickets="${state.wickets_in_hand}">` +
    `${state.runs_needed} needed off ${state.balls_remaining} balls, ` +
    `${state.wickets_in_hand} wickets in hand</p>`
  );
}

/** Ranked action list with the service's top pick highlighted. */
export function renderRecommendation(recommendation: RecommendResponse): string {
  const rows = recommendation.recommendations
    .map((entry, index) => {
      const marker = index === 0 ? ' class="top-action"' : "";
      return `<li${marker}><span class="action">${escapeHtml(entry.action)}</span> <span class="value">${num(entry.value)}</span></li>`;
    })
    .join("");
  return `<ol class="recommendation">${rows}</ol>`;
}

/** Per-action win-probability table with a branch breakdown per row.
 * Rows appear exactly in the order the service ranked them; ties keep
 * the served order. */
export function renderWhatIfTable(whatIf: WhatIfResponse): string {
  const rows = whatIf.per_action
    .map((entry, index) => {
      const marker = index === 0 ? ' class="top-action"' : "";
      const branches = entry.branches
        .map(
          (branch) =>
            `<tr><td>${escapeHtml(branch.outcome)}</td>` +
            `<td>${num(branch.probability)}</td>` +
            `<td>${branch.successor.runs_needed},${branch.successor.balls_remaining},${branch.successor.wickets_in_hand}</td>` +
            `<td>${num(branch.successor_value)}</td>` +
            `<td>${num(branch.contribution)}</td></tr>`,
        )
        .join("");
      return (
        `<tr${marker}><td class="action">${escapeHtml(entry.action)}</td>` +
        `<td class="value">${num(entry.value)}</td>` +
        `<td><details><summary>branches</summary>` +
        `<table class="branches"><thead><tr>` +
        `<th>outcome</th><th>probability</th><th>successor</th><th>value</th><th>contribution</th>` +
        `</tr></thead><tbody>${branches}</tbody></table>` +
        `</details></td></tr>`
      );
    })
    .join("");
  return (
    `<table class="what-if"><thead><tr>` +
    `<th>action</th><th>win probability</th><th>breakdown</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

/** Monte Carlo check against the exact value, numbers verbatim. */
export function renderSimulation(simulation: SimulateResponse): string {
  return (
    `<p class="simulation">${simulation.wins} wins in ${simulation.episodes} episodes: ` +
    `win rate <span class="value">${num(simulation.win_rate)}</span>, ` +
    `standard error ${num(simulation.standard_error)} (seed ${simulation.seed})</p>`
  );
}

/** Banner for a decided chase. */
export function renderTerminal(status: TerminalStatus): string {
  if (status === "WIN") {
    return `<div class="terminal win">Chase complete: match WON</div>`;
  }
  if (status === "LOSS") {
    return `<div class="terminal loss">Chase failed: match LOST</div>`;
  }
  return "";
}

/** Stale-data banner shown when a service call fails: the screen keeps
 * the last good answers and says so. */
export function renderErrorBanner(message: string): string {
  return (
    `<div class="banner stale">service unavailable (${escapeHtml(message)}); ` +
    `showing the last data received</div>`
  );
}

/** Inline validation problems, rendered before any request is made. */
export function renderValidation(problems: string[]): string {
  if (problems.length === 0) return "";
  const items = problems.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  return `<ul class="validation">${items}</ul>`;
}

/** Win-probability trajectory: an SVG sparkline plus the exact values.
 * Interior points are service-reported top-action values; a terminal
 * endpoint plots the decided status (win at 1, loss at 0). */
export function renderTrajectory(trajectory: number[]): string {
  const width = 360;
  const height = 120;
  const pad = 8;
  const step = trajectory.length > 1 ? (width - 2 * pad) / (trajectory.length - 1) : 0;
  const points = trajectory
    .map((v, i) => `${(pad + i * step).toFixed(1)},${(height - pad - v * (height - 2 * pad)).toFixed(1)}`)
    .join(" ");
  const values = trajectory.map((v) => `<li>${num(v)}</li>`).join("");
  return (
    `<figure class="trajectory">` +
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="win probability over balls">` +
    `<polyline fill="none" stroke="currentColor" stroke-width="2" points="${points}"/>` +
    `</svg>` +
    `<ol class="trajectory-values">${values}</ol>` +
    `</figure>`
  );
}

/** Full session pane: state, terminal banner or recommendation plus
 * what-if, then the trajectory so far. */
export function renderSession(session: ExplorerSession): string {
  const parts: string[] = [renderState(session.view.state)];
  if (session.view.terminalStatus !== "IN_PROGRESS") {
    parts.push(renderTerminal(session.view.terminalStatus));
  } else {
    if (session.view.recommendation !== null) {
      const top = topAction(session.view.recommendation);
      parts.push(
        `<p class="headline">recommended: <strong>${escapeHtml(top.action)}</strong> ` +
          `(win probability <span class="value">${num(top.value)}</span>)</p>`,
      );
      parts.push(renderRecommendation(session.view.recommendation));
    }
    if (session.view.whatIf !== null) {
      parts.push(renderWhatIfTable(session.view.whatIf));
    }
  }
  parts.push(renderTrajectory(session.trajectory));
  return `<section class="session">${parts.join("")}</section>`;
}
