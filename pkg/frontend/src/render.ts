import type { Mode, ModelInfo } from "./api.js";
import { formatScore } from "./format.js";
import type { LogEntry } from "./log.js";
import type { SweepRow } from "./sweep.js";

// Renderers return HTML strings so they can be unit-tested without a
// browser; main.ts assigns them to innerHTML. Raw score values ride along
// in title attributes for hover and focus inspection.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderModelOptions(
  models: ModelInfo[],
  selected: string | null,
): string {
  return models
    .map((m) => {
      const sel = m.model_id === selected ? " selected" : "";
      const id = escapeHtml(m.model_id);
      return `<option value="${id}"${sel}>${id} (${m.full_dim}d)</option>`;
    })
    .join("");
}

export function renderDimOptions(
  ladder: number[],
  selected: number | null,
): string {
  return ladder
    .map((dim) => {
      const sel = dim === selected ? " selected" : "";
      return `<option value="${dim}"${sel}>${dim}</option>`;
    })
    .join("");
}

function scoreSpan(value: number): string {
  return (
    `<span class="score" tabindex="0" title="${String(value)}">` +
    `${formatScore(value)}</span>`
  );
}

/** Pair mode shows one score; one_vs_three labels each candidate. */
export function renderScores(scores: number[], mode: Mode): string {
  if (mode === "pair") {
    return `<div class="score-row">similarity ${scoreSpan(scores[0])}</div>`;
  }
  return scores
    .map(
      (s, i) =>
        `<div class="score-row">candidate ${i + 1} ${scoreSpan(s)}</div>`,
    )
    .join("");
}

export function renderSweepTable(rows: SweepRow[]): string {
  const body = rows
    .map((row) => {
      const cell =
        row.error !== undefined
          ? `<td class="sweep-error">${escapeHtml(row.error)}</td>`
          : `<td>${scoreSpan(row.score as number)}</td>`;
      return `<tr><td>${row.dim}</td>${cell}</tr>`;
    })
    .join("");
  return (
    `<table class="sweep"><thead><tr><th>dim</th><th>score</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderErrorBanner(message: string): string {
  return (
    `<div class="banner">${escapeHtml(message)} ` +
    `<button type="button" id="retry">retry</button></div>`
  );
}

/** Compact trace of every request the page has made this session. */
export function renderLogEntries(entries: LogEntry[]): string {
  return entries
    .map((e) => {
      const outcome = e.response
        ? `scores=[${e.response.scores.map(String).join(", ")}]`
        : `error=${escapeHtml(e.error ?? "")}`;
      return (
        `<div class="log-entry">#${e.seq} ${e.at} ` +
        `model=${escapeHtml(e.request.model_id)} dim=${e.request.dim} ` +
        `mode=${e.request.mode} ${outcome}</div>`
      );
    })
    .join("");
}
