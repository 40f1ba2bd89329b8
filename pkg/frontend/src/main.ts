/** DOM wiring: renders the ViewState into the page and forwards clicks to
 * the controller.  All state lives in the controller; this file only draws. */

import { Client } from "./api.js";
import { Controller, type ViewState } from "./controller.js";
import {
  escapeHtml,
  fmtKeyset,
  renderTerm,
  transitionHtml,
} from "./format.js";
import { renderGraphSvg } from "./graph.js";
import type { Dir, Kind, TraceEntry } from "./types.js";

const SERVER = (window as { REVPI_SERVER?: string }).REVPI_SERVER ??
  "http://127.0.0.1:8000";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function traceEntryHtml(entry: TraceEntry, index: number): string {
  const arrow = entry.dir === "fwd" ? "→" : "↩";
  const kf = entry.k_f === null
    ? ""
    : `<span class="badge">K_F: ${fmtKeyset(entry.k_f)}</span>`;
  return `<li class="trace-${entry.dir}">` +
    `<span class="idx">${index}</span> ${arrow} ` +
    `<code>${escapeHtml(entry.pretty)}</code> ${kf}</li>`;
}

function transitionList(target: HTMLElement, view: ViewState, dir: Dir) {
  const rows = dir === "fwd" ? view.fwd : view.bwd;
  if (rows.length === 0) {
    target.innerHTML = `<li class="empty">none</li>`;
    return;
  }
  target.innerHTML = rows
    .map(
      (row) =>
        `<li><button data-id="${row.id}" ${view.busy ? "disabled" : ""}>` +
        `${transitionHtml(row)}</button></li>`,
    )
    .join("");
}

function draw(view: ViewState): void {
  const term = el("term");
  const message = el("message");
  message.textContent = view.message;
  message.classList.toggle("visible", view.message !== "");
  if (view.session) {
    term.innerHTML = renderTerm(view.session.state);
    el("session-meta").textContent =
      `session ${view.session.id} (${view.session.semantics}), ` +
      `${view.session.trace_len} steps`;
  } else {
    term.textContent = "no session";
    el("session-meta").textContent = "";
  }
  transitionList(el("fwd-list"), view, "fwd");
  transitionList(el("bwd-list"), view, "bwd");
  el("trace-list").innerHTML = view.trace
    .map((entry, i) => traceEntryHtml(entry, i))
    .join("");
  el("graph").innerHTML = renderGraphSvg(view.graph);
}

function wire(): void {
  const controller = new Controller(new Client(SERVER), draw);

  const source = el<HTMLTextAreaElement>("source-input");
  const semantics = el<HTMLSelectElement>("semantics-select");

  el("start-btn").addEventListener("click", () => {
    void controller.start(source.value.trim(), semantics.value as Kind);
  });

  semantics.addEventListener("change", () => {
    if (controller.view.session) {
      void controller.switchSemantics(semantics.value as Kind);
    }
  });

  for (const listId of ["fwd-list", "bwd-list"]) {
    el(listId).addEventListener("click", (event) => {
      const button = (event.target as HTMLElement).closest("button[data-id]");
      if (button instanceof HTMLButtonElement && button.dataset.id) {
        void controller.step(button.dataset.id);
      }
    });
  }

  el("refresh-btn").addEventListener("click", () => {
    void controller.refresh();
  });
}

wire();
