/** Pure HTML formatting for decorated terms, labels, and memories.
 *
 * History prefixes render greyed with a [key, cause] chip; restriction
 * memories render inline in the indexed style, e.g. nu a{ 0,1 }_0, because
 * watching the memory grow and pin causes is what the tool is for.
 */

import type {
  ActionDoc,
  KeyStar,
  MemoryDoc,
  NameDoc,
  ProcessDoc,
  RProcessDoc,
  TransitionRow,
} from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function fmtKey(k: KeyStar): string {
  return k === "*" ? "∗" : String(k);
}

export function fmtKeyset(ks: KeyStar[]): string {
  return `{${ks.map(fmtKey).join(",")}}`;
}

export function fmtName(n: NameDoc): string {
  const base = escapeHtml(n.base);
  return n.inst === "*" ? base : `${base}<sup>${fmtKey(n.inst)}</sup>`;
}

export function memoryHtml(m: MemoryDoc): string {
  const gamma = ` ${m.gamma.map(String).join(",")} `.replace("  ", " ");
  let index = "";
  if (m.kind === "bs" && m.w !== undefined) {
    index = `<sub>${fmtKey(m.w)}</sub>`;
  } else if (m.kind === "cvy" && m.omega !== undefined) {
    index = `<sub>${fmtKeyset(m.omega)}</sub>`;
  }
  return `<span class="mem">{${gamma}}${index}</span>`;
}

export function chipHtml(key: number, cause: KeyStar[]): string {
  return `<span class="chip">[${key},${fmtKeyset(cause)}]</span>`;
}

export function actionHtml(a: ActionDoc): string {
  switch (a.type) {
    case "out":
      return `${escapeHtml(a.subj)}&lt;${fmtName(a.obj)}&gt;`;
    case "in":
      return `${escapeHtml(a.subj)}(${escapeHtml(a.var)})`;
    case "bout":
      return `${escapeHtml(a.subj)}&lt;ν${escapeHtml(a.obj)}` +
        `${memoryHtml(a.mem)}&gt;`;
    case "tau":
      return "τ";
  }
}

function isNilP(p: ProcessDoc): boolean {
  return p.t === "nil";
}

function isNilR(x: RProcessDoc): boolean {
  return x.t === "lift" && isNilP(x.proc);
}

function renderP(p: ProcessDoc, parenPar: boolean): string {
  switch (p.t) {
    case "nil":
      return "0";
    case "out": {
      const head = `${fmtName(p.subj)}&lt;${fmtName(p.obj)}&gt;`;
      return isNilP(p.cont) ? head : `${head}.${renderP(p.cont, true)}`;
    }
    case "in": {
      const head = `${fmtName(p.subj)}(${escapeHtml(p.var)})`;
      return isNilP(p.cont) ? head : `${head}.${renderP(p.cont, true)}`;
    }
    case "par": {
      const body = `${renderP(p.left, true)} | ${renderP(p.right, true)}`;
      return parenPar ? `(${body})` : body;
    }
    case "new":
      return `ν${escapeHtml(p.name)}.${renderP(p.body, true)}`;
  }
}

function renderR(x: RProcessDoc, parenPar: boolean): string {
  switch (x.t) {
    case "lift":
      return `<span class="live">${renderP(x.proc, parenPar)}</span>`;
    case "pastout": {
      const head =
        `<span class="past">${fmtName(x.subj)}&lt;${fmtName(x.obj)}&gt;` +
        `${chipHtml(x.key, x.cause)}</span>`;
      return isNilR(x.cont) ? head : `${head}.${renderR(x.cont, true)}`;
    }
    case "pastin": {
      const head =
        `<span class="past">${fmtName(x.subj)}(${escapeHtml(x.var)})` +
        `${chipHtml(x.key, x.cause)}</span>`;
      return isNilR(x.cont) ? head : `${head}.${renderR(x.cont, true)}`;
    }
    case "rpar": {
      const body = `${renderR(x.left, true)} | ${renderR(x.right, true)}`;
      return parenPar ? `(${body})` : body;
    }
    case "res":
      return `ν${escapeHtml(x.name)}${memoryHtml(x.mem)}.` +
        renderR(x.body, true);
  }
}

export function renderTerm(x: RProcessDoc): string {
  return renderR(x, false);
}

export function transitionHtml(row: TransitionRow): string {
  const badge = `<span class="badge">cause: ${fmtKeyset(row.cause)}</span>`;
  const key = `<span class="key">${row.key}</span>`;
  return `${key} ${actionHtml(row.action)} ${badge}`;
}
