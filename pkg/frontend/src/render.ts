import { DiffRow } from "./diff.js";

/** Pure HTML-string renderers; main.ts mounts them into the DOM. Code panes
 * always render the exact response body text (escaped), never a rewrite. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const KEYWORDS =
  /\b(module|use|struct|fun|public|entry|native|friend|const|let|mut|if|else|while|loop|return|abort|has|copy|drop|store|key|phantom|true|false|as|move)\b/g;
const TYPES = /\b(u8|u16|u32|u64|u128|u256|bool|address|signer|vector)\b/g;

/** Minimal token coloring for read-only panes; wraps the escaped text so the
 * pane content stays byte-equal to the service response. */
export function highlightMove(code: string): string {
  let html = escapeHtml(code);
  html = html.replace(/(\/\/[^\n]*)/g, '<span class="tok-comment">$1</span>');
  html = html.replace(/(b?&quot;[^&]*?&quot;)/g, '<span class="tok-str">$1</span>');
  html = html.replace(KEYWORDS, '<span class="tok-kw">$1</span>');
  html = html.replace(TYPES, '<span class="tok-type">$1</span>');
  return html;
}

export function renderCodePane(text: string): string {
  return `<pre class="code-pane">${highlightMove(text)}</pre>`;
}

export function renderProgress(done: number, total: number, jobState: string): string {
  const pct = total > 0 ? Math.round((100 * done) / total) : jobState === "complete" ? 100 : 0;
  return (
    `<div class="progress" data-state="${escapeHtml(jobState)}">` +
    `<div class="progress-bar" style="width:${pct}%"></div>` +
    `<span class="progress-label">${escapeHtml(jobState)} ${done}/${total}</span>` +
    `</div>`
  );
}

export function renderDiffTable(rows: DiffRow[]): string {
  const body = rows
    .map((row) => {
      const left = row.left === null ? "" : highlightMove(row.left);
      const right = row.right === null ? "" : highlightMove(row.right);
      return (
        `<tr class="diff-${row.kind}">` +
        `<td class="lineno">${row.leftNo ?? ""}</td><td class="code">${left}</td>` +
        `<td class="lineno">${row.rightNo ?? ""}</td><td class="code">${right}</td>` +
        `</tr>`
      );
    })
    .join("");
  const changed = rows.filter((r) => r.kind !== "same").length;
  return (
    `<table class="diff-table" data-changed="${changed}">` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderModuleList(modules: string[], selected: string | null): string {
  return modules
    .map(
      (m) =>
        `<li class="module${m === selected ? " selected" : ""}" data-module="${escapeHtml(m)}">${escapeHtml(m)}</li>`,
    )
    .join("");
}

export function renderFunctionList(names: string[]): string {
  return names
    .map(
      (n) =>
        `<li class="function-row" data-function="${escapeHtml(n)}">` +
        `<span>${escapeHtml(n)}</span>` +
        `<button class="redecompile" data-function="${escapeHtml(n)}">redecompile</button>` +
        `</li>`,
    )
    .join("");
}

/** Function names out of a decompiled view, for the redecompile list. */
export function functionNames(moduleText: string): string[] {
  const names: string[] = [];
  const re = /(?:^|\n)\s*(?:public(?:\([a-z]+\))?\s+)?(?:entry\s+)?(?:native\s+)?fun\s+([A-Za-z_][A-Za-z0-9_]*)/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(moduleText)) !== null) {
    names.push(m[1]);
  }
  return names;
}
