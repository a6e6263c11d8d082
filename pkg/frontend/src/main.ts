// Wires the session, scaffolds and renderers to the page. Everything
// semantic happens server-side; this file is plain DOM plumbing.

import { ApiClient } from "./api.js";
import { diagnosticRows, groupByUnit, previewRows } from "./render.js";
import { emptyDocument, insertScaffold, UNIT_KINDS } from "./scaffold.js";
import { EditorSession, SessionState } from "./session.js";

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

function renderDiagnostics(state: SessionState, panel: HTMLElement, editor: HTMLTextAreaElement): void {
  panel.replaceChildren();
  const rows = diagnosticRows(state.diagnostics);
  if (rows.length === 0 && !state.dirty) {
    const ok = document.createElement("li");
    ok.className = "ok";
    ok.textContent = "no diagnostics";
    panel.appendChild(ok);
    return;
  }
  for (const row of rows) {
    const item = document.createElement("li");
    const badge = document.createElement("span");
    badge.className = `badge ${row.badge.toLowerCase()}`;
    badge.textContent = row.badge;
    const text = document.createElement("span");
    text.textContent = ` ${row.code} at ${row.path}: ${row.message}`;
    item.append(badge, text);
    item.addEventListener("click", () => focusPath(editor, row.path));
    panel.appendChild(item);
  }
}

// Best-effort jump: select the last path segment's key in the text.
function focusPath(editor: HTMLTextAreaElement, path: string): void {
  const segments = path.split("/").filter((s) => s.length > 0);
  const needle = segments.length > 0 ? `"${segments[segments.length - 1]}"` : "";
  const index = needle ? editor.value.indexOf(needle) : -1;
  editor.focus();
  if (index >= 0) {
    editor.setSelectionRange(index, index + needle.length);
  }
}

function renderPreview(state: SessionState, container: HTMLElement): void {
  container.replaceChildren();
  if (!state.preview) {
    const note = document.createElement("p");
    note.className = "disabled";
    note.textContent = `preview disabled: ${state.previewDisabledReason ?? "not validated yet"}`;
    container.appendChild(note);
    return;
  }
  for (const [unit, rows] of groupByUnit(previewRows(state.preview))) {
    const heading = document.createElement("h3");
    heading.textContent = unit;
    container.appendChild(heading);
    const table = document.createElement("table");
    for (const row of rows) {
      const tr = document.createElement("tr");
      for (const cell of [row.subject, row.predicate, row.object]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      if (row.evidence.length > 0) {
        tr.title = row.evidence.join("\n");
      }
      table.appendChild(tr);
    }
    container.appendChild(table);
  }
}

function main(): void {
  const editor = byId<HTMLTextAreaElement>("editor");
  const panel = byId<HTMLUListElement>("diagnostics");
  const preview = byId<HTMLDivElement>("preview");
  const banner = byId<HTMLDivElement>("banner");
  const scaffolds = byId<HTMLDivElement>("scaffolds");

  const params = new URLSearchParams(window.location.search);
  const client = new ApiClient(params.get("service") ?? "http://127.0.0.1:8040");
  const session = new EditorSession(client, {
    onChange: (state) => {
      banner.hidden = !state.offline;
      renderDiagnostics(state, panel, editor);
      renderPreview(state, preview);
    },
  });

  editor.value = emptyDocument("untitled");
  session.setText(editor.value);
  editor.addEventListener("input", () => session.setText(editor.value));

  for (const kind of UNIT_KINDS) {
    const button = document.createElement("button");
    button.textContent = `+ ${kind}`;
    button.addEventListener("click", () => {
      try {
        editor.value = insertScaffold(editor.value, kind);
      } catch {
        return; // unparseable text: leave it for the annotator to fix
      }
      session.setText(editor.value);
    });
    scaffolds.appendChild(button);
  }
}

document.addEventListener("DOMContentLoaded", main);
