// Pure rendering helpers: diagnostics panel rows, triple preview rows
// and the delimited form of the preview. Kept DOM-free so they can be
// verified against the CLI output byte for byte.

import { Diagnostic, Triple } from "./api.js";

export interface DiagnosticRow {
  badge: "ERROR" | "WARNING";
  code: string;
  path: string;
  message: string;
}

export function diagnosticRows(diagnostics: Diagnostic[]): DiagnosticRow[] {
  return diagnostics.map((d) => ({
    badge: d.severity,
    code: d.code,
    path: d.path,
    message: d.message,
  }));
}

export interface PreviewRow {
  paperId: string;
  unit: string;
  subject: string;
  predicate: string;
  object: string;
  evidence: string[];
}

export function previewRows(triples: Triple[]): PreviewRow[] {
  return triples.map((t) => ({
    paperId: t.paper_id,
    unit: t.unit.kind ?? t.unit.label,
    subject: t.subject,
    predicate: t.predicate,
    object: t.object,
    evidence: t.evidence.map((span) => span.sentence),
  }));
}

export function groupByUnit(rows: PreviewRow[]): Map<string, PreviewRow[]> {
  const groups = new Map<string, PreviewRow[]>();
  for (const row of rows) {
    const bucket = groups.get(row.unit);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(row.unit, [row]);
    }
  }
  return groups;
}

// RFC 4180 quoting, matching the Python csv module's defaults.
function csvField(value: string): string {
  if (/[",\r\n]/.test(value)) {
    return `"${value.replace(/"/g, '""')}"`;
  }
  return value;
}

export const CSV_HEADER = "paper_id,unit,subject,predicate,object";

export function previewToCsvLines(rows: PreviewRow[]): string[] {
  return [
    CSV_HEADER,
    ...rows.map((row) =>
      [row.paperId, row.unit, row.subject, row.predicate, row.object]
        .map(csvField)
        .join(","),
    ),
  ];
}

export function previewToCsv(rows: PreviewRow[]): string {
  return previewToCsvLines(rows).join("\r\n") + "\r\n";
}
