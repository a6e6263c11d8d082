// Empty skeletons for each information unit, inserted into the
// document's "contribution" object. Text-first editing: the scaffold
// provides the correct key and one placeholder nesting level, the
// annotator fills in the rest.

export const UNIT_KINDS = [
  "ResearchProblem",
  "Approach",
  "Objective",
  "ExperimentalSetup",
  "Results",
  "Tasks",
  "Experiments",
  "AblationAnalysis",
  "Baselines",
  "Code",
] as const;

export type ScaffoldKind = (typeof UNIT_KINDS)[number];

const EVIDENCE_STUB = "COPY THE SOURCE SENTENCE HERE";

export const UNIT_TEMPLATES: Record<ScaffoldKind, unknown> = {
  ResearchProblem: {
    "PROBLEM PHRASE": { "from sentence": EVIDENCE_STUB },
  },
  Approach: {
    called: "SYSTEM NAME",
    "has description": "ONE-SENTENCE DESCRIPTION",
  },
  Objective: {
    "OBJECTIVE PHRASE": { "from sentence": EVIDENCE_STUB },
  },
  ExperimentalSetup: {
    used: {
      "RESOURCE OR TOOL": {
        "from sentence": EVIDENCE_STUB,
        "PREDICATE FROM SENTENCE": "VALUE",
      },
    },
  },
  Results: {
    "DATASET NAME": {
      "from sentence": EVIDENCE_STUB,
      on: {
        "TASK NAME": {
          "METRIC NAME": "SCORE",
        },
      },
    },
  },
  Tasks: {
    has: ["TASK NAME"],
  },
  Experiments: {
    "EXPERIMENT NAME": { "from sentence": EVIDENCE_STUB },
  },
  AblationAnalysis: {
    "ABLATED COMPONENT": {
      "from sentence": EVIDENCE_STUB,
      "has value": "EFFECT",
    },
  },
  Baselines: {
    "BASELINE SYSTEM": { "from sentence": EVIDENCE_STUB },
  },
  Code: {
    has: "https://github.com/USER/REPOSITORY",
  },
};

export function emptyDocument(paperId: string): string {
  return JSON.stringify(
    { paper: { id: paperId, title: "", task: "" }, contribution: {} },
    null,
    2,
  );
}

// Insert the template for one unit into the document text. Throws on
// unparseable input; the caller keeps the original text in that case.
export function insertScaffold(documentText: string, kind: ScaffoldKind): string {
  const parsed = JSON.parse(documentText === "" ? "{}" : documentText);
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error("document root must be an object");
  }
  if (typeof parsed.contribution !== "object" || parsed.contribution === null) {
    parsed.contribution = {};
  }
  if (kind in parsed.contribution) {
    return JSON.stringify(parsed, null, 2);
  }
  parsed.contribution[kind] = UNIT_TEMPLATES[kind];
  return JSON.stringify(parsed, null, 2);
}
