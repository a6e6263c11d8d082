// Editor session state: debounced live validation plus triple preview.
//
// Responses are applied only if no newer request has been issued, so
// the panel can lag behind the text but never show results for a state
// newer than the one last validated.

import { ApiClient, Diagnostic, ServiceError, Triple } from "./api.js";

export interface SessionState {
  text: string;
  dirty: boolean;
  diagnostics: Diagnostic[];
  validatedText: string | null;
  preview: Triple[] | null;
  previewDisabledReason: string | null;
  offline: boolean;
}

export interface SessionOptions {
  debounceMs?: number;
  onChange?: (state: Readonly<SessionState>) => void;
}

const DEFAULT_DEBOUNCE_MS = 600;

export function hasErrors(diagnostics: Diagnostic[]): boolean {
  return diagnostics.some((d) => d.severity === "ERROR");
}

export class EditorSession {
  private state: SessionState = {
    text: "",
    dirty: false,
    diagnostics: [],
    validatedText: null,
    preview: null,
    previewDisabledReason: "empty document",
    offline: false,
  };

  private timer: ReturnType<typeof setTimeout> | null = null;
  private requestCounter = 0;
  private appliedRequest = 0;
  private inflight: Promise<void> = Promise.resolve();
  private readonly debounceMs: number;

  constructor(
    private readonly client: ApiClient,
    private readonly options: SessionOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
  }

  getState(): Readonly<SessionState> {
    return this.state;
  }

  setText(text: string): void {
    if (text === this.state.text) {
      return;
    }
    this.update({ text, dirty: true });
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.revalidate();
    }, this.debounceMs);
  }

  // Validate the current text immediately (save button, tests).
  flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    return this.revalidate();
  }

  // Wait for whatever request is currently running to settle.
  settled(): Promise<void> {
    return this.inflight;
  }

  private revalidate(): Promise<void> {
    const requestId = ++this.requestCounter;
    const text = this.state.text;
    // one request at a time per session
    this.inflight = this.inflight.then(() => this.run(requestId, text));
    return this.inflight;
  }

  private async run(requestId: number, text: string): Promise<void> {
    if (requestId <= this.appliedRequest || requestId < this.requestCounter) {
      return; // a newer edit superseded this request before it started
    }
    if (text.trim() === "") {
      this.appliedRequest = requestId;
      this.update({
        diagnostics: [],
        validatedText: text,
        dirty: false,
        preview: null,
        previewDisabledReason: "empty document",
        offline: false,
      });
      return;
    }
    let diagnostics: Diagnostic[];
    try {
      diagnostics = (await this.client.validate(text)).diagnostics;
    } catch {
      // editor stays usable; results for the old state remain shown
      this.update({ offline: true });
      return;
    }
    if (requestId < this.requestCounter) {
      return; // stale: a newer request was issued while we waited
    }
    this.appliedRequest = requestId;
    if (hasErrors(diagnostics)) {
      this.update({
        diagnostics,
        validatedText: text,
        dirty: false,
        preview: null,
        previewDisabledReason: "document has blocking errors",
        offline: false,
      });
      return;
    }
    let preview: Triple[] | null = null;
    let reason: string | null = null;
    try {
      preview = (await this.client.triplify(text)).triples;
    } catch (error) {
      if (error instanceof ServiceError) {
        reason = "document has blocking errors";
      } else {
        this.update({ diagnostics, validatedText: text, dirty: false, offline: true });
        return;
      }
    }
    if (requestId < this.requestCounter) {
      return;
    }
    this.update({
      diagnostics,
      validatedText: text,
      dirty: false,
      preview,
      previewDisabledReason: reason,
      offline: false,
    });
  }

  private update(partial: Partial<SessionState>): void {
    this.state = { ...this.state, ...partial };
    this.options.onChange?.(this.state);
  }
}
