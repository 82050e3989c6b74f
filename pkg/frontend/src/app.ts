import { ApiClient } from "./api";
import { DeckSession } from "./session";
import {
  clear,
  renderDeck,
  renderDraft,
  renderError,
  renderOutline,
  renderStatus,
} from "./views";
import type { ExportFormat, SlideDraft } from "./types";

export interface AppPanes {
  outline: HTMLElement;
  draft: HTMLElement;
  deck: HTMLElement;
  status: HTMLElement;
}

export interface SubmitOptions {
  generator?: "extractive" | "remote";
}

/**
 * Controller for the interactive authoring flow. One instance per paper
 * session: submit titles, inspect drafts, accept/reorder slides, export.
 *
 * Re-submitting while a request is in flight aborts the stale request, so
 * the rendered draft always corresponds to the latest title.
 */
export class StudioApp {
  session: DeckSession | null = null;
  currentDraft: SlideDraft | null = null;
  lastTitle = "";
  lastGenerator: "extractive" | "remote" = "extractive";

  private inflight: AbortController | null = null;

  constructor(
    readonly api: ApiClient,
    readonly panes: AppPanes,
  ) {}

  async openPaper(paperJson: unknown): Promise<string> {
    const paperId = await this.api.uploadPaper(paperJson);
    this.session = new DeckSession(paperId);
    this.currentDraft = null;
    const outline = await this.api.fetchOutline(paperId);
    renderOutline(this.panes.outline, outline, (headerText) => {
      void this.submitTitle(headerText);
    });
    this.refreshDeck();
    renderStatus(this.panes.status, `paper ${paperId} loaded`);
    return paperId;
  }

  /** The title prompt flow: draft a slide and render it, with retry on failure. */
  async submitTitle(title: string, options: SubmitOptions = {}): Promise<SlideDraft | null> {
    if (!this.session) throw new Error("no paper loaded");
    const generator = options.generator ?? this.lastGenerator;
    this.lastTitle = title;
    this.lastGenerator = generator;

    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    renderStatus(this.panes.status, `drafting "${title}"...`);
    try {
      const draft = await this.api.draftSlide(
        this.session.paperId,
        { title, k: 10, generator },
        controller.signal,
      );
      this.currentDraft = draft;
      renderDraft(this.panes.draft, draft, {
        onAccept: () => this.acceptCurrent(),
        onRegenerate: () => void this.submitTitle(this.lastTitle),
      });
      renderStatus(this.panes.status, `draft ready for "${title}"`);
      return draft;
    } catch (error) {
      if (controller.signal.aborted) return null; // superseded by a newer submit
      const message = error instanceof Error ? error.message : String(error);
      renderError(this.panes.status, message, () => {
        void this.submitTitle(this.lastTitle, { generator: this.lastGenerator });
      });
      return null;
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  acceptCurrent(): void {
    if (!this.session || !this.currentDraft) return;
    this.session.accept(this.currentDraft);
    this.refreshDeck();
  }

  moveSlide(index: number, delta: number): void {
    this.session?.move(index, delta);
    this.refreshDeck();
  }

  removeSlide(index: number): void {
    this.session?.remove(index);
    this.refreshDeck();
  }

  /**
   * Export the accepted deck. Returns exactly the bytes the server sent;
   * the caller (browser path) wraps them in a download.
   */
  async exportDeck(format: ExportFormat): Promise<string> {
    if (!this.session) throw new Error("no paper loaded");
    const payload = await this.api.exportDeck(this.session.toDeckJson(), format);
    this.session.markExported();
    return payload;
  }

  private refreshDeck(): void {
    if (!this.session) {
      clear(this.panes.deck);
      return;
    }
    renderDeck(this.panes.deck, this.session, {
      onMove: (index, delta) => this.moveSlide(index, delta),
      onRemove: (index) => this.removeSlide(index),
    });
  }
}

export function downloadText(filename: string, text: string, mime: string): void {
  const blob = new Blob([text], { type: mime });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}
