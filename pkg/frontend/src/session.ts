import type { DeckJson, SlideDraft } from "./types";

export class EmptyDeckError extends Error {
  constructor() {
    super("the deck has no accepted slides yet");
    this.name = "EmptyDeckError";
  }
}

/**
 * The deck under construction: accepted drafts in user-controlled order.
 * Every slide is traceable to a server SlideDraft response; export maps
 * each draft's bullets and figure ids into deck-JSON positions.
 */
export class DeckSession {
  slides: SlideDraft[] = [];
  dirty = false;

  constructor(readonly paperId: string) {}

  get size(): number {
    return this.slides.length;
  }

  accept(draft: SlideDraft): void {
    this.slides.push(draft);
    this.dirty = true;
  }

  remove(index: number): void {
    if (index < 0 || index >= this.slides.length) return;
    this.slides.splice(index, 1);
    this.dirty = true;
  }

  /** Move a slide up (delta -1) or down (+1); out-of-range moves are no-ops. */
  move(index: number, delta: number): void {
    const target = index + delta;
    if (index < 0 || index >= this.slides.length) return;
    if (target < 0 || target >= this.slides.length) return;
    const [slide] = this.slides.splice(index, 1);
    this.slides.splice(target, 0, slide);
    this.dirty = true;
  }

  toDeckJson(): DeckJson {
    if (this.slides.length === 0) throw new EmptyDeckError();
    return {
      deck_id: this.paperId,
      slides: this.slides.map((draft, index) => ({
        index,
        title: draft.title,
        lines: [...draft.bullets],
        figures: draft.figures.map((f) => f.id),
      })),
    };
  }

  markExported(): void {
    this.dirty = false;
  }
}
