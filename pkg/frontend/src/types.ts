// Wire types mirroring the slidegen HTTP API. The UI renders these fields
// and nothing else: every bullet, snippet and figure on screen comes
// verbatim from a server response.

export interface ScoredSnippet {
  snippet_id: number;
  score: number;
  text: string;
}

export interface RankedFigure {
  id: string;
  kind: "figure" | "table";
  caption: string;
  uri: string;
  score: number;
}

export interface SlideDraft {
  title: string;
  keywords: string[];
  candidates: ScoredSnippet[];
  bullets: string[];
  figures: RankedFigure[];
  generator: "extractive" | "remote";
}

export interface OutlineNode {
  label: string;
  text: string;
  children: OutlineNode[];
}

export interface SlideRequest {
  title: string;
  k?: number;
  generator?: "extractive" | "remote";
}

export interface DeckSlide {
  index: number;
  title: string;
  lines: string[];
  figures: string[];
}

export interface DeckJson {
  deck_id: string;
  slides: DeckSlide[];
}

export type ExportFormat = "json" | "markdown";
