import type {
  DeckJson,
  ExportFormat,
  OutlineNode,
  RankedFigure,
  SlideDraft,
  SlideRequest,
} from "./types";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ApiError";
  }
}

async function fail(res: Response): Promise<never> {
  let detail = `request failed (${res.status})`;
  try {
    const body = await res.json();
    if (body && body.detail) detail = `${body.error ?? "Error"}: ${body.detail}`;
  } catch {
    // non-JSON error body; keep the status message
  }
  throw new ApiError(detail, res.status);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async health(): Promise<boolean> {
    const res = await fetch(this.url("/health"));
    return res.ok;
  }

  async uploadPaper(paperJson: unknown): Promise<string> {
    const res = await fetch(this.url("/papers"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: typeof paperJson === "string" ? paperJson : JSON.stringify(paperJson),
    });
    if (!res.ok) await fail(res);
    const body = await res.json();
    return body.paper_id as string;
  }

  async fetchOutline(paperId: string): Promise<OutlineNode> {
    const res = await fetch(this.url(`/papers/${encodeURIComponent(paperId)}/outline`));
    if (!res.ok) await fail(res);
    return (await res.json()) as OutlineNode;
  }

  async draftSlide(
    paperId: string,
    request: SlideRequest,
    signal?: AbortSignal,
  ): Promise<SlideDraft> {
    const res = await fetch(this.url(`/papers/${encodeURIComponent(paperId)}/slides`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        title: request.title,
        k: request.k ?? 10,
        generator: request.generator ?? "extractive",
      }),
      signal,
    });
    if (!res.ok) await fail(res);
    return (await res.json()) as SlideDraft;
  }

  async fetchFigures(paperId: string, title: string): Promise<RankedFigure[]> {
    const query = new URLSearchParams({ title });
    const res = await fetch(
      this.url(`/papers/${encodeURIComponent(paperId)}/figures?${query}`),
    );
    if (!res.ok) await fail(res);
    return ((await res.json()) as { figures: RankedFigure[] }).figures;
  }

  /** Raw response body so a download is byte-identical to the server payload. */
  async exportDeck(deck: DeckJson, format: ExportFormat): Promise<string> {
    const res = await fetch(this.url("/decks/export"), {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        Accept: format === "markdown" ? "text/markdown" : "application/json",
      },
      body: JSON.stringify(deck),
    });
    if (!res.ok) await fail(res);
    return await res.text();
  }
}
