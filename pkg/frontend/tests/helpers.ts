import { vi } from "vitest";
import type { RankedFigure, ScoredSnippet, SlideDraft } from "../src/types";
import type { AppPanes } from "../src/app";

export interface RecordedCall {
  url: string;
  method: string;
  body: string | null;
  headers: Record<string, string>;
}

export type RouteHandler = (call: RecordedCall) => Response;

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function textResponse(body: string, status = 200, mime = "text/markdown"): Response {
  return new Response(body, { status, headers: { "Content-Type": mime } });
}

/** Install a fetch mock routed by "METHOD path" prefix; records every call. */
export function installFetchMock(routes: Record<string, RouteHandler>): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const call: RecordedCall = {
        url,
        method: init?.method ?? "GET",
        body: typeof init?.body === "string" ? init.body : null,
        headers: (init?.headers as Record<string, string>) ?? {},
      };
      calls.push(call);
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      // most specific (longest) matching prefix wins
      const match = Object.entries(routes)
        .map(([route, handler]) => {
          const [method, prefix] = route.split(" ", 2);
          return { method, prefix, handler };
        })
        .filter((r) => r.method === call.method && path.startsWith(r.prefix))
        .sort((a, b) => b.prefix.length - a.prefix.length)[0];
      if (match) return match.handler(call);
      return new Response("not found", { status: 404 });
    }),
  );
  return calls;
}

export function makeDraft(title: string, overrides: Partial<SlideDraft> = {}): SlideDraft {
  const candidates: ScoredSnippet[] = Array.from({ length: 10 }, (_, i) => ({
    snippet_id: i,
    score: 0.9 - i * 0.05,
    text: `Snippet ${i} about ${title.toLowerCase()}.`,
  }));
  const figures: RankedFigure[] = Array.from({ length: 5 }, (_, i) => ({
    id: `fig${i}`,
    kind: i % 2 === 0 ? "figure" : "table",
    caption: `Caption ${i} for ${title.toLowerCase()}`,
    uri: `assets/fig${i}.png`,
    score: 0.8 - i * 0.1,
  }));
  return {
    title,
    keywords: [],
    candidates,
    bullets: [`First point about ${title}.`, `Second point about ${title}.`],
    figures,
    generator: "extractive",
    ...overrides,
  };
}

export function makePanes(): AppPanes {
  document.body.innerHTML =
    '<div id="outline"></div><div id="draft"></div>' +
    '<div id="deck"></div><div id="status"></div>';
  return {
    outline: document.getElementById("outline") as HTMLElement,
    draft: document.getElementById("draft") as HTMLElement,
    deck: document.getElementById("deck") as HTMLElement,
    status: document.getElementById("status") as HTMLElement,
  };
}

export const OUTLINE = {
  label: "",
  text: "Sample Paper",
  children: [
    { label: "1", text: "Introduction", children: [] },
    {
      label: "2",
      text: "Methods",
      children: [{ label: "2.1", text: "Encoder", children: [] }],
    },
  ],
};
