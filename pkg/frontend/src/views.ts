import type { OutlineNode, SlideDraft } from "./types";
import type { DeckSession } from "./session";

// All rendering goes through textContent / attributes, never markup
// interpolation: the DOM shows response fields verbatim and nothing else.

export function clear(container: HTMLElement): void {
  container.replaceChildren();
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderOutline(
  container: HTMLElement,
  root: OutlineNode,
  onPick: (headerText: string) => void,
): void {
  clear(container);
  container.appendChild(el("h2", "pane-title", "Outline"));
  const list = el("ul", "outline");

  const append = (node: OutlineNode, parent: HTMLElement) => {
    for (const child of node.children) {
      const item = el("li", "outline-node");
      const button = el("button", "outline-link");
      button.type = "button";
      button.textContent = child.label ? `${child.label} ${child.text}` : child.text;
      button.addEventListener("click", () => onPick(child.text));
      item.appendChild(button);
      if (child.children.length > 0) {
        const sub = el("ul", "outline");
        append(child, sub);
        item.appendChild(sub);
      }
      parent.appendChild(item);
    }
  };
  append(root, list);
  container.appendChild(list);
}

export interface DraftHandlers {
  onAccept: () => void;
  onRegenerate: () => void;
}

export function renderDraft(
  container: HTMLElement,
  draft: SlideDraft,
  handlers: DraftHandlers,
): void {
  clear(container);
  container.appendChild(el("h2", "draft-title", draft.title));

  if (draft.keywords.length > 0) {
    container.appendChild(el("p", "draft-keywords", `Keywords: ${draft.keywords.join(", ")}`));
  }

  const bullets = el("ul", "draft-bullets");
  for (const bullet of draft.bullets) {
    bullets.appendChild(el("li", "draft-bullet", bullet));
  }
  container.appendChild(bullets);

  const figures = el("div", "figure-strip");
  for (const figure of draft.figures) {
    const card = el("figure", "figure-card");
    const img = el("img", "figure-thumb");
    img.src = figure.uri;
    img.alt = figure.caption;
    const caption = el("figcaption", "figure-caption", `${figure.id}: ${figure.caption}`);
    card.appendChild(img);
    card.appendChild(caption);
    figures.appendChild(card);
  }
  container.appendChild(figures);

  const provenance = el("details", "provenance");
  provenance.open = true;
  provenance.appendChild(el("summary", undefined, "Retrieved snippets"));
  const snippetList = el("ol", "provenance-list");
  for (const candidate of draft.candidates) {
    const item = el("li", "provenance-snippet");
    item.appendChild(el("span", "snippet-score", candidate.score.toFixed(4)));
    item.appendChild(el("span", "snippet-text", candidate.text));
    snippetList.appendChild(item);
  }
  provenance.appendChild(snippetList);
  container.appendChild(provenance);

  const actions = el("div", "draft-actions");
  const accept = el("button", "accept-slide", "Accept slide");
  accept.type = "button";
  accept.addEventListener("click", handlers.onAccept);
  const regen = el("button", "regenerate", "Regenerate");
  regen.type = "button";
  regen.addEventListener("click", handlers.onRegenerate);
  actions.appendChild(accept);
  actions.appendChild(regen);
  container.appendChild(actions);
}

export interface DeckHandlers {
  onMove: (index: number, delta: number) => void;
  onRemove: (index: number) => void;
}

export function renderDeck(
  container: HTMLElement,
  session: DeckSession,
  handlers: DeckHandlers,
): void {
  clear(container);
  container.appendChild(el("h2", "pane-title", `Deck (${session.size})`));
  const list = el("ol", "deck-list");
  session.slides.forEach((draft, index) => {
    const item = el("li", "deck-slide");
    item.appendChild(el("span", "deck-slide-title", draft.title));
    const controls = el("span", "deck-controls");
    for (const [label, action] of [
      ["up", () => handlers.onMove(index, -1)],
      ["down", () => handlers.onMove(index, +1)],
      ["remove", () => handlers.onRemove(index)],
    ] as const) {
      const button = el("button", `deck-${label}`, label);
      button.type = "button";
      button.addEventListener("click", action);
      controls.appendChild(button);
    }
    item.appendChild(controls);
    list.appendChild(item);
  });
  container.appendChild(list);
}

export function renderError(
  container: HTMLElement,
  message: string,
  onRetry: () => void,
): void {
  clear(container);
  const banner = el("div", "error-banner");
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", "error-message", message));
  const retry = el("button", "error-retry", "Retry");
  retry.type = "button";
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  container.appendChild(banner);
}

export function renderStatus(container: HTMLElement, message: string): void {
  clear(container);
  container.appendChild(el("p", "status", message));
}
