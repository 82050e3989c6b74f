import { ApiClient } from "./api";
import { StudioApp, downloadText } from "./app";

function pane(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing pane #${id}`);
  return node;
}

function boot(): void {
  const api = new ApiClient(
    (window as { SLIDEGEN_API_URL?: string }).SLIDEGEN_API_URL ?? "",
  );
  const app = new StudioApp(api, {
    outline: pane("outline"),
    draft: pane("draft"),
    deck: pane("deck"),
    status: pane("status"),
  });

  const fileInput = pane("paper-file") as HTMLInputElement;
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    try {
      await app.openPaper(await file.text());
    } catch (error) {
      pane("status").textContent =
        error instanceof Error ? error.message : String(error);
    }
  });

  const titleInput = pane("title-input") as HTMLInputElement;
  const generatorToggle = pane("generator-toggle") as HTMLSelectElement;
  pane("title-submit").addEventListener("click", () => {
    const title = titleInput.value.trim();
    if (!title) return;
    void app.submitTitle(title, {
      generator: generatorToggle.value === "remote" ? "remote" : "extractive",
    });
  });
  titleInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") pane("title-submit").click();
  });

  pane("export-json").addEventListener("click", async () => {
    try {
      downloadText("deck.json", await app.exportDeck("json"), "application/json");
    } catch (error) {
      pane("status").textContent =
        error instanceof Error ? error.message : String(error);
    }
  });
  pane("export-markdown").addEventListener("click", async () => {
    try {
      downloadText("deck.md", await app.exportDeck("markdown"), "text/markdown");
    } catch (error) {
      pane("status").textContent =
        error instanceof Error ? error.message : String(error);
    }
  });
}

document.addEventListener("DOMContentLoaded", boot);
