/**
 * Single-page session flow: start screen, first-design canvas, the
 * suggestion workspace (kept strip on top, 2x4 card grid, blank canvas
 * and Suggest More on the side), and the completion screen with the
 * log download.
 *
 * All durable state lives on the server; the page keeps only the
 * session id (in the URL hash, so a reload restores via GET) plus
 * uncommitted tile edits.  Which engine produced the suggestions is
 * never fetched, rendered or stored.  One mutating request runs at a
 * time: while it is in flight every input is disabled and the header
 * shows the busy status.
 */

import { ApiError, Client, type DecisionPayload, type SuggestionSlot } from "./api.js";
import { createEditor, createMapView, type Editor } from "./editor.js";
import { blankRows, editCount, localProblem, type MapRows } from "./tiles.js";

export interface AppOptions {
  baseUrl?: string;
  fetchImpl?: typeof fetch;
  windowRef?: Window;
}

export interface App {
  root: HTMLElement;
  client: Client;
  sessionId(): string | null;
  /** Resolves once no request is in flight; handy for automated tests. */
  whenIdle(): Promise<void>;
}

interface CardView {
  index: number;
  original: MapRows;
  editor: Editor;
  article: HTMLElement;
  badge: HTMLElement;
  like: HTMLInputElement;
  keep: HTMLInputElement;
  errorEl: HTMLElement;
}

const LEVEL_GOAL = 5;

export function initApp(root: HTMLElement, options: AppOptions = {}): App {
  const doc = root.ownerDocument;
  const attachedWindow = options.windowRef ?? doc.defaultView;
  if (!attachedWindow) throw new Error("document is not attached to a window");
  const win: Window = attachedWindow;
  const fetchImpl =
    options.fetchImpl ??
    (typeof win.fetch === "function" ? win.fetch.bind(win) : globalThis.fetch);
  const client = new Client(options.baseUrl ?? "", fetchImpl);

  let sessionId: string | null = null;
  let iteration = 0;
  let keptLevels: MapRows[] = [];
  let cards: CardView[] = [];
  let busy = false;
  let lastOp: Promise<void> = Promise.resolve();
  let errorEl: HTMLElement | null = null;

  root.innerHTML = "";
  root.classList.add("app");
  const header = doc.createElement("header");
  const title = doc.createElement("h1");
  title.textContent = "Level Designer";
  const status = doc.createElement("span");
  status.className = "status";
  header.append(title, status);
  const main = doc.createElement("main");
  root.append(header, main);

  function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  function setBusy(next: boolean): void {
    busy = next;
    root.classList.toggle("busy", next);
    root.setAttribute("aria-busy", String(next));
    status.textContent = next ? "optimizing…" : "";
    for (const widget of main.querySelectorAll<HTMLButtonElement | HTMLInputElement>(
      "button, input",
    ))
      widget.disabled = next;
  }

  function setError(message: string | null): void {
    if (!errorEl) return;
    errorEl.textContent = message ?? "";
    errorEl.hidden = message === null;
  }

  /** Run one mutating operation; reject re-entry while one is in flight. */
  function launch(op: () => Promise<void>): void {
    if (busy) return;
    setError(null);
    setBusy(true);
    lastOp = (async () => {
      try {
        await op();
      } catch (err) {
        setError(err instanceof Error ? err.message : String(err));
      } finally {
        setBusy(false);
      }
    })();
  }

  function freshError(): HTMLElement {
    errorEl = el("p", "error");
    errorEl.hidden = true;
    return errorEl;
  }

  // ---------------------------------------------------------------- screens

  function renderStart(): void {
    main.innerHTML = "";
    cards = [];
    const section = el("section", "start-screen");
    section.append(el("h2", undefined, "Start a session"));
    const form = el("form");
    const label = el("label", undefined, "Designer id ");
    const input = el("input");
    input.name = "designer";
    input.autocomplete = "off";
    label.append(input);
    const begin = el("button", "begin", "Begin session");
    begin.type = "submit";
    form.append(label, begin);
    section.append(form, freshError());
    main.append(section);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      launch(async () => {
        const created = await client.createSession(input.value);
        sessionId = created.session_id;
        iteration = created.iteration;
        keptLevels = [];
        win.location.hash = `s=${sessionId}`;
        renderFirstDesign();
      });
    });
  }

  function renderFirstDesign(): void {
    main.innerHTML = "";
    cards = [];
    const section = el("section", "first-design");
    section.append(el("h2", undefined, "Draw your first level"));
    section.append(
      el(
        "p",
        "hint",
        "Click a tile to cycle wall, floor, treasure, enemy, entrance, exit. " +
          "Place one entrance and one exit joined by open tiles.",
      ),
    );
    const editor = createEditor(doc, blankRows());
    const submit = el("button", "submit-initial", "Submit design");
    submit.type = "button";
    section.append(editor.element, submit, freshError());
    main.append(section);
    submit.addEventListener("click", () => {
      launch(async () => {
        const response = await client.submitInitial(sessionId as string, editor.getRows());
        iteration = response.iteration;
        keptLevels = response.levels.map((m) => m.rows);
        renderWorkspace(
          response.suggestions.map((m) => ({ original: m, current: m })),
        );
      });
    });
  }

  function renderCard(slot: SuggestionSlot, index: number): CardView {
    const article = el("article", "card");
    article.dataset["index"] = String(index);
    const cardHeader = el("header", "card-header");
    cardHeader.append(el("span", "card-title", `Suggestion ${index + 1}`));
    const badge = el("span", "edit-badge", "edits: 0");
    badge.dataset["edits"] = "0";
    cardHeader.append(badge);
    const original = slot.original.rows.slice();
    const editor = createEditor(doc, slot.current.rows, (rows) => {
      const edits = editCount(original, rows);
      badge.dataset["edits"] = String(edits);
      badge.textContent = `edits: ${edits}`;
    });
    const startEdits = editCount(original, slot.current.rows);
    badge.dataset["edits"] = String(startEdits);
    badge.textContent = `edits: ${startEdits}`;
    const like = el("input") as HTMLInputElement;
    like.type = "checkbox";
    like.className = "like";
    const likeLabel = el("label", "tag");
    likeLabel.append(like, doc.createTextNode(" Like"));
    const keep = el("input") as HTMLInputElement;
    keep.type = "checkbox";
    keep.className = "keep";
    const keepLabel = el("label", "tag");
    keepLabel.append(keep, doc.createTextNode(" Keep"));
    const cardError = el("p", "card-error");
    cardError.hidden = true;
    const tags = el("div", "card-tags");
    tags.append(likeLabel, keepLabel);
    article.append(cardHeader, editor.element, tags, cardError);
    return { index, original, editor, article, badge, like, keep, errorEl: cardError };
  }

  function renderKeptStrip(container: HTMLElement): void {
    container.innerHTML = "";
    const heading = el("h2", undefined, "Kept levels ");
    heading.append(el("span", "kept-count", `${keptLevels.length} of ${LEVEL_GOAL}`));
    container.append(heading);
    const maps = el("div", "kept-maps");
    for (const rows of keptLevels) maps.append(createMapView(doc, rows));
    container.append(maps);
  }

  function renderWorkspace(slots: SuggestionSlot[]): void {
    main.innerHTML = "";
    const workspace = el("div", "workspace");
    const keptStrip = el("section", "kept-strip");
    renderKeptStrip(keptStrip);
    const lower = el("div", "workspace-lower");

    const suggestions = el("section", "suggestions");
    const heading = el("h2", undefined, "Suggestions ");
    heading.append(el("span", "iteration-label", `round ${iteration}`));
    suggestions.append(heading);
    const cardGrid = el("div", "cards");
    cards = slots.map((slot, index) => {
      const card = renderCard(slot, index);
      cardGrid.append(card.article);
      return card;
    });
    suggestions.append(cardGrid);

    const side = el("aside", "side-panel");
    side.append(el("h2", undefined, "Draw your own"));
    const blankEditor = createEditor(doc, blankRows());
    const submitBlank = el("button", "submit-blank", "Keep this design");
    submitBlank.type = "button";
    const suggestMore = el("button", "suggest-more", "Suggest More");
    suggestMore.type = "button";
    side.append(blankEditor.element, submitBlank, suggestMore, freshError());

    lower.append(suggestions, side);
    workspace.append(keptStrip, lower);
    main.append(workspace);

    submitBlank.addEventListener("click", () => {
      launch(async () => {
        const state = await client.submitBlank(sessionId as string, blankEditor.getRows());
        keptLevels = state.levels.map((m) => m.rows);
        if (state.complete) {
          renderDone();
          return;
        }
        renderKeptStrip(keptStrip);
        blankEditor.setRows(blankRows());
      });
    });

    suggestMore.addEventListener("click", () => {
      for (const card of cards) {
        card.article.classList.remove("invalid");
        card.errorEl.hidden = true;
        card.errorEl.textContent = "";
      }
      const decisions: DecisionPayload[] = cards.map((card) => ({
        index: card.index,
        map: { rows: card.editor.getRows() },
        liked: card.like.checked,
        kept: card.keep.checked,
      }));
      launch(async () => {
        try {
          const response = await client.iterate(sessionId as string, decisions);
          if (response.complete) {
            keptLevels = response.levels.map((m) => m.rows);
            renderDone();
            return;
          }
          iteration = response.iteration;
          const state = await client.getState(sessionId as string);
          keptLevels = state.levels.map((m) => m.rows);
          renderWorkspace(response.suggestions.map((m) => ({ original: m, current: m })));
        } catch (err) {
          if (err instanceof ApiError && err.code === "invalid_map") {
            markInvalidCards(err.message);
          }
          throw err;
        }
      });
    });
  }

  /** Outline the tagged card(s) a rejected round points at. */
  function markInvalidCards(message: string): void {
    const tagged = cards.filter((card) => card.like.checked || card.keep.checked);
    let flagged = 0;
    for (const card of tagged) {
      const problem = localProblem(card.editor.getRows());
      if (problem !== null) {
        card.article.classList.add("invalid");
        card.errorEl.textContent = problem;
        card.errorEl.hidden = false;
        flagged++;
      }
    }
    if (flagged === 0)
      for (const card of tagged) {
        card.article.classList.add("invalid");
        card.errorEl.textContent = message;
        card.errorEl.hidden = false;
      }
  }

  function renderDone(): void {
    main.innerHTML = "";
    cards = [];
    const section = el("section", "final");
    section.append(el("h2", undefined, "Session complete"));
    section.append(el("p", undefined, `Your ${keptLevels.length} levels:`));
    const finals = el("div", "final-levels");
    for (const rows of keptLevels) finals.append(createMapView(doc, rows));
    section.append(finals);
    const downloads = el("p", "downloads");
    const logLink = el("a", "download-log", "Download session log");
    logLink.href = client.logUrl(sessionId as string);
    logLink.setAttribute("download", "session-log.json");
    const levelsLink = el("a", "download-levels", "Download level text");
    levelsLink.href = client.exportUrl(sessionId as string);
    levelsLink.setAttribute("download", "final-levels.txt");
    downloads.append(logLink, doc.createTextNode(" "), levelsLink);
    section.append(downloads, freshError());
    main.append(section);
  }

  function renderLoading(): void {
    main.innerHTML = "";
    const section = el("section", "loading");
    section.append(el("p", undefined, "Loading session…"));
    section.append(freshError());
    main.append(section);
  }

  // ------------------------------------------------------------- bootstrap

  function restore(fromId: string): void {
    renderLoading();
    launch(async () => {
      const state = await client.getState(fromId);
      sessionId = state.session_id;
      iteration = state.iteration;
      keptLevels = state.levels.map((m) => m.rows);
      if (state.complete) {
        renderDone();
      } else if (state.suggestions.length > 0) {
        renderWorkspace(state.suggestions);
      } else {
        renderFirstDesign();
      }
    });
  }

  const match = /#s=([A-Za-z0-9_-]+)/.exec(win.location.hash);
  if (match && match[1] !== undefined) restore(match[1]);
  else renderStart();

  return {
    root,
    client,
    sessionId: () => sessionId,
    whenIdle: async () => {
      let settled: Promise<void>;
      do {
        settled = lastOp;
        await settled;
      } while (settled !== lastOp);
    },
  };
}
