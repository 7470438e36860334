/** Browser entry point: story column, choice links, save/reload/restart. */

import { storyHash } from "./hash.js";
import {
  Session,
  applyChoice,
  choiceLabels,
  restoreSave,
  serializeSave,
  startSession,
  visitedKnots,
} from "./player.js";
import { HashMismatchError, PlayerError, Story, knotOf, validateStory } from "./story.js";
import { KeyValueStore, browserStore, saveKey } from "./storage.js";

interface App {
  story: Story;
  hash: string;
  session: Session;
  shown: number;
  store: KeyValueStore | null;
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message ?? "";
  box.style.display = message ? "block" : "none";
}

function appendLine(text: string): void {
  const p = document.createElement("p");
  p.textContent = text;
  el<HTMLDivElement>("transcript").appendChild(p);
}

function renderNew(app: App): void {
  const visited = visitedKnots(app.session);
  for (const knotId of visited.slice(app.shown)) {
    appendLine(knotOf(app.story, knotId).body);
  }
  app.shown = visited.length;
  renderChoices(app);
  el<HTMLButtonElement>("reload").disabled =
    app.store === null || app.store.get(saveKey(app.hash)) === null;
}

function renderChoices(app: App): void {
  const box = el<HTMLDivElement>("choices");
  box.replaceChildren();
  if (app.session.finished) {
    const done = document.createElement("p");
    done.className = "end-marker";
    done.textContent = "— the end —";
    box.appendChild(done);
    return;
  }
  for (const label of choiceLabels(app.story, app.session)) {
    const link = document.createElement("a");
    link.href = "#";
    link.className = "choice";
    link.textContent = label;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      banner(null);
      app.session = applyChoice(app.story, app.session, label);
      renderNew(app);
    });
    box.appendChild(link);
  }
}

function resetTranscript(app: App): void {
  el<HTMLDivElement>("transcript").replaceChildren();
  app.shown = 0;
}

function wireControls(app: App): void {
  el<HTMLButtonElement>("save").addEventListener("click", () => {
    banner(null);
    app.store?.set(saveKey(app.hash), serializeSave(app.session, app.hash));
    el<HTMLButtonElement>("reload").disabled = app.store === null;
  });
  el<HTMLButtonElement>("reload").addEventListener("click", () => {
    banner(null);
    const raw = app.store?.get(saveKey(app.hash));
    if (!raw) return;
    try {
      app.session = restoreSave(raw, app.story, app.hash);
    } catch (err) {
      banner(err instanceof HashMismatchError ? "save is for a different story" : String(err));
      return;
    }
    resetTranscript(app);
    renderNew(app);
  });
  el<HTMLButtonElement>("restart").addEventListener("click", () => {
    banner(null);
    app.session = startSession(app.story);
    resetTranscript(app);
    renderNew(app);
  });
}

async function boot(): Promise<void> {
  let story: Story;
  try {
    const response = await fetch("story.json");
    if (!response.ok) throw new PlayerError(`cannot load story.json (${response.status})`);
    story = validateStory(await response.json());
  } catch (err) {
    banner(err instanceof Error ? err.message : String(err));
    return;
  }
  const app: App = {
    story,
    hash: await storyHash(story),
    session: startSession(story),
    shown: 0,
    store: browserStore(),
  };
  el<HTMLHeadingElement>("title").textContent = story.title;
  document.title = story.title;
  wireControls(app);
  renderNew(app);
}

void boot();
