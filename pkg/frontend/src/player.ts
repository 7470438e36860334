/** Session stepper over a story graph.
 *
 * Mirrors the terminal runtime: divert chains auto-advance with each step
 * recorded, sessions rest at choice or end knots, and saves persist only
 * the story hash plus the step history, restored by replay.
 */

import {
  CorruptSaveError,
  HashMismatchError,
  NoSuchChoiceError,
  PlayerError,
  SessionFinishedError,
  Story,
  knotOf,
} from "./story.js";

export const AUTO = "auto";
export const SAVE_VERSION = 1;

export type Step = readonly [knot: string, action: string];

export interface Session {
  readonly currentKnot: string;
  readonly history: readonly Step[];
  readonly finished: boolean;
}

function advance(story: Story, start: string, history: Step[]): string {
  let current = start;
  let steps = 0;
  for (;;) {
    const exit = knotOf(story, current).exits;
    if (exit.type !== "divert") return current;
    history.push([current, AUTO]);
    current = exit.target;
    steps += 1;
    if (steps > story.knots.length) throw new PlayerError("auto-advance did not terminate");
  }
}

export function startSession(story: Story): Session {
  const history: Step[] = [];
  const current = advance(story, story.start_knot, history);
  return {
    currentKnot: current,
    history,
    finished: knotOf(story, current).exits.type === "end",
  };
}

export function choiceLabels(story: Story, session: Session): string[] {
  const exit = knotOf(story, session.currentKnot).exits;
  return exit.type === "choices" ? exit.choices.map((c) => c.label) : [];
}

export function applyChoice(story: Story, session: Session, label: string): Session {
  if (session.finished) throw new SessionFinishedError("the narrative already reached an end");
  const exit = knotOf(story, session.currentKnot).exits;
  if (exit.type !== "choices") {
    throw new NoSuchChoiceError(`knot ${session.currentKnot} offers no choices`);
  }
  const choice = exit.choices.find((c) => c.label === label);
  if (!choice) throw new NoSuchChoiceError(`no choice labelled "${label}"`);

  const history: Step[] = [...session.history, [session.currentKnot, label]];
  const current = advance(story, choice.target, history);
  return {
    currentKnot: current,
    history,
    finished: knotOf(story, current).exits.type === "end",
  };
}

/** Every knot seen so far, in order, including the current one. */
export function visitedKnots(session: Session): string[] {
  return [...session.history.map(([knot]) => knot), session.currentKnot];
}

export function serializeSave(session: Session, hash: string): string {
  return JSON.stringify({
    version: SAVE_VERSION,
    narrative_hash: hash,
    history: session.history.map(([knot, action]) => [knot, action]),
  });
}

export function restoreSave(text: string, story: Story, hash: string): Session {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch {
    throw new CorruptSaveError("unreadable save data");
  }
  if (typeof payload !== "object" || payload === null) {
    throw new CorruptSaveError("unreadable save data");
  }
  const data = payload as { version?: unknown; narrative_hash?: unknown; history?: unknown };
  if (data.version !== SAVE_VERSION) throw new CorruptSaveError("unsupported save version");
  if (!Array.isArray(data.history)) throw new CorruptSaveError("save has no history");
  if (data.narrative_hash !== hash) {
    throw new HashMismatchError("save is for a different story");
  }

  const history: Step[] = data.history.map((step: unknown) => {
    if (!Array.isArray(step) || step.length !== 2) throw new CorruptSaveError("malformed step");
    return [String(step[0]), String(step[1])];
  });
  let session = startSession(story);
  try {
    for (const [, action] of history) {
      if (action !== AUTO) session = applyChoice(story, session, action);
    }
  } catch (err) {
    if (err instanceof HashMismatchError) throw err;
    throw new CorruptSaveError("history cannot be replayed");
  }
  const replayed = JSON.stringify(session.history);
  if (replayed !== JSON.stringify(history)) {
    throw new CorruptSaveError("history does not match a valid replay");
  }
  return session;
}
