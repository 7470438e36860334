/** Compiled-narrative schema (story.json) and its loader. */

export type Exit =
  | { type: "end" }
  | { type: "divert"; target: string }
  | { type: "choices"; choices: { label: string; target: string }[] };

export interface Knot {
  id: string;
  body: string;
  exits: Exit;
  note?: string;
}

export interface Story {
  schema_version: number;
  title: string;
  start_knot: string;
  knots: Knot[];
}

export class PlayerError extends Error {}
export class HashMismatchError extends PlayerError {}
export class CorruptSaveError extends PlayerError {}
export class NoSuchChoiceError extends PlayerError {}
export class SessionFinishedError extends PlayerError {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function validExit(value: unknown): value is Exit {
  if (!isRecord(value)) return false;
  if (value.type === "end") return true;
  if (value.type === "divert") return typeof value.target === "string";
  if (value.type === "choices") {
    return (
      Array.isArray(value.choices) &&
      value.choices.length > 0 &&
      value.choices.every(
        (c: unknown) =>
          isRecord(c) && typeof c.label === "string" && typeof c.target === "string"
      )
    );
  }
  return false;
}

/** Parse and structurally validate a story document. */
export function validateStory(data: unknown): Story {
  if (!isRecord(data)) throw new PlayerError("story must be a JSON object");
  if (typeof data.title !== "string") throw new PlayerError("story has no title");
  if (typeof data.start_knot !== "string") throw new PlayerError("story has no start knot");
  if (!Array.isArray(data.knots) || data.knots.length === 0) {
    throw new PlayerError("story has no knots");
  }
  const ids = new Set<string>();
  for (const knot of data.knots) {
    if (!isRecord(knot) || typeof knot.id !== "string" || typeof knot.body !== "string") {
      throw new PlayerError("malformed knot entry");
    }
    if (!validExit(knot.exits)) throw new PlayerError(`knot ${knot.id} has a malformed exit`);
    ids.add(knot.id);
  }
  for (const knot of data.knots as Knot[]) {
    for (const target of exitTargets(knot.exits)) {
      if (!ids.has(target)) throw new PlayerError(`knot ${knot.id} targets unknown knot ${target}`);
    }
  }
  if (!ids.has(data.start_knot)) throw new PlayerError("start knot missing from knot list");
  return data as unknown as Story;
}

export function exitTargets(exit: Exit): string[] {
  if (exit.type === "divert") return [exit.target];
  if (exit.type === "choices") return exit.choices.map((c) => c.target);
  return [];
}

export function knotOf(story: Story, id: string): Knot {
  const knot = story.knots.find((k) => k.id === id);
  if (!knot) throw new PlayerError(`unknown knot ${id}`);
  return knot;
}
