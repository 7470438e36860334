// Conformance: the player must visit exactly the knot sequences the
// pipeline's runtime recorded in the shared vectors.

import { readFile } from "node:fs/promises";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";

import { storyHash } from "../src/hash.js";
import { applyChoice, startSession, visitedKnots } from "../src/player.js";
import { Story, validateStory } from "../src/story.js";

interface VectorRun {
  choices: string[];
  visited: string[];
  finished: boolean;
}

interface VectorStory {
  name: string;
  hash: string;
  story: unknown;
  runs: VectorRun[];
}

let vectors: { stories: VectorStory[] };

beforeAll(async () => {
  const path = fileURLToPath(new URL("../fixtures/vectors.json", import.meta.url));
  vectors = JSON.parse(await readFile(path, "utf-8"));
});

describe("conformance vectors", () => {
  it("cover the bookstore story and ten generated ones", () => {
    expect(vectors.stories).toHaveLength(11);
    expect(vectors.stories[0]!.name).toBe("bookstore");
  });

  it("hash identically on both sides", async () => {
    for (const entry of vectors.stories) {
      const story = validateStory(entry.story);
      expect(await storyHash(story), entry.name).toBe(entry.hash);
    }
  });

  it("replay to identical knot sequences", () => {
    for (const entry of vectors.stories) {
      const story = validateStory(entry.story) as Story;
      for (const run of entry.runs) {
        let session = startSession(story);
        for (const label of run.choices) {
          session = applyChoice(story, session, label);
        }
        const where = `${entry.name} [${run.choices.join(" / ")}]`;
        expect(visitedKnots(session), where).toEqual(run.visited);
        expect(session.finished, where).toBe(run.finished);
      }
    }
  });

  it("never rests on a divert knot", () => {
    for (const entry of vectors.stories) {
      const story = validateStory(entry.story) as Story;
      for (const run of entry.runs) {
        let session = startSession(story);
        for (const label of run.choices) {
          const exit = story.knots.find((k) => k.id === session.currentKnot)!.exits;
          expect(exit.type).toBe("choices");
          session = applyChoice(story, session, label);
        }
      }
    }
  });
});
