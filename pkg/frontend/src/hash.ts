/** Canonical JSON hashing, byte-compatible with the pipeline's save format. */

import type { Story } from "./story.js";

/** JSON with lexicographically sorted keys and no whitespace. */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") return JSON.stringify(value);
  if (Array.isArray(value)) return "[" + value.map(canonicalJson).join(",") + "]";
  const record = value as Record<string, unknown>;
  const parts = Object.keys(record)
    .sort()
    .map((key) => JSON.stringify(key) + ":" + canonicalJson(record[key]));
  return "{" + parts.join(",") + "}";
}

/** SHA-256 of the canonical story content (the schema envelope excluded). */
export async function storyHash(story: Story): Promise<string> {
  const { schema_version: _ignored, ...core } = story;
  const bytes = new TextEncoder().encode(canonicalJson(core));
  const digest = await crypto.subtle.digest("SHA-256", bytes);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}
