import type { RetrievedExample, TurnView } from "../src/types";

export const RETRIEVED: RetrievedExample[] = [
  {
    id: "E1",
    title: "The Dorian Jig",
    similarity: "0.5",
    matched_tags: ["dorian", "jig"],
  },
  {
    id: "E3",
    title: "The Plain Jig",
    similarity: "0.25",
    matched_tags: ["jig"],
  },
  {
    id: "E2",
    title: "The Major Reel",
    similarity: "0.2",
    matched_tags: ["reel"],
  },
];

export const JIG_ABC = [
  "X:1",
  "T:A Fresh Jig",
  "M:6/8",
  "L:1/8",
  "K:Ddor",
  "|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|dAF DAF|GAG Aag|faf dBA|Bdf d2:|",
].join("\n");

export function makeTurn(overrides: Partial<TurnView> = {}): TurnView {
  return {
    request: "Generate a piece of irish folk music",
    tags: ["dorian", "jig", "reel"],
    commentary: "This will be a lively jig in the dorian mode.",
    abc: JIG_ABC,
    raw_reply: "…",
    issues: [],
    retrieved: RETRIEVED,
    duplicate_of: null,
    reprompted: false,
    ...overrides,
  };
}
