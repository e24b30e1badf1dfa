import type { ScoreRenderer } from "./render";
import type { RetrievedExample, TurnView, ValidationIssue } from "./types";

/** Pure DOM builders for the chat column. Everything shown here is
 * server-provided data; no retrieval or validation logic is replicated
 * client-side. */

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function issueBadge(issue: ValidationIssue): HTMLElement {
  const badge = el("span", `badge badge-${issue.severity}`, issue.code);
  const where = issue.bar_index === null ? "" : ` (bar ${issue.bar_index})`;
  badge.title = issue.detail + where;
  return badge;
}

export function retrievalPanel(examples: RetrievedExample[]): HTMLElement {
  const panel = el("details", "retrieval-panel");
  panel.appendChild(
    el("summary", "retrieval-summary", `examples used (${examples.length})`),
  );
  const list = el("ul", "retrieval-list");
  for (const example of examples) {
    const item = el("li", "retrieval-entry");
    item.appendChild(el("span", "retrieval-title", example.title ?? example.id));
    item.appendChild(
      el("span", "retrieval-tags", example.matched_tags.join(", ")),
    );
    item.appendChild(
      el("span", "retrieval-similarity", `similarity ${example.similarity}`),
    );
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

/** One completed turn: the user's request, the composer's commentary, the
 * tune (engraved score, or monospaced text when engraving fails), issue
 * badges and the retrieval provenance panel. A turn with no tune shows an
 * explicit notice instead of an empty score. */
export function turnView(turn: TurnView, renderScore: ScoreRenderer): HTMLElement {
  const root = el("article", "turn");
  root.appendChild(el("div", "bubble bubble-user", turn.request));

  const reply = el("div", "bubble bubble-assistant");
  reply.appendChild(el("p", "commentary", turn.commentary));

  if (turn.abc === null) {
    reply.appendChild(el("p", "no-tune-notice", "no tune produced this turn"));
  } else {
    const score = el("div", "score");
    if (!renderScore(score, turn.abc)) {
      score.appendChild(el("pre", "abc-fallback", turn.abc));
    }
    reply.appendChild(score);
  }

  if (turn.issues.length > 0) {
    const badges = el("div", "badges");
    for (const issue of turn.issues) badges.appendChild(issueBadge(issue));
    reply.appendChild(badges);
  }
  if (turn.duplicate_of !== null) {
    reply.appendChild(
      el(
        "p",
        "duplicate-notice",
        `identical to corpus entry ${turn.duplicate_of}`,
      ),
    );
  }
  if (turn.retrieved.length > 0) {
    reply.appendChild(retrievalPanel(turn.retrieved));
  }

  root.appendChild(reply);
  return root;
}

/** Inline error bubble with a retry hook; the transcript above it is left
 * untouched. */
export function errorBubble(message: string, onRetry: () => void): HTMLElement {
  const bubble = el("div", "bubble bubble-error");
  bubble.appendChild(el("span", "error-text", message));
  const retry = el("button", "retry-button", "retry");
  retry.type = "button";
  retry.addEventListener("click", () => {
    bubble.remove();
    onRetry();
  });
  bubble.appendChild(retry);
  return bubble;
}
