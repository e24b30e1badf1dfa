/** Payload shapes of the composition service HTTP API, verbatim. */

export interface RetrievedExample {
  id: string;
  title: string | null;
  similarity: string; // exact decimal string, e.g. "0.5"
  matched_tags: string[];
}

export interface ValidationIssue {
  severity: "warning" | "error";
  code: string;
  detail: string;
  bar_index: number | null;
}

export interface TurnView {
  request: string;
  tags: string[];
  commentary: string;
  abc: string | null;
  raw_reply: string;
  issues: ValidationIssue[];
  retrieved: RetrievedExample[];
  duplicate_of: string | null;
  reprompted: boolean;
}

export interface SessionState {
  session_id: string;
  created_at: number;
  turns: TurnView[];
  transcript: { role: string; content: string }[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
}
