import type { SessionState, TurnView, ValidationIssue } from "./types";

/** Error raised for any non-2xx reply or transport failure. Carries the
 * service's error envelope so callers can branch on `code`. */
export class ApiFailure extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiFailure";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the composition service. Holds no domain logic:
 * every field it exposes is server-provided data. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ApiFailure("network_error", `service unreachable: ${cause}`);
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} ${response.statusText}`;
      try {
        const envelope = await response.json();
        if (typeof envelope.code === "string") code = envelope.code;
        if (typeof envelope.message === "string") message = envelope.message;
      } catch {
        // non-JSON error body; keep the status-line message
      }
      throw new ApiFailure(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  async health(): Promise<{ status: string; entries: number }> {
    return this.request("GET", "/healthz");
  }

  async createSession(): Promise<string> {
    const out = await this.request<{ session_id: string }>(
      "POST",
      "/api/sessions",
    );
    return out.session_id;
  }

  async getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  async sendMessage(sessionId: string, text: string): Promise<TurnView> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  async validate(abc: string): Promise<ValidationIssue[]> {
    const out = await this.request<{ issues: ValidationIssue[] }>(
      "POST",
      "/api/validate",
      { abc },
    );
    return out.issues;
  }
}
