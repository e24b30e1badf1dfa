import { ApiClient, ApiFailure } from "./api";
import type { ScoreRenderer } from "./render";
import { errorBubble, turnView } from "./views";

/** Wires the chat column to the service: one session per page load, one
 * in-flight turn at a time (input disabled while waiting, mirroring the
 * server's per-session serialization), errors shown inline with retry. */
export function createApp(
  root: HTMLElement,
  client: ApiClient,
  renderScore: ScoreRenderer,
): { whenReady: Promise<void> } {
  root.innerHTML = `
    <header class="masthead">
      <h1>tunesmith</h1>
      <p class="tagline">chat with a folk-tune composer</p>
    </header>
    <main class="transcript"></main>
    <form class="composer-form">
      <input class="composer-input" type="text" autocomplete="off"
             placeholder="e.g. Generate a piece of irish folk music" disabled>
      <button class="composer-send" type="submit" disabled>send</button>
    </form>
  `;
  const transcript = root.querySelector<HTMLElement>(".transcript")!;
  const form = root.querySelector<HTMLFormElement>(".composer-form")!;
  const input = root.querySelector<HTMLInputElement>(".composer-input")!;
  const send = root.querySelector<HTMLButtonElement>(".composer-send")!;

  let sessionId: string | null = null;
  let inFlight = false;

  const setBusy = (busy: boolean) => {
    inFlight = busy;
    input.disabled = busy || sessionId === null;
    send.disabled = busy || sessionId === null;
  };

  const showError = (failure: unknown, onRetry: () => void) => {
    const message =
      failure instanceof ApiFailure
        ? `${failure.code}: ${failure.message}`
        : String(failure);
    transcript.appendChild(errorBubble(message, onRetry));
  };

  const bootstrap = async (): Promise<void> => {
    try {
      sessionId = await client.createSession();
      setBusy(false);
      input.focus();
    } catch (failure) {
      showError(failure, () => void bootstrap());
    }
  };

  const submit = async (text: string): Promise<void> => {
    if (sessionId === null || inFlight) return;
    setBusy(true);
    try {
      const turn = await client.sendMessage(sessionId, text);
      transcript.appendChild(turnView(turn, renderScore));
      input.value = "";
    } catch (failure) {
      // Transcript unchanged on failure; the retry resends the same text.
      showError(failure, () => void submit(text));
    } finally {
      setBusy(false);
      input.focus();
    }
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (text.length > 0) void submit(text);
  });

  return { whenReady: bootstrap() };
}
