import abcjs, { type TuneObject } from "abcjs";

/** Renders abc text as engraved notation into `host` and, when browser
 * audio is available, attaches a play button that auditions the tune.
 * Returns false when engraving failed so the caller can fall back to a
 * text view — a render failure must never break the chat flow. */
export type ScoreRenderer = (host: HTMLElement, abc: string) => boolean;

export const renderScore: ScoreRenderer = (host, abc) => {
  let visual: TuneObject | undefined;
  try {
    const sheet = document.createElement("div");
    sheet.className = "score-sheet";
    visual = abcjs.renderAbc(sheet, abc, { responsive: "resize" })[0];
    if (!visual) return false;
    host.appendChild(sheet);
  } catch {
    return false;
  }
  attachPlayButton(host, visual);
  return true;
};

function attachPlayButton(host: HTMLElement, visual: TuneObject): void {
  const AudioCtx =
    window.AudioContext ??
    (window as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext;
  if (!AudioCtx || !abcjs.synth.supportsAudio()) return;

  const button = document.createElement("button");
  button.type = "button";
  button.className = "play-button";
  button.textContent = "▶ play";
  button.addEventListener("click", async () => {
    button.disabled = true;
    try {
      const synth = new abcjs.synth.CreateSynth();
      await synth.init({ visualObj: visual, audioContext: new AudioCtx() });
      await synth.prime();
      synth.start();
    } catch {
      button.textContent = "audio unavailable";
    } finally {
      button.disabled = false;
    }
  });
  host.appendChild(button);
}
