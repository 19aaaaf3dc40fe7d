/**
 * Speech and sound adapters.
 *
 * The app core only sees three small interfaces; the browser entry point
 * plugs in the Web Speech API and HTMLAudio where available, and tests
 * plug in stubs.  Browsers without speech support degrade to the stubs,
 * so voice is always optional: everything can be done by typing.
 */

/** Turns microphone speech into text, one utterance per recognition. */
export interface SpeechIn {
  readonly available: boolean;
  /** Start one recognition; `onText` fires with the transcript. */
  start(onText: (text: string) => void): void;
  stop(): void;
}

/** Reads agent replies aloud. */
export interface SpeechOut {
  readonly available: boolean;
  speak(text: string): void;
}

/** Plays a sound effect by its id (dog, cat, ...). */
export interface SoundPlayer {
  play(soundId: string): void;
}

/** No-microphone stub: `available` is false and start() does nothing. */
export class StubSpeechIn implements SpeechIn {
  readonly available = false;
  start(_onText: (text: string) => void): void {}
  stop(): void {}
}

/** Scriptable recognizer for tests: each start() yields the next line. */
export class ScriptedSpeechIn implements SpeechIn {
  readonly available = true;
  private lines: string[];
  started = 0;

  constructor(lines: string[]) {
    this.lines = [...lines];
  }

  start(onText: (text: string) => void): void {
    this.started += 1;
    const line = this.lines.shift();
    if (line !== undefined) {
      onText(line);
    }
  }

  stop(): void {}
}

/** Silent speaker that remembers what it was asked to say. */
export class StubSpeechOut implements SpeechOut {
  readonly available = true;
  spoken: string[] = [];
  speak(text: string): void {
    this.spoken.push(text);
  }
}

/** Silent player that remembers which sounds were requested. */
export class RecordingPlayer implements SoundPlayer {
  calls: string[] = [];
  play(soundId: string): void {
    this.calls.push(soundId);
  }
}

/** Plays /sounds/<id>.wav through HTMLAudio. */
export class HtmlAudioPlayer implements SoundPlayer {
  private urlFor: (soundId: string) => string;
  private createAudio: (url: string) => { play(): unknown };

  constructor(
    createAudio: (url: string) => { play(): unknown },
    urlFor: (soundId: string) => string = (id) => `/sounds/${id}.wav`,
  ) {
    this.createAudio = createAudio;
    this.urlFor = urlFor;
  }

  play(soundId: string): void {
    const result = this.createAudio(this.urlFor(soundId)).play() as
      | Promise<unknown>
      | undefined;
    // browsers return a promise that rejects when autoplay is blocked;
    // a blocked sound effect should never take the app down
    if (result !== undefined && typeof result.catch === "function") {
      result.catch(() => {});
    }
  }
}

interface RecognitionLike {
  lang: string;
  interimResults: boolean;
  maxAlternatives: number;
  onresult: ((event: { results: { [i: number]: { [j: number]: { transcript: string } } } }) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

/**
 * Web Speech API recognizer (Chrome's webkitSpeechRecognition or the
 * unprefixed SpeechRecognition), or the stub when neither exists.
 */
export function webSpeechIn(win: unknown): SpeechIn {
  const w = win as Record<string, unknown>;
  const Recognition = (w["SpeechRecognition"] ??
    w["webkitSpeechRecognition"]) as (new () => RecognitionLike) | undefined;
  if (Recognition === undefined) {
    return new StubSpeechIn();
  }
  return {
    available: true,
    start(onText: (text: string) => void): void {
      const rec = new Recognition();
      rec.lang = "en-US";
      rec.interimResults = false;
      rec.maxAlternatives = 1;
      rec.onresult = (event) => {
        const transcript = event.results[0]?.[0]?.transcript;
        if (typeof transcript === "string" && transcript.trim() !== "") {
          onText(transcript);
        }
      };
      rec.start();
    },
    stop(): void {},
  };
}

/** speechSynthesis-backed speaker, or a silent one when unsupported. */
export function speechSynthesisOut(win: unknown): SpeechOut {
  const w = win as {
    speechSynthesis?: { speak(u: unknown): void };
    SpeechSynthesisUtterance?: new (text: string) => unknown;
  };
  const synth = w.speechSynthesis;
  const Utterance = w.SpeechSynthesisUtterance;
  if (synth === undefined || Utterance === undefined) {
    return { available: false, speak(_text: string): void {} };
  }
  return {
    available: true,
    speak(text: string): void {
      synth.speak(new Utterance(text));
    },
  };
}
