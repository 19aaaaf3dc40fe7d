import { readFileSync } from "node:fs";

import { Window } from "happy-dom";
import { beforeEach, describe, expect, it } from "vitest";

import { App, createApp } from "../src/app.js";
import { SocketLike } from "../src/client.js";
import {
  RecordingPlayer,
  ScriptedSpeechIn,
  StubSpeechOut,
} from "../src/speech.js";
import { ANIMAL_SOUNDS_PROGRAM } from "./fixtures.js";

const PAGE_HTML = readFileSync(new URL("../index.html", import.meta.url), "utf8");

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((event?: unknown) => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: ((event?: unknown) => void) | null = null;
  onerror: ((event?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  receive(message: object): void {
    this.onmessage?.({ data: JSON.stringify(message) });
  }

  lastSent(): object {
    if (this.sent.length === 0) {
      throw new Error("nothing was sent");
    }
    return JSON.parse(this.sent[this.sent.length - 1]);
  }
}

interface Harness {
  app: App;
  socket: FakeSocket;
  doc: Document;
  win: Window;
  player: RecordingPlayer;
  speechIn: ScriptedSpeechIn;
  speechOut: StubSpeechOut;
}

function makeHarness(voiceLines: string[] = []): Harness {
  const win = new Window({
    settings: {
      disableJavaScriptFileLoading: true,
      disableJavaScriptEvaluation: true,
      disableCSSFileLoading: true,
    },
  });
  win.document.write(PAGE_HTML);
  const doc = win.document as unknown as Document;
  const socket = new FakeSocket();
  const player = new RecordingPlayer();
  const speechIn = new ScriptedSpeechIn(voiceLines);
  const speechOut = new StubSpeechOut();
  const app = createApp({
    document: doc,
    serverUrl: "ws://test.invalid/session",
    createSocket: () => socket,
    player,
    speechIn,
    speechOut,
  });
  return { app, socket, doc, win, player, speechIn, speechOut };
}

function agentResponse(text: string, extra: Partial<Record<string, unknown>> = {}) {
  return {
    type: "agent_response",
    text,
    state: "building",
    examples: ["done", "close loop"],
    ...extra,
  };
}

let h: Harness;

beforeEach(() => {
  h = makeHarness();
});

describe("page binding", () => {
  it("starts disconnected with an empty-tree placeholder", () => {
    expect(h.doc.getElementById("status")?.textContent).toBe("disconnected");
    expect(h.doc.getElementById("tree")?.textContent).toContain("No program yet");
  });

  it("reports the connection once the socket opens", () => {
    h.socket.open();
    expect(h.doc.getElementById("status")?.textContent).toBe("connected");
    expect(h.doc.getElementById("status")?.getAttribute("data-connected")).toBe(
      "true",
    );
  });

  it("disables the mic button when speech input is unavailable", () => {
    // the default harness uses ScriptedSpeechIn, which is available
    expect(
      (h.doc.getElementById("mic") as HTMLButtonElement).disabled,
    ).toBe(false);
  });
});

describe("sending", () => {
  beforeEach(() => h.socket.open());

  it("sends composer text as a text-modality utterance", () => {
    h.app.submit("create a program");
    expect(h.socket.lastSent()).toEqual({
      type: "utterance",
      text: "create a program",
      modality: "text",
    });
    const you = h.doc.querySelectorAll('#transcript .entry[data-who="you"]');
    expect(you[you.length - 1].textContent).toBe("create a program");
  });

  it("submits through the form and clears the input box", () => {
    const input = h.doc.getElementById("utterance") as HTMLInputElement;
    input.value = "  say hello  ";
    const form = h.doc.getElementById("composer") as HTMLFormElement;
    form.dispatchEvent(new h.win.Event("submit") as unknown as Event);
    expect(h.socket.lastSent()).toEqual({
      type: "utterance",
      text: "say hello",
      modality: "text",
    });
    expect(input.value).toBe("");
  });

  it("ignores empty submissions", () => {
    h.app.submit("   ");
    expect(h.socket.sent).toEqual([]);
  });

  it("sends mic text as a voice-modality utterance", () => {
    const harness = makeHarness(["play animal sounds"]);
    harness.socket.open();
    (harness.doc.getElementById("mic") as HTMLButtonElement).click();
    expect(harness.speechIn.started).toBe(1);
    expect(harness.socket.lastSent()).toEqual({
      type: "utterance",
      text: "play animal sounds",
      modality: "voice",
    });
  });

  it("queues messages sent before the socket opens and flushes on open", () => {
    const harness = makeHarness();
    harness.app.submit("hello");
    expect(harness.socket.sent).toEqual([]);
    harness.socket.open();
    expect(harness.socket.lastSent()).toEqual({
      type: "utterance",
      text: "hello",
      modality: "text",
    });
  });

  it("help and reset buttons send their dedicated message types", () => {
    (h.doc.getElementById("help-btn") as HTMLButtonElement).click();
    expect(h.socket.lastSent()).toEqual({ type: "help" });
    (h.doc.getElementById("reset-btn") as HTMLButtonElement).click();
    expect(h.socket.lastSent()).toEqual({ type: "reset" });
  });
});

describe("receiving", () => {
  beforeEach(() => h.socket.open());

  it("shows agent replies in the transcript pane", () => {
    h.socket.receive(agentResponse("What do you want to name the program?"));
    const agent = h.doc.querySelectorAll('#transcript .entry[data-who="agent"]');
    expect(agent.length).toBe(1);
    expect(agent[0].textContent).toBe("What do you want to name the program?");
  });

  it("lists the sidebar example phrases for the new state", () => {
    h.socket.receive(agentResponse("ok"));
    const items = [...h.doc.querySelectorAll("#examples li")];
    expect(items.map((li) => li.textContent)).toEqual(["done", "close loop"]);
  });

  it("renders the program tree from a snapshot", () => {
    h.socket.receive(agentResponse("ok", { program: ANIMAL_SOUNDS_PROGRAM }));
    const tree = h.doc.getElementById("tree")!;
    expect(tree.querySelectorAll('li[data-kind="loop_until"]').length).toBe(1);
    expect(tree.querySelectorAll('li[data-kind="if"]').length).toBe(4);
  });

  it("clears the tree when reset is pressed", () => {
    h.socket.receive(agentResponse("ok", { program: ANIMAL_SOUNDS_PROGRAM }));
    (h.doc.getElementById("reset-btn") as HTMLButtonElement).click();
    expect(h.doc.getElementById("tree")?.textContent).toContain("No program yet");
  });

  it("shows protocol errors as system entries", () => {
    h.socket.receive({
      type: "error",
      code: "no_active_run",
      message: "no program is waiting for input",
    });
    const system = h.doc.querySelectorAll('#transcript .entry[data-who="system"]');
    expect(system[0].textContent).toBe(
      "no_active_run: no program is waiting for input",
    );
  });

  it("speaks agent replies only while the speak toggle is on", () => {
    h.socket.receive(agentResponse("first"));
    expect(h.speechOut.spoken).toEqual([]);
    (h.doc.getElementById("speak-toggle") as HTMLInputElement).checked = true;
    h.socket.receive(agentResponse("second"));
    expect(h.speechOut.spoken).toEqual(["second"]);
  });

  it("fills the input box when an example phrase is clicked", () => {
    h.socket.receive(agentResponse("ok"));
    const first = h.doc.querySelector("#examples li") as HTMLElement;
    first.click();
    expect((h.doc.getElementById("utterance") as HTMLInputElement).value).toBe(
      "done",
    );
  });
});

describe("program execution", () => {
  beforeEach(() => h.socket.open());

  it("plays sounds through the player and narrates them", () => {
    h.socket.receive({
      type: "exec_event",
      event: { kind: "sound_out", sound: "dog" },
    });
    expect(h.player.calls).toEqual(["dog"]);
    const run = h.doc.querySelectorAll('#transcript .entry[data-who="run"]');
    expect(run[0].textContent).toBe("plays the dog sound");
  });

  it("routes composer text to the running program while it waits", () => {
    const input = h.doc.getElementById("utterance") as HTMLInputElement;
    h.socket.receive({
      type: "exec_event",
      event: { kind: "input_request", save_as: "animal" },
    });
    expect(input.placeholder).toContain("type your answer");
    h.app.submit("dog");
    expect(h.socket.lastSent()).toEqual({ type: "exec_input", text: "dog" });
    h.socket.receive({ type: "exec_event", event: { kind: "finished" } });
    h.app.submit("play it again");
    expect(h.socket.lastSent()).toEqual({
      type: "utterance",
      text: "play it again",
      modality: "text",
    });
    expect(input.placeholder).toContain("say something");
  });

  it("reports the connection closing as a system entry", () => {
    h.socket.onclose?.();
    expect(h.doc.getElementById("status")?.textContent).toBe("disconnected");
    const system = h.doc.querySelectorAll('#transcript .entry[data-who="system"]');
    expect(system[0].textContent).toBe("connection closed");
  });
});
