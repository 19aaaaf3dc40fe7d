/**
 * Application wiring: DOM <-> client <-> state.
 *
 * `createApp` takes every environment dependency as a parameter (the
 * document, the socket constructor, the sound player, the speech
 * adapters), so the full app runs unchanged in a browser, under happy-dom
 * in tests, and against either a fake socket or a live service.
 *
 * The page it binds to must contain these ids (index.html does):
 *   #transcript  conversation pane
 *   #tree        program tree pane
 *   #examples    "things you can say" list
 *   #composer    the input form, with #utterance and #send inside
 *   #mic         push-to-talk button
 *   #speak-toggle  checkbox: read agent replies aloud
 *   #help-btn #reset-btn  shortcut buttons
 *   #status      connection indicator
 */

import { ParleyClient, SocketFactory } from "./client.js";
import { ServerMessage } from "./protocol.js";
import { SoundPlayer, SpeechIn, SpeechOut } from "./speech.js";
import {
  UiAction,
  UiState,
  initialState,
  reduce,
  routeFor,
} from "./state.js";
import { renderTree } from "./tree.js";

export interface AppDeps {
  document: Document;
  /** WebSocket endpoint, e.g. ws://localhost:8765/session */
  serverUrl: string;
  createSocket: SocketFactory;
  player: SoundPlayer;
  speechIn: SpeechIn;
  speechOut: SpeechOut;
}

export interface App {
  /** Submit text exactly as if the user typed it and pressed send. */
  submit(text: string): void;
  state(): UiState;
  client: ParleyClient;
  dispose(): void;
}

function mustFind(doc: Document, id: string): HTMLElement {
  const el = doc.getElementById(id);
  if (el === null) {
    throw new Error(`page is missing #${id}`);
  }
  return el;
}

export function createApp(deps: AppDeps): App {
  const doc = deps.document;
  const transcriptPane = mustFind(doc, "transcript");
  const treePane = mustFind(doc, "tree");
  const examplesPane = mustFind(doc, "examples");
  const composer = mustFind(doc, "composer") as HTMLFormElement;
  const inputBox = mustFind(doc, "utterance") as HTMLInputElement;
  const micButton = mustFind(doc, "mic") as HTMLButtonElement;
  const speakToggle = mustFind(doc, "speak-toggle") as HTMLInputElement;
  const helpButton = mustFind(doc, "help-btn") as HTMLButtonElement;
  const resetButton = mustFind(doc, "reset-btn") as HTMLButtonElement;
  const statusBadge = mustFind(doc, "status");

  let state = initialState();
  let renderedEntries = 0;
  // undefined = nothing drawn yet, so the first render always paints
  let renderedProgram: typeof state.program | undefined = undefined;
  let renderedExamples: string[] | null = null;

  function render(): void {
    // transcript: append-only
    for (; renderedEntries < state.transcript.length; renderedEntries++) {
      const entry = state.transcript[renderedEntries];
      const p = doc.createElement("p");
      p.className = "entry";
      p.dataset.who = entry.who;
      p.textContent = entry.text;
      transcriptPane.appendChild(p);
    }
    transcriptPane.scrollTop = transcriptPane.scrollHeight;

    if (state.program !== renderedProgram) {
      renderedProgram = state.program;
      renderTree(doc, treePane, state.program);
    }

    if (state.examples !== renderedExamples) {
      renderedExamples = state.examples;
      examplesPane.textContent = "";
      for (const phrase of state.examples) {
        const item = doc.createElement("li");
        item.textContent = phrase;
        item.className = "example";
        examplesPane.appendChild(item);
      }
    }

    statusBadge.textContent = state.connected ? "connected" : "disconnected";
    statusBadge.dataset.connected = String(state.connected);
    inputBox.placeholder = state.awaitingInput
      ? "the program is listening — type your answer"
      : "say something, like: create a program";
    micButton.disabled = !deps.speechIn.available;
  }

  function dispatch(action: UiAction): void {
    state = reduce(state, action);
    render();
  }

  function handleServerMessage(msg: ServerMessage): void {
    dispatch({ type: "server_message", message: msg });
    if (msg.type === "agent_response" && speakToggle.checked) {
      deps.speechOut.speak(msg.text);
    } else if (msg.type === "exec_event" && msg.event.kind === "sound_out") {
      deps.player.play(msg.event.sound);
    }
  }

  const client = new ParleyClient(deps.serverUrl, deps.createSocket, {
    onMessage: handleServerMessage,
    onOpen: () => dispatch({ type: "connected" }),
    onClose: (reason) => dispatch({ type: "disconnected", reason }),
  });

  function submitText(text: string, modality: "voice" | "text"): void {
    const trimmed = text.trim();
    if (trimmed === "") {
      return;
    }
    const route = routeFor(state);
    dispatch({ type: "user_text", text: trimmed });
    if (route === "exec_input") {
      client.sendExecInput(trimmed);
    } else {
      client.sendUtterance(trimmed, modality);
    }
  }

  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    submitText(inputBox.value, "text");
    inputBox.value = "";
  });

  micButton.addEventListener("click", () => {
    deps.speechIn.start((text) => submitText(text, "voice"));
  });

  helpButton.addEventListener("click", () => {
    dispatch({ type: "user_text", text: "help" });
    client.sendHelp();
  });

  resetButton.addEventListener("click", () => {
    dispatch({ type: "user_text", text: "reset" });
    dispatch({ type: "reset_requested" });
    client.sendReset();
  });

  examplesPane.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    if (target !== null && target.classList.contains("example")) {
      inputBox.value = target.textContent ?? "";
      inputBox.focus();
    }
  });

  render();

  return {
    submit: (text: string) => submitText(text, "text"),
    state: () => state,
    client,
    dispose: () => client.close(),
  };
}
