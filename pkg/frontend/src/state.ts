/**
 * UI state and its reducer.
 *
 * Everything the panes show is derived from one immutable UiState value.
 * The reducer is a pure function over (state, action) so the transcript,
 * routing, and tree behavior can all be tested without a DOM or a socket.
 *
 * Input routing rule (mirrors the terminal client): while a running
 * program is waiting for input, plain text from the composer goes to the
 * program as exec input; otherwise it is an utterance to the agent.
 */

import { DialogState, ProgramJson, ServerMessage } from "./protocol.js";

export type Speaker = "you" | "agent" | "run" | "system";

export interface TranscriptEntry {
  who: Speaker;
  text: string;
}

export interface UiState {
  transcript: TranscriptEntry[];
  program: ProgramJson | null;
  examples: string[];
  dialogState: DialogState;
  /** A running program is paused at `get user input`. */
  awaitingInput: boolean;
  connected: boolean;
  /** Sounds played so far, in order (one id per sound_out event). */
  soundsPlayed: string[];
}

export type UiAction =
  | { type: "connected" }
  | { type: "disconnected"; reason: string }
  | { type: "user_text"; text: string }
  | { type: "reset_requested" }
  | { type: "server_message"; message: ServerMessage };

export function initialState(): UiState {
  return {
    transcript: [],
    program: null,
    examples: [],
    dialogState: "home",
    awaitingInput: false,
    connected: false,
    soundsPlayed: [],
  };
}

function withEntry(state: UiState, who: Speaker, text: string): UiState {
  return { ...state, transcript: [...state.transcript, { who, text }] };
}

function applyServerMessage(state: UiState, msg: ServerMessage): UiState {
  switch (msg.type) {
    case "agent_response": {
      let next = withEntry(state, "agent", msg.text);
      next = {
        ...next,
        dialogState: msg.state,
        examples: msg.examples,
        // once the agent is back out of the run, input goes to it again
        awaitingInput: msg.state === "executing" && state.awaitingInput,
      };
      if (msg.program !== undefined) {
        next = { ...next, program: msg.program };
      }
      return next;
    }
    case "exec_event": {
      const event = msg.event;
      switch (event.kind) {
        case "speech_out":
          return withEntry(state, "run", `says: "${event.text}"`);
        case "sound_out":
          return {
            ...withEntry(state, "run", `plays the ${event.sound} sound`),
            soundsPlayed: [...state.soundsPlayed, event.sound],
          };
        case "input_request": {
          const prompt =
            event.save_as === null
              ? "is listening for your answer"
              : `is listening for your answer (saves it as ${event.save_as})`;
          return { ...withEntry(state, "run", prompt), awaitingInput: true };
        }
        case "finished":
          return { ...state, awaitingInput: false };
        case "runtime_error":
          return {
            ...withEntry(state, "run", `stopped: ${event.message}`),
            awaitingInput: false,
          };
      }
      return state;
    }
    case "error":
      return withEntry(state, "system", `${msg.code}: ${msg.message}`);
  }
}

export function reduce(state: UiState, action: UiAction): UiState {
  switch (action.type) {
    case "connected":
      return { ...state, connected: true };
    case "disconnected":
      return {
        ...withEntry(state, "system", action.reason),
        connected: false,
        awaitingInput: false,
      };
    case "user_text":
      // the submitted text is routed by the *pre-submit* state; the entry
      // itself reads the same either way
      return withEntry(state, "you", action.text);
    case "reset_requested":
      return { ...state, program: null, awaitingInput: false };
    case "server_message":
      return applyServerMessage(state, action.message);
  }
}

/** Where composer text should go, given the state at submit time. */
export function routeFor(state: UiState): "exec_input" | "utterance" {
  return state.awaitingInput ? "exec_input" : "utterance";
}
