/**
 * Wire protocol for the parley session endpoint.
 *
 * One WebSocket connection is one conversation.  The client sends four
 * message types and receives three, all as JSON text frames:
 *
 *   client -> server
 *     {"type": "utterance", "text": string, "modality": "voice" | "text"}
 *     {"type": "exec_input", "text": string}
 *     {"type": "reset"}
 *     {"type": "help"}
 *   server -> client
 *     {"type": "agent_response", "text": string, "state": string,
 *      "examples": string[], "program"?: object}
 *     {"type": "exec_event", "event": {"kind": ..., ...}}
 *     {"type": "error", "code": string, "message": string}
 *
 * Every client message produces at least one reply, in causal order.  The
 * "program" field appears on replies for turns that changed the draft or
 * finished a program; "examples" always carries the sidebar phrases for
 * the state the agent ended the turn in.
 */

export type Modality = "voice" | "text";

export type DialogState = "home" | "building" | "awaiting_slot" | "executing";

export type ClientMessage =
  | { type: "utterance"; text: string; modality: Modality }
  | { type: "exec_input"; text: string }
  | { type: "reset" }
  | { type: "help" };

/** Value expressions inside say / create variable / set variable. */
export type ValueExpr =
  | { kind: "literal"; value: string }
  | { kind: "variable"; name: string }
  | { kind: "user_input" };

export type LoopCondition =
  | { kind: "until_user_says"; word: string }
  | { kind: "variable_equals"; variable: string; literal: string }
  | { kind: "count_reached"; times: number };

export type ProgramAction =
  | { kind: "say"; text: ValueExpr }
  | { kind: "play_sound"; sound: string }
  | { kind: "get_user_input"; save_as: string | null }
  | { kind: "create_variable"; name: string; initial: ValueExpr }
  | { kind: "set_variable"; name: string; value: ValueExpr }
  | {
      kind: "if";
      condition: LoopCondition;
      then: ProgramAction[];
      else: ProgramAction[] | null;
    }
  | { kind: "loop_until"; condition: LoopCondition; body: ProgramAction[] }
  | { kind: "repeat_times"; times: number; body: ProgramAction[] };

export interface ProgramJson {
  format_version: number;
  name: string;
  actions: ProgramAction[];
}

/** Events emitted by a running program, one object per event. */
export type RuntimeEvent =
  | { kind: "speech_out"; text: string }
  | { kind: "sound_out"; sound: string }
  | { kind: "input_request"; save_as: string | null }
  | { kind: "finished" }
  | { kind: "runtime_error"; message: string; path: Array<number | string> };

export interface AgentResponse {
  type: "agent_response";
  text: string;
  state: DialogState;
  examples: string[];
  program?: ProgramJson;
}

export interface ExecEventMessage {
  type: "exec_event";
  event: RuntimeEvent;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage = AgentResponse | ExecEventMessage | ErrorMessage;

/** Raised when a frame from the server does not fit the protocol. */
export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

export function utteranceMessage(
  text: string,
  modality: Modality = "text",
): ClientMessage {
  return { type: "utterance", text, modality };
}

export function execInputMessage(text: string): ClientMessage {
  return { type: "exec_input", text };
}

export function resetMessage(): ClientMessage {
  return { type: "reset" };
}

export function helpMessage(): ClientMessage {
  return { type: "help" };
}

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

const DIALOG_STATES: ReadonlySet<string> = new Set([
  "home",
  "building",
  "awaiting_slot",
  "executing",
]);

const EVENT_KINDS: ReadonlySet<string> = new Set([
  "speech_out",
  "sound_out",
  "input_request",
  "finished",
  "runtime_error",
]);

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function requireString(
  obj: Record<string, unknown>,
  field: string,
  context: string,
): string {
  const value = obj[field];
  if (typeof value !== "string") {
    throw new ProtocolError(`${context} needs a string '${field}' field`);
  }
  return value;
}

function parseRuntimeEvent(value: unknown): RuntimeEvent {
  if (!isRecord(value)) {
    throw new ProtocolError("exec_event 'event' must be an object");
  }
  const kind = value["kind"];
  if (typeof kind !== "string" || !EVENT_KINDS.has(kind)) {
    throw new ProtocolError(`unknown event kind ${JSON.stringify(kind)}`);
  }
  switch (kind) {
    case "speech_out":
      return { kind, text: requireString(value, "text", "speech_out event") };
    case "sound_out":
      return { kind, sound: requireString(value, "sound", "sound_out event") };
    case "input_request": {
      const saveAs = value["save_as"];
      if (saveAs !== null && typeof saveAs !== "string") {
        throw new ProtocolError(
          "input_request event needs a string-or-null 'save_as' field",
        );
      }
      return { kind, save_as: saveAs ?? null };
    }
    case "finished":
      return { kind };
    default: {
      const path = value["path"];
      if (!Array.isArray(path)) {
        throw new ProtocolError("runtime_error event needs a 'path' array");
      }
      return {
        kind: "runtime_error",
        message: requireString(value, "message", "runtime_error event"),
        path: path as Array<number | string>,
      };
    }
  }
}

function parseProgram(value: unknown): ProgramJson {
  if (
    !isRecord(value) ||
    typeof value["name"] !== "string" ||
    !Array.isArray(value["actions"])
  ) {
    throw new ProtocolError(
      "'program' must be an object with 'name' and 'actions'",
    );
  }
  return value as unknown as ProgramJson;
}

/**
 * Decode one text frame from the server.  Throws ProtocolError on frames
 * that are not JSON or do not match one of the three server shapes; the
 * caller decides whether that tears down the connection or just gets
 * surfaced to the user.
 */
export function parseServerMessage(raw: string): ServerMessage {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    throw new ProtocolError("server frame is not valid JSON");
  }
  if (!isRecord(value)) {
    throw new ProtocolError("server frame must be a JSON object");
  }
  const type = value["type"];
  if (type === "agent_response") {
    const state = requireString(value, "state", "agent_response");
    if (!DIALOG_STATES.has(state)) {
      throw new ProtocolError(`unknown dialog state ${JSON.stringify(state)}`);
    }
    const examples = value["examples"];
    if (
      !Array.isArray(examples) ||
      examples.some((e) => typeof e !== "string")
    ) {
      throw new ProtocolError("agent_response needs an 'examples' string array");
    }
    const msg: AgentResponse = {
      type: "agent_response",
      text: requireString(value, "text", "agent_response"),
      state: state as DialogState,
      examples: examples as string[],
    };
    if ("program" in value && value["program"] !== undefined) {
      msg.program = parseProgram(value["program"]);
    }
    return msg;
  }
  if (type === "exec_event") {
    return { type: "exec_event", event: parseRuntimeEvent(value["event"]) };
  }
  if (type === "error") {
    return {
      type: "error",
      code: requireString(value, "code", "error message"),
      message: requireString(value, "message", "error message"),
    };
  }
  throw new ProtocolError(`unknown server message type ${JSON.stringify(type)}`);
}
