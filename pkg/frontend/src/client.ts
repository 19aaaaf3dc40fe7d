/**
 * WebSocket client for one parley conversation.
 *
 * The socket constructor is injected so the same client runs on a browser
 * WebSocket, the `ws` package under Node, or a hand-rolled fake in unit
 * tests.  Only the WHATWG-style surface is needed: `send`, `close`, and
 * the assignable `onopen` / `onmessage` / `onclose` / `onerror` handlers,
 * which both the browser and `ws` provide.
 */

import {
  ClientMessage,
  Modality,
  ProtocolError,
  ServerMessage,
  encodeClientMessage,
  execInputMessage,
  helpMessage,
  parseServerMessage,
  resetMessage,
  utteranceMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
  onerror: ((event?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHandlers {
  /** One decoded server message, in arrival order. */
  onMessage: (msg: ServerMessage) => void;
  /** The connection is open and messages can be sent. */
  onOpen?: () => void;
  /** The connection is gone (server close, network drop, bad frame). */
  onClose?: (reason: string) => void;
}

/**
 * Sends client messages, decodes server frames, and reports connection
 * life-cycle changes.  Messages sent before the socket opens are queued
 * and flushed on open, so callers never have to wait for the handshake.
 */
export class ParleyClient {
  private socket: SocketLike;
  private handlers: ClientHandlers;
  private open = false;
  private closed = false;
  private pending: string[] = [];

  constructor(url: string, createSocket: SocketFactory, handlers: ClientHandlers) {
    this.handlers = handlers;
    this.socket = createSocket(url);
    this.socket.onopen = () => {
      this.open = true;
      for (const frame of this.pending.splice(0)) {
        this.socket.send(frame);
      }
      this.handlers.onOpen?.();
    };
    this.socket.onmessage = (event) => {
      const raw =
        typeof event.data === "string" ? event.data : String(event.data);
      let msg: ServerMessage;
      try {
        msg = parseServerMessage(raw);
      } catch (err) {
        if (err instanceof ProtocolError) {
          this.teardown(`protocol error: ${err.message}`);
          return;
        }
        throw err;
      }
      this.handlers.onMessage(msg);
    };
    this.socket.onclose = () => {
      this.teardown("connection closed");
    };
    this.socket.onerror = () => {
      this.teardown("connection error");
    };
  }

  get isOpen(): boolean {
    return this.open && !this.closed;
  }

  send(msg: ClientMessage): void {
    if (this.closed) {
      throw new Error("client is closed");
    }
    const frame = encodeClientMessage(msg);
    if (this.open) {
      this.socket.send(frame);
    } else {
      this.pending.push(frame);
    }
  }

  sendUtterance(text: string, modality: Modality = "text"): void {
    this.send(utteranceMessage(text, modality));
  }

  sendExecInput(text: string): void {
    this.send(execInputMessage(text));
  }

  sendReset(): void {
    this.send(resetMessage());
  }

  sendHelp(): void {
    this.send(helpMessage());
  }

  close(): void {
    this.teardown("closed by client");
    this.socket.close();
  }

  private teardown(reason: string): void {
    if (this.closed) {
      return;
    }
    this.closed = true;
    this.open = false;
    this.handlers.onClose?.(reason);
  }
}
