/**
 * Browser entry point: bind the app to the real page, the real
 * WebSocket, HTMLAudio playback, and whatever speech support the browser
 * has (stubs otherwise — typing always works).
 *
 * Served by the backing service itself:
 *
 *   parley --serve --static-dir frontend
 *
 * which puts this page at / and the session endpoint at /session on the
 * same origin.
 */

import { createApp } from "./app.js";
import { SocketLike } from "./client.js";
import { HtmlAudioPlayer, speechSynthesisOut, webSpeechIn } from "./speech.js";

const wsProtocol = location.protocol === "https:" ? "wss" : "ws";

createApp({
  document,
  serverUrl: `${wsProtocol}://${location.host}/session`,
  createSocket: (url) => new WebSocket(url) as unknown as SocketLike,
  player: new HtmlAudioPlayer((src) => new Audio(src)),
  speechIn: webSpeechIn(window),
  speechOut: speechSynthesisOut(window),
});
