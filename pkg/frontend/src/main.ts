// Entry point: wires the pure state transitions to the DOM and the two
// HTTP endpoints. One in-flight request at a time; a failed send keeps the
// typed message in the input so the user can retry.

import { ApiError, fetchPairs, sendChat } from "./api.js";
import { render, type Elements } from "./render.js";
import {
  beginSend,
  buildChatRequest,
  canSend,
  completeSend,
  failSend,
  initialState,
  selectPair,
  withPairs,
  type UiState,
} from "./state.js";

function serverUrlFromLocation(): string {
  const override = new URLSearchParams(window.location.search).get("server");
  if (override) {
    return override.replace(/\/+$/, "");
  }
  return "http://localhost:8000";
}

function grabElements(): Elements {
  const byId = <T extends HTMLElement>(id: string): T => {
    const el = document.getElementById(id);
    if (!el) {
      throw new Error(`missing element #${id}`);
    }
    return el as T;
  };
  return {
    pairSelect: byId<HTMLSelectElement>("pair-select"),
    thread: byId<HTMLElement>("thread"),
    notice: byId<HTMLElement>("notice"),
    input: byId<HTMLTextAreaElement>("message-input"),
    sendButton: byId<HTMLButtonElement>("send-button"),
  };
}

async function main(): Promise<void> {
  const els = grabElements();
  let state: UiState = initialState(serverUrlFromLocation());

  const update = (next: UiState): void => {
    state = next;
    render(state, els);
  };

  const submit = async (): Promise<void> => {
    const text = els.input.value;
    if (!canSend(state, text)) {
      return;
    }
    const request = buildChatRequest(state, text);
    update(beginSend(state));
    try {
      const response = await sendChat(state.serverUrl, request);
      els.input.value = "";
      update(completeSend(state, text, response));
    } catch (error) {
      // message stays in the input as the retry affordance
      const message =
        error instanceof ApiError
          ? error.message
          : "could not reach the server; check it is running and retry";
      update(failSend(state, message));
    }
    els.input.focus();
  };

  els.pairSelect.addEventListener("change", () => {
    update(selectPair(state, els.pairSelect.value));
  });
  els.input.addEventListener("input", () => render(state, els));
  els.input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      void submit();
    }
  });
  els.sendButton.addEventListener("click", () => void submit());

  try {
    const pairs = await fetchPairs(state.serverUrl);
    update(withPairs(state, pairs));
  } catch {
    update(
      failSend(
        state,
        `could not load language pairs from ${state.serverUrl}; ` +
          "start the chatbot service and reload (or pass ?server=<url>)",
      ),
    );
  }
}

void main();
