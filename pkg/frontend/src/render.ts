// DOM projection of UiState. Stateless: every call redraws from scratch,
// which is cheap at chat-thread sizes and keeps the view a pure function
// of the state object.

import type { UiState } from "./state.js";
import { canSend } from "./state.js";

export interface Elements {
  pairSelect: HTMLSelectElement;
  thread: HTMLElement;
  notice: HTMLElement;
  input: HTMLTextAreaElement;
  sendButton: HTMLButtonElement;
}

function pairLabel(state: UiState, pairId: string): string {
  const pair = state.pairs.find((p) => p.id === pairId);
  return pair ? pair.label : pairId;
}

function renderPairSelect(state: UiState, select: HTMLSelectElement): void {
  select.innerHTML = "";
  for (const pair of state.pairs) {
    const option = document.createElement("option");
    option.value = pair.id;
    option.textContent = pair.label;
    select.appendChild(option);
  }
  select.value = state.selectedPair;
  select.disabled = state.pending;
}

function renderThread(state: UiState, container: HTMLElement): void {
  container.innerHTML = "";
  if (state.thread.length === 0 && !state.pending) {
    const hint = document.createElement("div");
    hint.className = "empty-hint";
    hint.textContent =
      "Ask a question in code-mixed text; the answer comes back the same way.";
    container.appendChild(hint);
    return;
  }
  for (const turn of state.thread) {
    const row = document.createElement("div");
    row.className = `turn ${turn.role}`;
    const bubble = document.createElement("div");
    bubble.className = "bubble";
    // textContent + pre-wrap CSS: plain text with newlines preserved
    const text = document.createElement("div");
    text.className = "bubble-text";
    text.textContent = turn.text;
    bubble.appendChild(text);
    if (turn.role === "assistant") {
      const badge = document.createElement("span");
      badge.className = "pair-badge";
      badge.textContent = pairLabel(state, turn.pair);
      bubble.appendChild(badge);
      if (turn.sources.length > 0) {
        const details = document.createElement("details");
        details.className = "sources";
        const summary = document.createElement("summary");
        summary.textContent = `sources (${turn.sources.length})`;
        details.appendChild(summary);
        const list = document.createElement("div");
        list.className = "source-chips";
        for (const id of turn.sources) {
          const chip = document.createElement("span");
          chip.className = "chip";
          chip.textContent = id;
          list.appendChild(chip);
        }
        details.appendChild(list);
        bubble.appendChild(details);
      }
    }
    row.appendChild(bubble);
    container.appendChild(row);
  }
  if (state.pending) {
    const row = document.createElement("div");
    row.className = "turn assistant";
    const bubble = document.createElement("div");
    bubble.className = "bubble waiting";
    bubble.textContent = "...";
    row.appendChild(bubble);
    container.appendChild(row);
  }
  container.scrollTop = container.scrollHeight;
}

function renderNotice(state: UiState, notice: HTMLElement): void {
  if (state.notice === null) {
    notice.classList.add("hidden");
    notice.textContent = "";
    return;
  }
  notice.classList.remove("hidden");
  notice.textContent = state.notice;
}

export function render(state: UiState, els: Elements): void {
  renderPairSelect(state, els.pairSelect);
  renderThread(state, els.thread);
  renderNotice(state, els.notice);
  els.sendButton.disabled = !canSend(state, els.input.value);
  els.input.disabled = state.pending;
}
