import { describe, expect, it } from "vitest";

import {
  beginSend,
  buildChatRequest,
  canSend,
  completeSend,
  dismissNotice,
  failSend,
  initialState,
  selectPair,
  withPairs,
  type ChatResponse,
  type PairInfo,
} from "../src/state.js";

const PAIRS: PairInfo[] = [
  { id: "en-hi", label: "English-Hindi" },
  { id: "en-bn", label: "English-Bengali" },
  { id: "en-gu", label: "English-Gujarati" },
  { id: "en-fr", label: "English-French" },
  { id: "en-es", label: "English-Spanish" },
];

const RESPONSE: ChatResponse = {
  answer_cm: "Topic teen mein details hain.",
  answer_en: "Topic three has the details.",
  sources: ["p0000", "l0002"],
  session_id: "abc123",
};

function loaded() {
  return withPairs(initialState("http://localhost:8000"), PAIRS);
}

describe("pair selection", () => {
  it("defaults to the first listed pair", () => {
    expect(loaded().selectedPair).toBe("en-hi");
  });

  it("changes the outgoing pair field", () => {
    const state = selectPair(loaded(), "en-bn");
    expect(buildChatRequest(state, "bolo to").pair).toBe("en-bn");
  });

  it("ignores ids the server did not list", () => {
    const state = loaded();
    expect(selectPair(state, "en-de")).toBe(state);
    expect(selectPair(state, "en-de").selectedPair).toBe("en-hi");
  });
});

describe("sending", () => {
  it("is blocked for empty or whitespace input", () => {
    const state = loaded();
    expect(canSend(state, "")).toBe(false);
    expect(canSend(state, "   ")).toBe(false);
    expect(canSend(state, "kya haal hai")).toBe(true);
  });

  it("is blocked while a request is in flight", () => {
    const state = beginSend(loaded());
    expect(canSend(state, "kya haal hai")).toBe(false);
  });

  it("is blocked before the pair list arrives", () => {
    expect(canSend(initialState("x"), "kya haal hai")).toBe(false);
  });

  it("trims the message and omits session_id on the first exchange", () => {
    const request = buildChatRequest(loaded(), "  kya haal hai  ");
    expect(request).toEqual({ pair: "en-hi", message: "kya haal hai" });
  });

  it("reuses the session id returned by the previous exchange", () => {
    let state = loaded();
    state = completeSend(beginSend(state), "pehla sawaal", RESPONSE);
    const request = buildChatRequest(state, "doosra sawaal");
    expect(request.session_id).toBe("abc123");
  });
});

describe("round trip", () => {
  it("appends exactly two turns per successful exchange", () => {
    let state = loaded();
    state = completeSend(beginSend(state), "term003 kya hai?", RESPONSE);
    expect(state.thread).toHaveLength(2);
    expect(state.thread[0]).toEqual({ role: "user", text: "term003 kya hai?" });
    expect(state.thread[1]).toEqual({
      role: "assistant",
      text: "Topic teen mein details hain.",
      pair: "en-hi",
      sources: ["p0000", "l0002"],
    });

    state = completeSend(beginSend(state), "aur batao", RESPONSE);
    expect(state.thread).toHaveLength(4);
    expect(state.pending).toBe(false);
  });

  it("tags the assistant turn with the pair active at send time", () => {
    let state = selectPair(loaded(), "en-bn");
    state = completeSend(beginSend(state), "eta ki?", RESPONSE);
    const last = state.thread[1];
    expect(last && last.role === "assistant" && last.pair).toBe("en-bn");
  });
});

describe("failure", () => {
  it("raises a notice and leaves the thread untouched", () => {
    let state = loaded();
    state = completeSend(beginSend(state), "pehla", RESPONSE);
    const before = state.thread;

    state = failSend(beginSend(state), "chat backend failed");
    expect(state.thread).toBe(before);
    expect(state.thread).toHaveLength(2);
    expect(state.pending).toBe(false);
    expect(state.notice).toBe("chat backend failed");
  });

  it("clears the notice on the next attempt", () => {
    let state = failSend(loaded(), "boom");
    state = beginSend(state);
    expect(state.notice).toBeNull();
    expect(state.pending).toBe(true);
  });

  it("can be dismissed without touching anything else", () => {
    const failed = failSend(loaded(), "boom");
    const cleared = dismissNotice(failed);
    expect(cleared.notice).toBeNull();
    expect(cleared.thread).toBe(failed.thread);
    expect(cleared.selectedPair).toBe(failed.selectedPair);
  });
});
