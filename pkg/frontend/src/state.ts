// Pure UI state and transitions. Nothing in this module touches the DOM or
// the network, so every behavior the client guarantees (pair routing, the
// two-turns-per-exchange invariant, no thread mutation on failure) is
// testable as plain function calls.

export interface PairInfo {
  id: string;
  label: string;
}

export interface UserTurn {
  role: "user";
  text: string;
}

export interface AssistantTurn {
  role: "assistant";
  text: string;
  pair: string;
  sources: string[];
}

export type Turn = UserTurn | AssistantTurn;

export interface ChatRequest {
  pair: string;
  message: string;
  session_id?: string;
}

export interface ChatResponse {
  answer_cm: string;
  answer_en: string;
  sources: string[];
  session_id: string;
}

export interface UiState {
  serverUrl: string;
  pairs: PairInfo[];
  selectedPair: string;
  thread: Turn[];
  pending: boolean;
  sessionId: string | null;
  // error banner; lives outside the thread so a failed exchange never
  // changes the transcript
  notice: string | null;
}

export function initialState(serverUrl: string): UiState {
  return {
    serverUrl,
    pairs: [],
    selectedPair: "",
    thread: [],
    pending: false,
    sessionId: null,
    notice: null,
  };
}

/** Install the server's pair list; the first entry becomes the default. */
export function withPairs(state: UiState, pairs: PairInfo[]): UiState {
  const first = pairs[0];
  return {
    ...state,
    pairs,
    selectedPair: first ? first.id : "",
  };
}

/** Switch the active pair. Ids not in the server's list are ignored. */
export function selectPair(state: UiState, pairId: string): UiState {
  if (!state.pairs.some((p) => p.id === pairId)) {
    return state;
  }
  return { ...state, selectedPair: pairId };
}

export function canSend(state: UiState, text: string): boolean {
  return !state.pending && text.trim().length > 0 && state.selectedPair !== "";
}

/** The exact /chat payload for the message as currently configured. */
export function buildChatRequest(state: UiState, text: string): ChatRequest {
  const request: ChatRequest = {
    pair: state.selectedPair,
    message: text.trim(),
  };
  if (state.sessionId) {
    request.session_id = state.sessionId;
  }
  return request;
}

export function beginSend(state: UiState): UiState {
  return { ...state, pending: true, notice: null };
}

/**
 * A successful exchange appends exactly two turns: the user's message and
 * the assistant's code-mixed answer (tagged with the pair it was sent as).
 */
export function completeSend(
  state: UiState,
  text: string,
  response: ChatResponse,
): UiState {
  const userTurn: UserTurn = { role: "user", text: text.trim() };
  const assistantTurn: AssistantTurn = {
    role: "assistant",
    text: response.answer_cm,
    pair: state.selectedPair,
    sources: response.sources,
  };
  return {
    ...state,
    thread: [...state.thread, userTurn, assistantTurn],
    pending: false,
    sessionId: response.session_id,
    notice: null,
  };
}

/** A failed exchange surfaces a notice and leaves the thread untouched. */
export function failSend(state: UiState, message: string): UiState {
  return { ...state, pending: false, notice: message };
}

export function dismissNotice(state: UiState): UiState {
  return { ...state, notice: null };
}
