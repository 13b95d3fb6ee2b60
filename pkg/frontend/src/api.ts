// Thin fetch wrappers for the two chatbot endpoints this client consumes:
// GET /pairs and POST /chat.

import type { ChatRequest, ChatResponse, PairInfo } from "./state.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string" && body.detail.length > 0) {
      return body.detail;
    }
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `request failed with status ${response.status}`;
}

export async function fetchPairs(serverUrl: string): Promise<PairInfo[]> {
  const response = await fetch(`${serverUrl}/pairs`);
  if (!response.ok) {
    throw new ApiError(response.status, await errorDetail(response));
  }
  return (await response.json()) as PairInfo[];
}

export async function sendChat(
  serverUrl: string,
  request: ChatRequest,
): Promise<ChatResponse> {
  const response = await fetch(`${serverUrl}/chat`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) {
    throw new ApiError(response.status, await errorDetail(response));
  }
  return (await response.json()) as ChatResponse;
}
