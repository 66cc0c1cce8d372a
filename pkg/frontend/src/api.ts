/**
 * Thin typed client over the design service's HTTP API.  Every method
 * maps one-to-one onto an endpoint; non-2xx responses raise ApiError
 * with the service's error code and message.
 *
 * The quantitative session log (which names the study arm) is exposed
 * only as a download URL, never fetched or parsed here: the client must
 * stay blind to it end to end.
 */

import type { MapRows } from "./tiles.js";

export interface ApiMapPayload {
  rows: MapRows;
}

export interface SuggestionSlot {
  original: ApiMapPayload;
  current: ApiMapPayload;
}

export interface SessionState {
  session_id: string;
  user_id: string;
  iteration: number;
  complete: boolean;
  levels: ApiMapPayload[];
  suggestions: SuggestionSlot[];
}

export interface CreateResponse {
  session_id: string;
  iteration: number;
  levels: ApiMapPayload[];
  complete: boolean;
}

export interface InitialResponse {
  suggestions: ApiMapPayload[];
  iteration: number;
  levels: ApiMapPayload[];
}

export type IterateResponse =
  | { complete: true; levels: ApiMapPayload[] }
  | { complete: false; suggestions: ApiMapPayload[]; iteration: number };

export interface DecisionPayload {
  index: number;
  map: ApiMapPayload;
  liked: boolean;
  kept: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

export class Client {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let parsed: unknown = null;
    try {
      parsed = text === "" ? null : JSON.parse(text);
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      const detail = (parsed ?? {}) as { code?: string; message?: string };
      throw new ApiError(
        response.status,
        detail.code ?? "error",
        detail.message ?? `request failed with status ${response.status}`,
      );
    }
    return parsed as T;
  }

  createSession(userId: string): Promise<CreateResponse> {
    return this.request("POST", "/api/sessions", { user_id: userId });
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  submitInitial(sessionId: string, rows: MapRows): Promise<InitialResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/initial`, { map: { rows } });
  }

  iterate(sessionId: string, decisions: DecisionPayload[]): Promise<IterateResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/iterate`, { decisions });
  }

  submitBlank(sessionId: string, rows: MapRows): Promise<SessionState> {
    return this.request("POST", `/api/sessions/${sessionId}/blank`, { map: { rows } });
  }

  /** Where the quantitative log can be downloaded once the session ends. */
  logUrl(sessionId: string): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/log`;
  }

  /** Where the kept levels can be downloaded as map text. */
  exportUrl(sessionId: string): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/export`;
  }
}
