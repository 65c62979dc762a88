import type {
  ApiErrorBody,
  Profile,
  ScanResponse,
  SurveySummary,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly retriable: boolean;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.code = body.code;
    this.retriable = body.retriable;
    this.status = status;
  }
}

/** Network-level failure (server unreachable, request aborted, ...). */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(cause instanceof Error ? cause.message : String(cause));
    this.name = "OfflineError";
  }
}

export interface ScanRequest {
  image_b64?: string;
  fixture_image_id?: number;
  prompts: string[];
  threshold?: number;
}

export interface SurveyItem {
  item_id: string;
  rating: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed wrapper over the service's `/api/v1` routes.
 *
 * The session token lives only in this object (and thus only in page
 * memory); nothing is ever written to localStorage or cookies.
 */
export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  logout(): void {
    this.token = null;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["content-type"] = "application/json";
    if (this.token !== null) headers["authorization"] = `Bearer ${this.token}`;
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      });
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = {
          code: "protocol",
          message: `unexpected status ${response.status}`,
          retriable: response.status >= 500,
        };
      }
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  async register(body: {
    name: string;
    secret: string;
    conditions?: string[];
    restrictions?: string[];
    goals?: string[];
  }): Promise<{ user_id: string }> {
    return this.request("POST", "/auth/register", body);
  }

  async login(name: string, secret: string): Promise<void> {
    const out = await this.request<{ token: string; expires_at: number }>(
      "POST",
      "/auth/login",
      { name, secret },
    );
    this.token = out.token;
  }

  getProfile(): Promise<Profile> {
    return this.request("GET", "/profile");
  }

  updateProfile(changes: {
    conditions?: string[];
    restrictions?: string[];
    goals?: string[];
    display_name?: string;
  }): Promise<Profile> {
    return this.request("PUT", "/profile", changes);
  }

  scan(body: ScanRequest, signal?: AbortSignal): Promise<ScanResponse> {
    return this.request("POST", "/scan", body, signal);
  }

  submitSurvey(responses: SurveyItem[]): Promise<{ stored: number }> {
    return this.request("POST", "/survey/responses", { responses });
  }

  surveySummary(): Promise<SurveySummary> {
    return this.request("GET", "/survey/summary");
  }

  evalReport(split: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/eval/report?split=${encodeURIComponent(split)}`);
  }
}
