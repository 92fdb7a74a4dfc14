/** Thin fetch client for the enrollment/authentication service. */

import type { TraceJson } from "./trace.js";

export interface EnrollStartResponse {
  session_id: string;
  required_reps: number;
}

export interface EnrollTraceResponse {
  accepted: boolean;
  remaining: number;
  warnings: string[];
  complete?: boolean;
  mean_bits?: number | null;
  security_band?: string | null;
}

export interface AuthResponse {
  accepted: boolean;
  score: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const code = typeof body.error === "string" ? body.error : "error";
    const message = typeof body.message === "string" ? body.message : response.statusText;
    throw new ApiError(response.status, code, message);
  }
  return body as T;
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private post<T>(path: string, payload: unknown): Promise<T> {
    return fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then((r) => unwrap<T>(r));
  }

  health(): Promise<{ status: string }> {
    return fetch(this.baseUrl + "/health").then((r) => unwrap(r));
  }

  startEnrollment(gestureId: string, requiredReps?: number, overwrite = false): Promise<EnrollStartResponse> {
    const query = overwrite ? "?overwrite=true" : "";
    const payload: Record<string, unknown> = { gesture_id: gestureId };
    if (requiredReps !== undefined) {
      payload.required_reps = requiredReps;
    }
    return this.post(`/enroll/start${query}`, payload);
  }

  submitTrace(sessionId: string, trace: TraceJson): Promise<EnrollTraceResponse> {
    return this.post(`/enroll/${sessionId}/trace`, trace);
  }

  authenticate(gestureId: string, trace: TraceJson, threshold?: number): Promise<AuthResponse> {
    const payload: Record<string, unknown> = { gesture_id: gestureId, trace };
    if (threshold !== undefined) {
      payload.threshold = threshold;
    }
    return this.post("/auth", payload);
  }

  analyzeMi(a: TraceJson, b: TraceJson): Promise<{ total_bits: number; retained_k: number }> {
    return this.post("/analyze/mi", { traces: [a, b] });
  }
}
