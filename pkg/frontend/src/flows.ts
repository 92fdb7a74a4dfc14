/**
 * Enrollment and authentication flows as plain state machines.
 *
 * The canvas layer feeds finished traces in; these track progress, surface
 * service warnings verbatim, and keep at most one request in flight so a
 * fast double-gesture cannot race the enrollment counter.
 */

import type { ApiError, EnrollTraceResponse, ServiceClient } from "./client.js";
import type { TraceJson } from "./trace.js";

export type EnrollmentPhase = "idle" | "collecting" | "submitting" | "done" | "error";

export interface EnrollmentStatus {
  phase: EnrollmentPhase;
  collected: number;
  required: number;
  warnings: string[];
  meanBits: number | null;
  securityBand: string | null;
  message: string;
}

export class EnrollmentFlow {
  private sessionId: string | null = null;
  private status: EnrollmentStatus = {
    phase: "idle",
    collected: 0,
    required: 0,
    warnings: [],
    meanBits: null,
    securityBand: null,
    message: "",
  };
  private inFlight = false;

  constructor(
    private readonly client: ServiceClient,
    private readonly gestureId: string,
    private readonly requiredReps = 10,
  ) {}

  get current(): EnrollmentStatus {
    return { ...this.status, warnings: [...this.status.warnings] };
  }

  async start(overwrite = false): Promise<EnrollmentStatus> {
    const started = await this.client.startEnrollment(this.gestureId, this.requiredReps, overwrite);
    this.sessionId = started.session_id;
    this.status = {
      phase: "collecting",
      collected: 0,
      required: started.required_reps,
      warnings: [],
      meanBits: null,
      securityBand: null,
      message: `draw the gesture ${started.required_reps} times`,
    };
    return this.current;
  }

  /** Abandon the session; the next start() begins from zero. */
  abort(): EnrollmentStatus {
    this.sessionId = null;
    this.inFlight = false;
    this.status = {
      phase: "idle",
      collected: 0,
      required: 0,
      warnings: [],
      meanBits: null,
      securityBand: null,
      message: "enrollment aborted",
    };
    return this.current;
  }

  async submit(trace: TraceJson): Promise<EnrollmentStatus> {
    if (this.sessionId === null || this.status.phase === "done") {
      this.status.message = "start an enrollment first";
      return this.current;
    }
    if (this.inFlight) {
      this.status.message = "still submitting the previous repetition";
      return this.current;
    }
    this.inFlight = true;
    this.status.phase = "submitting";
    try {
      const response: EnrollTraceResponse = await this.client.submitTrace(this.sessionId, trace);
      this.status.collected += 1;
      this.status.warnings.push(...response.warnings);
      if (response.complete) {
        this.status.phase = "done";
        this.status.meanBits = response.mean_bits ?? null;
        this.status.securityBand = response.security_band ?? null;
        this.status.message =
          this.status.meanBits === null
            ? "enrolled"
            : `enrolled: ${this.status.meanBits.toFixed(1)} bits (${this.status.securityBand})`;
        this.sessionId = null;
      } else {
        this.status.phase = "collecting";
        this.status.message = `${response.remaining} repetitions to go`;
      }
    } catch (err) {
      // surface the service's message verbatim (e.g. finger-count mismatch)
      const api = err as ApiError;
      this.status.phase = "collecting";
      this.status.message = api.message ?? String(err);
      this.status.warnings.push(this.status.message);
    } finally {
      this.inFlight = false;
    }
    return this.current;
  }
}

export interface AuthOutcome {
  accepted: boolean | null;
  score: number | null;
  message: string;
}

export class AuthFlow {
  constructor(
    private readonly client: ServiceClient,
    private readonly gestureId: string,
  ) {}

  async attempt(trace: TraceJson, threshold?: number): Promise<AuthOutcome> {
    try {
      const result = await this.client.authenticate(this.gestureId, trace, threshold);
      const message = result.accepted
        ? `accepted (score ${result.score.toFixed(2)})`
        : result.score === 0
          ? "rejected: score 0 (wrong finger count or no match)"
          : `rejected (score ${result.score.toFixed(2)})`;
      return { accepted: result.accepted, score: result.score, message };
    } catch (err) {
      const api = err as ApiError;
      return { accepted: null, score: null, message: api.message ?? String(err) };
    }
  }
}
