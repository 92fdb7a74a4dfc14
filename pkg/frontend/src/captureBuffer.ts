/**
 * Turns a stream of pointer events into one gesture trace.
 *
 * The continuous-gesture rule: fingers may join while everything is still
 * down, but the moment the first finger lifts, the gesture content is frozen
 * (later movement is ignored and no finger may join).  The gesture finalizes
 * only once every pointer has lifted, so the trace is never rendered or
 * emitted mid-draw.
 */

import type { TraceJson, TraceMeta, TraceSample } from "./trace.js";

export interface PointerSample {
  pointerId: number;
  x: number;
  y: number;
  /** Milliseconds, any monotone clock (PointerEvent.timeStamp). */
  timeStamp: number;
  pointerType?: string;
}

export type CaptureState = "idle" | "drawing" | "ending" | "complete" | "discarded";

const MIN_SAMPLES_PER_FINGER = 3;
const MIN_PATH_LENGTH_PX = 4;

export class CaptureBuffer {
  readonly width: number;
  readonly height: number;

  private startTime = 0;
  private streams = new Map<number, TraceSample[]>();
  private order: number[] = [];
  private active = new Set<number>();
  private frozen = false;
  private source: TraceJson["source"] = "touch";
  private stateValue: CaptureState = "idle";
  private discardedReason = "";

  constructor(width: number, height: number) {
    this.width = Math.max(1, Math.round(width));
    this.height = Math.max(1, Math.round(height));
  }

  get state(): CaptureState {
    return this.stateValue;
  }

  get reason(): string {
    return this.discardedReason;
  }

  get fingerCount(): number {
    return this.order.length;
  }

  /** Trace content may be shown only after the gesture fully completed. */
  get shouldRenderTrace(): boolean {
    return this.stateValue === "complete";
  }

  reset(): void {
    this.streams.clear();
    this.order = [];
    this.active.clear();
    this.frozen = false;
    this.stateValue = "idle";
    this.discardedReason = "";
  }

  pointerDown(ev: PointerSample): void {
    if (this.stateValue === "complete" || this.stateValue === "discarded") {
      this.reset();
    }
    if (this.frozen) {
      return; // finger count is fixed once the first lift began
    }
    if (this.stateValue === "idle") {
      this.startTime = ev.timeStamp;
      this.source = ev.pointerType === "mouse" ? "mouse" : ev.pointerType === "pen" ? "pen" : "touch";
      this.stateValue = "drawing";
    }
    if (this.streams.has(ev.pointerId)) {
      return;
    }
    this.streams.set(ev.pointerId, [this.sample(ev)]);
    this.order.push(ev.pointerId);
    this.active.add(ev.pointerId);
  }

  pointerMove(ev: PointerSample): void {
    if (this.stateValue !== "drawing" || this.frozen) {
      return;
    }
    const stream = this.streams.get(ev.pointerId);
    if (!stream) {
      return;
    }
    const next = this.sample(ev);
    const last = stream[stream.length - 1];
    if (last && next.t <= last.t) {
      return; // coalesced duplicate timestamp
    }
    stream.push(next);
  }

  pointerUp(ev: PointerSample): void {
    if (this.stateValue !== "drawing" && this.stateValue !== "ending") {
      return;
    }
    if (!this.active.delete(ev.pointerId)) {
      return;
    }
    if (!this.frozen) {
      this.frozen = true; // first lift: freeze content, wait for the rest
      this.stateValue = "ending";
    }
    if (this.active.size === 0) {
      this.finalize();
    }
  }

  /** Treat a cancelled pointer like a lift, so the gesture still terminates. */
  pointerCancel(ev: PointerSample): void {
    this.pointerUp(ev);
  }

  /** The finished trace; only valid in the "complete" state. */
  trace(meta: TraceMeta): TraceJson {
    if (this.stateValue !== "complete") {
      throw new Error(`no trace available in state ${this.stateValue}`);
    }
    return {
      gesture_id: meta.gestureId,
      subject_id: meta.subjectId,
      session: meta.session ?? 1,
      trial: meta.trial ?? 1,
      screen: { w: this.width, h: this.height },
      rate_hz: this.observedRate(),
      fingers: this.order.map((id) => this.streams.get(id)!),
      source: this.source,
    };
  }

  private sample(ev: PointerSample): TraceSample {
    return {
      t: Math.max(0, ev.timeStamp - this.startTime),
      x: Math.min(this.width, Math.max(0, ev.x)),
      y: Math.min(this.height, Math.max(0, ev.y)),
    };
  }

  private finalize(): void {
    const fingers = this.order.map((id) => this.streams.get(id)!);
    for (const stream of fingers) {
      if (stream.length < MIN_SAMPLES_PER_FINGER) {
        this.discard("zero-length gesture discarded: a finger barely moved");
        return;
      }
      let length = 0;
      for (let i = 1; i < stream.length; i++) {
        length += Math.hypot(stream[i]!.x - stream[i - 1]!.x, stream[i]!.y - stream[i - 1]!.y);
      }
      if (length < MIN_PATH_LENGTH_PX) {
        this.discard("zero-length gesture discarded: tap with no movement");
        return;
      }
    }
    this.stateValue = "complete";
  }

  private discard(reason: string): void {
    this.stateValue = "discarded";
    this.discardedReason = reason;
  }

  private observedRate(): number {
    let samples = 0;
    let duration = 0;
    for (const stream of this.streams.values()) {
      samples += stream.length;
      const last = stream[stream.length - 1];
      if (last) {
        duration = Math.max(duration, last.t);
      }
    }
    if (duration <= 0 || this.order.length === 0) {
      return 60;
    }
    return (samples / this.order.length / duration) * 1000;
  }
}
