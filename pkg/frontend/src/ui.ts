/**
 * Canvas binding: a blank surface while drawing, the trace painted only after
 * the gesture completes (CaptureBuffer.shouldRenderTrace gates every paint).
 */

import { CaptureBuffer, type PointerSample } from "./captureBuffer.js";
import type { TraceJson } from "./trace.js";

const FINGER_COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c"];

export class CaptureSurface {
  readonly buffer: CaptureBuffer;
  onGesture: ((trace: Omit<TraceJson, "gesture_id" | "subject_id" | "session" | "trial">) => void) | null =
    null;
  onDiscard: ((reason: string) => void) | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {
    this.buffer = new CaptureBuffer(canvas.width, canvas.height);
    canvas.style.touchAction = "none";
    canvas.addEventListener("pointerdown", this.handleDown);
    canvas.addEventListener("pointermove", this.handleMove);
    canvas.addEventListener("pointerup", this.handleUp);
    canvas.addEventListener("pointercancel", this.handleCancel);
  }

  private toSample(ev: PointerEvent): PointerSample {
    const rect = this.canvas.getBoundingClientRect();
    return {
      pointerId: ev.pointerId,
      x: ((ev.clientX - rect.left) / rect.width) * this.canvas.width,
      y: ((ev.clientY - rect.top) / rect.height) * this.canvas.height,
      timeStamp: ev.timeStamp,
      pointerType: ev.pointerType,
    };
  }

  private handleDown = (ev: PointerEvent) => {
    ev.preventDefault();
    this.canvas.setPointerCapture(ev.pointerId);
    if (this.buffer.state === "idle" || this.buffer.state === "complete" || this.buffer.state === "discarded") {
      this.clear();
    }
    this.buffer.pointerDown(this.toSample(ev));
  };

  private handleMove = (ev: PointerEvent) => {
    this.buffer.pointerMove(this.toSample(ev));
  };

  private handleUp = (ev: PointerEvent) => {
    this.buffer.pointerUp(this.toSample(ev));
    this.afterPointerEnd();
  };

  private handleCancel = (ev: PointerEvent) => {
    this.buffer.pointerCancel(this.toSample(ev));
    this.afterPointerEnd();
  };

  private afterPointerEnd(): void {
    if (this.buffer.state === "complete") {
      const trace = this.buffer.trace({ gestureId: "pending", subjectId: "pending" });
      this.render(trace.fingers);
      this.onGesture?.({
        screen: trace.screen,
        rate_hz: trace.rate_hz,
        fingers: trace.fingers,
        source: trace.source,
      });
    } else if (this.buffer.state === "discarded") {
      this.clear();
      this.onDiscard?.(this.buffer.reason);
    }
  }

  clear(): void {
    const ctx = this.canvas.getContext("2d");
    ctx?.clearRect(0, 0, this.canvas.width, this.canvas.height);
  }

  private render(fingers: TraceJson["fingers"]): void {
    if (!this.buffer.shouldRenderTrace) {
      return;
    }
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    this.clear();
    ctx.lineWidth = 3;
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    fingers.forEach((stream, i) => {
      ctx.strokeStyle = FINGER_COLORS[i % FINGER_COLORS.length]!;
      ctx.beginPath();
      stream.forEach((p, j) => (j === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
      ctx.stroke();
    });
  }
}
