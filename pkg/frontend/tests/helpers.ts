/** Scripted pointer sequences and the shared wire-format schema. */

import { z } from "zod";

import { CaptureBuffer } from "../src/captureBuffer.js";
import type { TraceJson } from "../src/trace.js";

export const traceSchema = z.object({
  gesture_id: z.string().min(1),
  subject_id: z.string().min(1),
  session: z.union([z.literal(1), z.literal(2)]),
  trial: z.number().int().min(1).max(17),
  screen: z.object({ w: z.number().int().positive(), h: z.number().int().positive() }),
  rate_hz: z.number().positive(),
  fingers: z
    .array(
      z
        .array(z.object({ t: z.number().min(0), x: z.number(), y: z.number() }))
        .min(3),
    )
    .min(1),
  source: z.enum(["touch", "mouse", "pen"]).optional(),
});

export function assertSchemaValid(trace: TraceJson): void {
  traceSchema.parse(trace);
  for (const finger of trace.fingers) {
    for (const s of finger) {
      if (s.x < 0 || s.x > trace.screen.w || s.y < 0 || s.y > trace.screen.h) {
        throw new Error(`sample out of bounds: ${JSON.stringify(s)}`);
      }
    }
    for (let i = 1; i < finger.length; i++) {
      if (finger[i]!.t <= finger[i - 1]!.t) {
        throw new Error("timestamps not strictly increasing");
      }
    }
  }
}

/** Tiny deterministic PRNG so jittered gestures are reproducible. */
export function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

export interface Stroke {
  pointerId: number;
  points: Array<[number, number]>;
}

/**
 * Replay strokes through a buffer on a shared ~60 Hz clock.  All pointers go
 * down together at the start and lift at the end unless liftEarlyAt is given
 * for a pointer (index into its point list).
 */
export function playStrokes(
  buffer: CaptureBuffer,
  strokes: Stroke[],
  opts: { start?: number; stepMs?: number; liftEarlyAt?: Map<number, number>; pointerType?: string } = {},
): void {
  const start = opts.start ?? 1000;
  const step = opts.stepMs ?? 16;
  const type = opts.pointerType ?? "touch";
  const lifted = new Set<number>();
  for (const s of strokes) {
    const [x, y] = s.points[0]!;
    buffer.pointerDown({ pointerId: s.pointerId, x, y, timeStamp: start, pointerType: type });
  }
  const longest = Math.max(...strokes.map((s) => s.points.length));
  for (let i = 1; i < longest; i++) {
    const now = start + i * step;
    for (const s of strokes) {
      const liftAt = opts.liftEarlyAt?.get(s.pointerId);
      if (liftAt !== undefined && i === liftAt && !lifted.has(s.pointerId)) {
        const [lx, ly] = s.points[Math.min(i, s.points.length - 1)]!;
        buffer.pointerUp({ pointerId: s.pointerId, x: lx, y: ly, timeStamp: now, pointerType: type });
        lifted.add(s.pointerId);
        continue;
      }
      if (lifted.has(s.pointerId) || i >= s.points.length) {
        continue;
      }
      const [x, y] = s.points[i]!;
      buffer.pointerMove({ pointerId: s.pointerId, x, y, timeStamp: now, pointerType: type });
    }
  }
  const end = start + longest * step;
  for (const s of strokes) {
    if (!lifted.has(s.pointerId)) {
      const [x, y] = s.points[s.points.length - 1]!;
      buffer.pointerUp({ pointerId: s.pointerId, x, y, timeStamp: end, pointerType: type });
    }
  }
}

/** Sharp-cornered zigzag across the canvas, with optional positional jitter. */
export function zigzagPoints(n = 100, jitter = 0, seed = 1): Array<[number, number]> {
  const rand = lcg(seed);
  const out: Array<[number, number]> = [];
  const turns = 6;
  for (let i = 0; i < n; i++) {
    const s = i / (n - 1);
    const x = 60 + 680 * s;
    const phase = s * turns;
    const tri = 2 * Math.abs(phase - Math.floor(phase) - 0.5);
    const y = 90 + 320 * tri;
    const jx = jitter > 0 ? (rand() - 0.5) * 2 * jitter : 0;
    const jy = jitter > 0 ? (rand() - 0.5) * 2 * jitter : 0;
    out.push([x + jx, y + jy]);
  }
  return out;
}

export function circlePoints(n = 100, jitter = 0, seed = 2): Array<[number, number]> {
  const rand = lcg(seed);
  const out: Array<[number, number]> = [];
  for (let i = 0; i < n; i++) {
    const a = (i / (n - 1)) * 2 * Math.PI - Math.PI / 2;
    const jx = jitter > 0 ? (rand() - 0.5) * 2 * jitter : 0;
    const jy = jitter > 0 ? (rand() - 0.5) * 2 * jitter : 0;
    out.push([400 + 180 * Math.cos(a) + jx, 250 + 180 * Math.sin(a) + jy]);
  }
  return out;
}

export function captureTrace(
  strokes: Stroke[],
  meta: { gestureId: string; subjectId?: string; trial?: number; session?: number },
  opts: Parameters<typeof playStrokes>[2] = {},
): TraceJson {
  const buffer = new CaptureBuffer(800, 500);
  playStrokes(buffer, strokes, opts);
  if (buffer.state !== "complete") {
    throw new Error(`capture failed: ${buffer.state} (${buffer.reason})`);
  }
  return buffer.trace({
    gestureId: meta.gestureId,
    subjectId: meta.subjectId ?? "test",
    trial: meta.trial,
    session: meta.session,
  });
}
