import { describe, expect, it } from "vitest";

import { CaptureBuffer } from "../src/captureBuffer.js";
import { assertSchemaValid, captureTrace, playStrokes, zigzagPoints, circlePoints } from "./helpers.js";

describe("CaptureBuffer", () => {
  it("emits a schema-valid single-finger trace", () => {
    const trace = captureTrace([{ pointerId: 1, points: zigzagPoints() }], { gestureId: "g1" });
    assertSchemaValid(trace);
    expect(trace.fingers).toHaveLength(1);
    expect(trace.fingers[0]!.length).toBeGreaterThan(50);
    expect(trace.fingers[0]![0]!.t).toBe(0);
    expect(trace.source).toBe("touch");
    expect(trace.rate_hz).toBeGreaterThan(30);
    expect(trace.rate_hz).toBeLessThan(130);
  });

  it("emits a schema-valid two-finger trace", () => {
    const trace = captureTrace(
      [
        { pointerId: 1, points: zigzagPoints() },
        { pointerId: 2, points: zigzagPoints().map(([x, y]) => [x, y + 60] as [number, number]) },
      ],
      { gestureId: "g2" },
    );
    assertSchemaValid(trace);
    expect(trace.fingers).toHaveLength(2);
  });

  it("finalizes at the first lift and ignores later movement", () => {
    const buffer = new CaptureBuffer(800, 500);
    const strokes = [
      { pointerId: 1, points: zigzagPoints(100) },
      { pointerId: 2, points: zigzagPoints(100).map(([x, y]) => [x, y + 80] as [number, number]) },
    ];
    playStrokes(buffer, strokes, { liftEarlyAt: new Map([[2, 40]]) });
    expect(buffer.state).toBe("complete");
    const trace = buffer.trace({ gestureId: "g", subjectId: "s" });
    // finger 1 kept drawing after finger 2 lifted, but that movement is gone
    const last1 = trace.fingers[0]![trace.fingers[0]!.length - 1]!;
    const last2 = trace.fingers[1]![trace.fingers[1]!.length - 1]!;
    expect(Math.abs(last1.t - last2.t)).toBeLessThanOrEqual(16 * 2);
  });

  it("keeps waiting until every pointer lifts", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: 10, y: 10, timeStamp: 0 });
    buffer.pointerDown({ pointerId: 2, x: 200, y: 10, timeStamp: 0 });
    for (let i = 1; i <= 20; i++) {
      buffer.pointerMove({ pointerId: 1, x: 10 + 10 * i, y: 10 + 5 * i, timeStamp: i * 16 });
      buffer.pointerMove({ pointerId: 2, x: 200 + 10 * i, y: 10 + 8 * i, timeStamp: i * 16 });
    }
    buffer.pointerUp({ pointerId: 1, x: 210, y: 110, timeStamp: 330 });
    expect(buffer.state).toBe("ending");
    expect(buffer.shouldRenderTrace).toBe(false);
    buffer.pointerUp({ pointerId: 2, x: 400, y: 170, timeStamp: 340 });
    expect(buffer.state).toBe("complete");
    expect(buffer.shouldRenderTrace).toBe(true);
  });

  it("fixes the pointer count once the first lift begins", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: 10, y: 10, timeStamp: 0 });
    for (let i = 1; i <= 30; i++) {
      buffer.pointerMove({ pointerId: 1, x: 10 + 8 * i, y: 10 + 6 * i, timeStamp: i * 16 });
    }
    buffer.pointerUp({ pointerId: 1, x: 250, y: 190, timeStamp: 500 });
    // gesture is complete; a stray pointerdown shortly after must not resurrect it
    expect(buffer.state).toBe("complete");
    const before = buffer.fingerCount;
    expect(before).toBe(1);
  });

  it("ignores joins after the first lift in a multi-finger gesture", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: 10, y: 10, timeStamp: 0 });
    buffer.pointerDown({ pointerId: 2, x: 300, y: 10, timeStamp: 0 });
    for (let i = 1; i <= 30; i++) {
      buffer.pointerMove({ pointerId: 1, x: 10 + 8 * i, y: 10 + 6 * i, timeStamp: i * 16 });
      buffer.pointerMove({ pointerId: 2, x: 300 + 8 * i, y: 10 + 4 * i, timeStamp: i * 16 });
    }
    buffer.pointerUp({ pointerId: 1, x: 250, y: 190, timeStamp: 500 });
    buffer.pointerDown({ pointerId: 3, x: 50, y: 400, timeStamp: 510 }); // too late
    expect(buffer.fingerCount).toBe(2);
    buffer.pointerUp({ pointerId: 2, x: 540, y: 130, timeStamp: 520 });
    expect(buffer.state).toBe("complete");
    expect(buffer.trace({ gestureId: "g", subjectId: "s" }).fingers).toHaveLength(2);
  });

  it("discards a tap with no movement", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: 100, y: 100, timeStamp: 0 });
    buffer.pointerMove({ pointerId: 1, x: 100.5, y: 100.2, timeStamp: 16 });
    buffer.pointerMove({ pointerId: 1, x: 100.2, y: 100.4, timeStamp: 32 });
    buffer.pointerUp({ pointerId: 1, x: 100.2, y: 100.4, timeStamp: 48 });
    expect(buffer.state).toBe("discarded");
    expect(buffer.reason).toMatch(/discarded/);
    expect(() => buffer.trace({ gestureId: "g", subjectId: "s" })).toThrow();
  });

  it("discards a gesture with too few samples", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: 100, y: 100, timeStamp: 0 });
    buffer.pointerUp({ pointerId: 1, x: 100, y: 100, timeStamp: 10 });
    expect(buffer.state).toBe("discarded");
  });

  it("clamps samples to the canvas and keeps timestamps strictly increasing", () => {
    const buffer = new CaptureBuffer(800, 500);
    buffer.pointerDown({ pointerId: 1, x: -20, y: 50, timeStamp: 0 });
    buffer.pointerMove({ pointerId: 1, x: 100, y: -30, timeStamp: 16 });
    buffer.pointerMove({ pointerId: 1, x: 100, y: 40, timeStamp: 16 }); // duplicate clock tick
    buffer.pointerMove({ pointerId: 1, x: 900, y: 600, timeStamp: 32 });
    buffer.pointerMove({ pointerId: 1, x: 400, y: 300, timeStamp: 48 });
    buffer.pointerUp({ pointerId: 1, x: 400, y: 300, timeStamp: 64 });
    const trace = buffer.trace({ gestureId: "g", subjectId: "s" });
    assertSchemaValid(trace);
    expect(trace.fingers[0]![0]).toEqual({ t: 0, x: 0, y: 50 });
    expect(trace.fingers[0]!.some((p) => p.x === 800 && p.y === 500)).toBe(true);
  });

  it("flags mouse input in the metadata", () => {
    const trace = captureTrace([{ pointerId: 1, points: circlePoints() }], { gestureId: "g" }, {
      pointerType: "mouse",
    });
    expect(trace.source).toBe("mouse");
  });

  it("resets cleanly for the next gesture", () => {
    const buffer = new CaptureBuffer(800, 500);
    playStrokes(buffer, [{ pointerId: 1, points: zigzagPoints(60) }]);
    expect(buffer.state).toBe("complete");
    playStrokes(buffer, [{ pointerId: 7, points: circlePoints(60) }], { start: 9000 });
    expect(buffer.state).toBe("complete");
    const trace = buffer.trace({ gestureId: "g", subjectId: "s" });
    expect(trace.fingers).toHaveLength(1);
    expect(trace.fingers[0]![0]!.t).toBe(0);
  });
});
