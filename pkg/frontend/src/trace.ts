/** The trace wire format shared with the analysis service. */

export interface TraceSample {
  t: number;
  x: number;
  y: number;
}

export interface TraceJson {
  gesture_id: string;
  subject_id: string;
  session: number;
  trial: number;
  screen: { w: number; h: number };
  rate_hz: number;
  fingers: TraceSample[][];
  /** Capture metadata, ignored by the analysis side. */
  source?: "touch" | "mouse" | "pen";
}

export interface TraceMeta {
  gestureId: string;
  subjectId: string;
  session?: number;
  trial?: number;
}
