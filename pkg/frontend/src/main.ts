/** Page wiring: capture surface + enrollment/authentication controls. */

import { ServiceClient } from "./client.js";
import { AuthFlow, EnrollmentFlow } from "./flows.js";
import type { TraceJson } from "./trace.js";
import { CaptureSurface } from "./ui.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("capture");
const statusEl = $<HTMLDivElement>("status");
const gestureInput = $<HTMLInputElement>("gesture-id");
const serviceInput = $<HTMLInputElement>("service-url");

type Mode = "idle" | "enroll" | "auth";
let mode: Mode = "idle";
let enrollment: EnrollmentFlow | null = null;
let trialCounter = 1;

const surface = new CaptureSurface(canvas);

function setStatus(text: string, tone: "ok" | "bad" | "info" = "info"): void {
  statusEl.textContent = text;
  statusEl.dataset.tone = tone;
}

function client(): ServiceClient {
  return new ServiceClient(serviceInput.value.replace(/\/$/, ""));
}

function finishTrace(partial: Omit<TraceJson, "gesture_id" | "subject_id" | "session" | "trial">): TraceJson {
  return {
    gesture_id: gestureInput.value || "demo",
    subject_id: "browser",
    session: 1,
    trial: Math.min(trialCounter, 10),
    ...partial,
  };
}

surface.onDiscard = (reason) => setStatus(reason, "bad");

surface.onGesture = async (partial) => {
  const trace = finishTrace(partial);
  if (mode === "enroll" && enrollment) {
    const status = await enrollment.submit(trace);
    trialCounter = status.collected + 1;
    if (status.phase === "done") {
      mode = "idle";
      setStatus(status.message, "ok");
    } else {
      setStatus([status.message, ...status.warnings.slice(-1)].join(" | "), "info");
    }
  } else if (mode === "auth") {
    const outcome = await new AuthFlow(client(), gestureInput.value).attempt(trace);
    setStatus(outcome.message, outcome.accepted ? "ok" : "bad");
  } else {
    setStatus(`captured ${trace.fingers.length}-finger trace (pick enroll or authenticate)`, "info");
  }
};

$<HTMLButtonElement>("btn-enroll").addEventListener("click", async () => {
  try {
    enrollment = new EnrollmentFlow(client(), gestureInput.value || "demo");
    const status = await enrollment.start(true);
    mode = "enroll";
    trialCounter = 1;
    setStatus(status.message, "info");
  } catch (err) {
    setStatus(String(err), "bad");
  }
});

$<HTMLButtonElement>("btn-abort").addEventListener("click", () => {
  enrollment?.abort();
  enrollment = null;
  mode = "idle";
  surface.clear();
  setStatus("enrollment aborted", "info");
});

$<HTMLButtonElement>("btn-auth").addEventListener("click", () => {
  mode = "auth";
  setStatus("draw the gesture to authenticate", "info");
});
