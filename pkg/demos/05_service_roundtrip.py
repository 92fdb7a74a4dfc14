"""The HTTP surface end to end: enroll ten repetitions, then authenticate.

Uses the in-process test client; `gesturekit serve` exposes the same app over
a real socket for the browser capture UI.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

import gesturekit as gk
from gesturekit.config import AppConfig
from gesturekit.service import create_app
from gesturekit.traces import trace_to_dict

fam = gk.GestureFamily(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=3)


def docs(seed, n):
    noise = gk.NoiseModel(5.0, 0.12, 15.0, seed=seed)
    return [trace_to_dict(t) for t in gk.generate(fam, noise, n_reps=n, gesture_id="demo")]


with tempfile.TemporaryDirectory() as td:
    app = create_app(AppConfig(data_dir=Path(td)))
    with TestClient(app) as client:
        print("== enrollment ==")
        session = client.post("/enroll/start", json={"gesture_id": "demo"}).json()
        print(f"session: {session}")
        for i, doc in enumerate(docs(seed=1, n=10), 1):
            body = client.post(f"/enroll/{session['session_id']}/trace", json=doc).json()
            if body.get("complete"):
                print(f"rep {i}: complete, security {body['mean_bits']:.1f} bits"
                      f" ({body['security_band']})")
            else:
                print(f"rep {i}: accepted, {body['remaining']} to go")

        print("\n== authentication ==")
        genuine = docs(seed=2, n=1)[0]
        print("genuine attempt:", client.post(
            "/auth", json={"gesture_id": "demo", "trace": genuine}).json())

        other_fam = gk.GestureFamily(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=9)
        other = trace_to_dict(gk.generate(other_fam, gk.NoiseModel(5.0, 0.12, 15.0, seed=3),
                                          n_reps=1, gesture_id="demo")[0])
        print("different shape:", client.post(
            "/auth", json={"gesture_id": "demo", "trace": other}).json())

        print("\n== pairwise analysis ==")
        a, b = docs(seed=4, n=2)
        print("two repetitions:", client.post("/analyze/mi", json={"traces": [a, b]}).json()["total_bits"])
