"""Authenticating gestures: template matching and the threshold sweep.

Each enrolled repetition becomes a per-finger template of 16 arc-length
points; candidates score as the best per-template mean of inverse angular
distances.  The ROC study sweeps the accept threshold over observed scores
and reads off the equal error rate per template count.
"""

import dataclasses

import numpy as np

import gesturekit as gk
from gesturekit import evaluation

print("== enroll and match ==")
fam = gk.GestureFamily(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=42)
enroll = [gk.resample(t) for t in
          gk.generate(fam, gk.NoiseModel(5.0, 0.12, 15.0, seed=1), n_reps=10)]
tset = gk.build_template_set(enroll, gesture_id="demo")
genuine = gk.resample(gk.generate(fam, gk.NoiseModel(5.0, 0.12, 15.0, seed=2), n_reps=1)[0])
other = gk.resample(gk.generate(
    gk.GestureFamily(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=7),
    gk.NoiseModel(5.0, 0.12, 15.0, seed=3), n_reps=1)[0])

m = gk.match(genuine, tset)
print(f"genuine attempt: score {m.score:.2f} (best template {m.best_template_index})")
print(f"different shape: score {gk.match(other, tset).score:.2f}")
wrong_fc = gk.resample(gk.generate(
    gk.GestureFamily(kind="signature", finger_count=2, scale_px=1000.0, path_seed=42),
    gk.NoiseModel(5.0, seed=4), n_reps=1)[0])
print(f"wrong finger count: score {gk.match(wrong_fc, tset).score:.2f} (gate)")

print("\n== invariances ==")
moved = genuine.with_fingers([f * 2.0 + np.array([300.0, -150.0]) for f in genuine.fingers])
print(f"translated + scaled candidate: score {gk.match(moved, tset).score:.2f} (unchanged)")
theta = 0.9
rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
center = genuine.fingers[0].mean(axis=0)
spun = genuine.with_fingers([(f - center) @ rot.T + center for f in genuine.fingers])
print(f"rotated candidate, invariance on : {gk.match(spun, tset, rotation_invariant=True).score:.2f}")
print(f"rotated candidate, invariance off: {gk.match(spun, tset, rotation_invariant=False).score:.2f}")

print("\n== ROC / EER vs template count ==")


def corpus():
    by_gesture = {}
    for g in range(8):
        f = gk.GestureFamily(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=100 + g)
        gid = f"sig{g:02d}"
        en = gk.generate(f, gk.NoiseModel(10.0, 0.12, 40.0, seed=100 + g), n_reps=10, gesture_id=gid)
        re = gk.generate(f, gk.NoiseModel(12.5, 0.15, 52.0, seed=5100 + g), n_reps=5, gesture_id=gid)
        rs = [gk.resample(t) for t in en]
        rs += [dataclasses.replace(gk.resample(t), trial_index=13 + i, session=2)
               for i, t in enumerate(re)]
        by_gesture[gid] = rs
    return by_gesture


for entry in evaluation.template_count_study(corpus(), counts=(2, 4, 6, 8, 10)):
    r = entry["report"]
    print(f"  templates={entry['n_templates']:>2}: EER {entry['eer']:.3f}"
          f" (threshold {r.eer_threshold:.2f}, {r.n_genuine} genuine / {r.n_impostor} impostor)")
