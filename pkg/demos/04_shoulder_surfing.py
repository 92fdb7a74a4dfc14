"""Replication-attack trial: a target's recalls vs observers imitating them.

Attackers reproduce the target's gesture from observation: right shape, but
much sloppier execution (3x the positional noise, 5x the path wobble).  One
attacker also gets the finger count wrong and is gated to zero.
"""

import gesturekit as gk

TARGET = dict(kind="signature", scale_px=1000.0, duration_s=2.5, path_seed=7)


def reps(sigma, wobble, seed, n, finger_count=1):
    fam = gk.GestureFamily(finger_count=finger_count, **TARGET)
    noise = gk.NoiseModel(sigma, 0.12, wobble, seed=seed)
    return [gk.resample(t) for t in gk.generate(fam, noise, n_reps=n, gesture_id="target")]


enroll = reps(4.0, 12.0, seed=7, n=10)
templates = gk.build_template_set(enroll)
recalls = reps(4.0, 12.0, seed=8, n=5)

attackers = {f"attacker{k}": reps(12.0, 60.0, seed=20 + k, n=5) for k in range(5)}
attackers["attacker5"] = reps(12.0, 60.0, seed=26, n=5, finger_count=2)  # wrong fingers

rows = gk.attack_report(templates, recalls, attackers)
print(f"{'participant':<12} {'best score':>10} {'attempts':>9}")
for row in rows:
    print(f"{row.participant:<12} {row.best_score:>10.2f} {row.n_attempts:>9}")

target_min = min(gk.match(t, templates).score for t in recalls)
attacker_best = max(r.best_score for r in rows[1:])
print(f"\nworst target recall: {target_min:.2f}, best attacker: {attacker_best:.2f}")
print(f"any threshold in ({attacker_best:.2f}, {target_min:.2f}] authenticates the target"
      " and rejects every attacker")
