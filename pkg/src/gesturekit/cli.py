"""Batch front-end: corpus analysis, ROC studies, synthetic corpora, and the service."""

from __future__ import annotations

import csv
import io
import json
import os
import urllib.parse
from collections import defaultdict
from pathlib import Path

import click
import numpy as np

from . import evaluation, synth
from .config import AppConfig, load_config
from .infocap import INCOMPARABLE, MiConfig, mutual_information
from .traces import InvalidTrace, load_corpus, resample, serialize_trace


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True) + "\n").encode()


def _csv_bytes(header: list[str], rows: list[list]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode()


def _safe(name: str) -> str:
    return urllib.parse.quote(name, safe="")


def _load_resampled(corpus_path: str) -> tuple[dict[str, list], list[str]]:
    traces, errors = load_corpus(corpus_path)
    by_gesture: dict[str, list] = defaultdict(list)
    for tr in traces:
        try:
            by_gesture[tr.gesture_id].append(resample(tr))
        except InvalidTrace as e:
            errors.append(f"{tr.gesture_id} trial {tr.trial_index}: {e}")
    return dict(by_gesture), errors


def _mi_config(config: AppConfig) -> MiConfig:
    return MiConfig(mse_cutoff_fraction=config.mse_cutoff_fraction)


_config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
    help="TOML config file (shared with the service).",
)


def _app_config(config_path) -> AppConfig:
    if not config_path:
        return AppConfig()
    try:
        return load_config(config_path)
    except (ValueError, OSError) as e:
        raise click.ClickException(f"bad config {config_path}: {e}")


@click.group()
def main():
    """Free-form multitouch gesture security metrics and authentication."""


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("-o", "--out", type=click.Path(file_okay=False), default="gesturekit-reports",
              show_default=True, help="Report directory.")
@_config_option
@click.option("--json", "as_json", is_flag=True, help="Print the summary as JSON.")
def analyze(corpus, out, config_path, as_json):
    """Per-gesture information reports plus aggregate CSV series."""
    config = _app_config(config_path)
    mi_config = _mi_config(config)
    by_gesture, errors = _load_resampled(corpus)
    for err in errors:
        click.echo(f"warning: {err}", err=True)
    if not by_gesture:
        raise click.ClickException("no valid traces in corpus")

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for gid in sorted(by_gesture):
        try:
            report = evaluation.analyze_gesture(by_gesture[gid], mi_config)
        except ValueError as e:
            click.echo(f"warning: skipping {gid}: {e}", err=True)
            continue
        reports.append(report)
        _atomic_write(out_dir / f"report_{_safe(gid)}.json", _json_bytes(report.to_dict()))
    if not reports:
        raise click.ClickException("no gesture could be analyzed")

    summary_header = [
        "gesture_id", "finger_count", "mean_mi_generate", "mean_mi_generate_stable",
        "mean_mi_recall1", "mean_mi_recall2", "cross_mi", "memorability_ratio",
        "mean_duration_generate_s", "mean_duration_recall1_s", "mean_duration_recall2_s",
    ]
    summary_rows = [
        [
            r.gesture_id, r.finger_count, r.mean_mi_generate, r.mean_mi_generate_stable,
            r.mean_mi_recall1, r.mean_mi_recall2, r.cross_mi, r.memorability_ratio,
            r.mean_duration_s.get("Generate"), r.mean_duration_s.get("Recall1"),
            r.mean_duration_s.get("Recall2"),
        ]
        for r in reports
    ]
    _atomic_write(out_dir / "summary.csv", _csv_bytes(summary_header, summary_rows))

    mi_rows = [
        [r.gesture_id, trial, bits]
        for r in reports
        for trial, bits in sorted(r.mi_by_trial.items())
    ]
    _atomic_write(out_dir / "mi_by_repetition.csv", _csv_bytes(["gesture_id", "trial", "mean_bits"], mi_rows))

    dur_rows = [
        [r.gesture_id, trial, dur]
        for r in reports
        for trial, dur in sorted(r.duration_by_trial.items())
    ]
    _atomic_write(out_dir / "duration_by_repetition.csv", _csv_bytes(["gesture_id", "trial", "duration_s"], dur_rows))

    means = [r.mean_mi_generate for r in reports if r.mean_mi_generate is not None]
    counts, edges = np.histogram(means, bins=10)
    hist_rows = [[float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(len(counts))]
    _atomic_write(out_dir / "mi_histogram.csv", _csv_bytes(["bin_left", "bin_right", "count"], hist_rows))

    if as_json:
        click.echo(json.dumps([r.to_dict() for r in reports], sort_keys=True))
    else:
        click.echo(f"{'gesture':<28} {'fingers':>7} {'generate':>9} {'recall2':>9} {'ratio':>7}")
        for r in reports:
            fmt = lambda v, n=2: "-" if v is None else f"{v:.{n}f}"
            click.echo(
                f"{r.gesture_id:<28} {r.finger_count:>7} {fmt(r.mean_mi_generate):>9}"
                f" {fmt(r.mean_mi_recall2):>9} {fmt(r.memorability_ratio):>7}"
            )
        click.echo(f"reports written to {out_dir}")


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--templates", default="2,4,6,8,10", show_default=True,
              help="Comma-separated template counts.")
@click.option("--group", type=click.Choice(["recall1", "recall2"]), default="recall2",
              show_default=True, help="Recall group providing the genuine trials.")
@click.option("-o", "--out", type=click.Path(file_okay=False), default="gesturekit-roc",
              show_default=True, help="Report directory.")
@_config_option
@click.option("--json", "as_json", is_flag=True, help="Print EER results as JSON.")
def roc(corpus, templates, group, out, config_path, as_json):
    """ROC/EER study over enrolled template counts."""
    config = _app_config(config_path)
    try:
        counts = [int(c) for c in templates.split(",") if c.strip()]
    except ValueError:
        raise click.ClickException(f"bad --templates value: {templates!r}")
    if not counts:
        raise click.ClickException("--templates must name at least one count")
    by_gesture, errors = _load_resampled(corpus)
    for err in errors:
        click.echo(f"warning: {err}", err=True)
    if not by_gesture:
        raise click.ClickException("no valid traces in corpus")

    label = {"recall1": "Recall1", "recall2": "Recall2"}[group]
    try:
        results = evaluation.template_count_study(
            by_gesture, counts=counts, group=label, rotation_invariant=config.rotation_invariant
        )
    except ValueError as e:
        raise click.ClickException(str(e))

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in results:
        report = entry["report"]
        stem = f"roc_{group}_t{entry['n_templates']:02d}"
        _atomic_write(out_dir / f"{stem}.json", _json_bytes(report.to_dict()))
        _atomic_write(
            out_dir / f"{stem}_points.csv",
            _csv_bytes(["threshold", "tpr", "fpr"], [[p.threshold, p.tpr, p.fpr] for p in report.points]),
        )
    _atomic_write(
        out_dir / f"eer_{group}_summary.csv",
        _csv_bytes(["n_templates", "eer"], [[e["n_templates"], e["eer"]] for e in results]),
    )

    if as_json:
        click.echo(json.dumps(
            [{"n_templates": e["n_templates"], "eer": e["eer"]} for e in results], sort_keys=True
        ))
    else:
        for e in results:
            click.echo(f"templates={e['n_templates']:>2}  EER={e['eer']:.4f}")
        click.echo(f"reports written to {out_dir}")


@main.command("synth")
@click.option("--family", type=click.Choice(list(synth.KINDS)), required=True)
@click.option("--turns", default=8, show_default=True, help="Direction reversals (zigzag).")
@click.option("--fingers", default=1, show_default=True)
@click.option("--finger-mode", type=click.Choice(list(synth.FINGER_MODES)), default="rigid", show_default=True)
@click.option("--reps", default=17, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--sigma", default=3.0, show_default=True, help="Motor noise (px).")
@click.option("--tempo-jitter", default=0.1, show_default=True)
@click.option("--wobble", default=0.0, show_default=True, help="Smooth path wobble (px).")
@click.option("--duration", default=3.0, show_default=True, help="Gesture duration (s).")
@click.option("--scale", default=600.0, show_default=True, help="Path extent (px).")
@click.option("--gesture-id", default=None)
@click.option("--subject", default="synth", show_default=True)
@click.option("-o", "--out", type=click.Path(file_okay=False), required=True, help="Output directory.")
def synth_cmd(family, turns, fingers, finger_mode, reps, seed, sigma, tempo_jitter,
              wobble, duration, scale, gesture_id, subject, out):
    """Generate a deterministic synthetic gesture corpus."""
    try:
        fam = synth.GestureFamily(
            kind=family, finger_count=fingers, finger_mode=finger_mode,
            n_turns=turns, scale_px=scale, duration_s=duration,
        )
        noise = synth.NoiseModel(
            positional_sigma_px=sigma, tempo_jitter_fraction=tempo_jitter,
            path_wobble_px=wobble, seed=seed,
        )
        traces = synth.generate(fam, noise, n_reps=reps, gesture_id=gesture_id, subject_id=subject)
    except ValueError as e:
        raise click.ClickException(str(e))
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for tr in traces:
        _atomic_write(out_dir / f"{_safe(tr.gesture_id)}_t{tr.trial_index:02d}.json", serialize_trace(tr))
    click.echo(f"wrote {len(traces)} traces for {traces[0].gesture_id} to {out_dir}")


@main.command()
@click.argument("trace_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("trace_b", type=click.Path(exists=True, dir_okay=False))
@_config_option
@click.option("--json", "as_json", is_flag=True, help="Print the full result as JSON.")
def mi(trace_a, trace_b, config_path, as_json):
    """Estimated mutual information between two trace files, in bits."""
    config = _app_config(config_path)

    def _one(path):
        traces, errors = load_corpus(Path(path))
        if errors:
            raise click.ClickException("; ".join(errors))
        if len(traces) != 1:
            raise click.ClickException(f"{path}: expected exactly one trace, found {len(traces)}")
        return resample(traces[0])

    try:
        a, b = _one(trace_a), _one(trace_b)
        result = mutual_information((a, b), _mi_config(config))
    except (InvalidTrace, ValueError) as e:
        raise click.ClickException(str(e))
    if result is INCOMPARABLE:
        raise click.ClickException("incomparable: traces have different finger counts")
    if as_json:
        click.echo(json.dumps(result.to_dict(), sort_keys=True))
    else:
        click.echo(f"total_bits={result.total_bits:.3f} retained_k={result.retained_k}")
        for c in result.components:
            click.echo(f"  component {c.component_index}: n={c.n_effective} r={c.pearson_r:+.4f} bits={c.bits:.3f}")


@main.command()
@_config_option
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_path, host):
    """Run the enrollment/authentication HTTP service."""
    import uvicorn

    from .service import create_app

    config = _app_config(config_path)
    uvicorn.run(create_app(config), host=host, port=config.port)


if __name__ == "__main__":
    main()
