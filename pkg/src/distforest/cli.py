"""Command-line driver: train, evaluate, predict, neighbors, synth, serve.

Exit codes: 0 success, 2 usage errors (click), 1 runtime failures.
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .cohort import COHORT_MARGINALS, load_cohort, synth_cohort, write_cohort
from .data import FeatureVector
from .distribution import DEFAULT_HISTOGRAM_BINS
from .evaluation import CvConfig, OobUnavailableError, kfold_cv, oob_evaluate
from .forest import ForestConfig, fit_forest, oob_weights_all
from .model_io import ModelFormatError, load_model, save_model
from .neighbors import divergence_analysis
from .reporting import (
    format_cohort_table,
    format_evaluation,
    neighbors_response,
    per_observation_table,
    prediction_response,
)
from .service import DEFAULT_PORT, FingerprintMismatch, create_app
from .tree import TreeConfig


def _echo_rejections(rejected) -> None:
    for r in rejected:
        click.echo(f"warning: rejected line {r.line} ({r.column}): {r.reason}", err=True)


def _load_cohort_or_fail(path):
    try:
        data, rejected = load_cohort(path)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    _echo_rejections(rejected)
    return data


def _load_model_or_fail(model_path, data, force: bool):
    try:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            forest = load_model(model_path)
    except (OSError, ModelFormatError) as exc:
        raise click.ClickException(str(exc))
    if data is not None and forest.dataset_fingerprint != data.fingerprint():
        if not force:
            raise click.ClickException(
                "cohort does not match the model's training-data fingerprint (use --force to override)"
            )
        click.echo("warning: proceeding despite fingerprint mismatch", err=True)
    return forest


_FEATURE_OPTS = [
    ("--age", "age", float, "Age in years"),
    ("--tumor-size", "tumor_size", float, "Tumor size in cm"),
    ("--p53", "p53", float, "p53 positive cells, percent"),
    ("--sbr-grade", "sbr_grade", int, "SBR grade 1-3"),
    ("--mitotic-grade", "mitotic_grade", int, "Mitotic grade 1-3"),
    ("--er", "er", float, "ER expression, percent"),
    ("--pr", "pr", float, "PR expression, percent"),
    ("--ki67", "ki67", float, "Ki67 proliferation index, percent"),
]


def _feature_options(fn):
    fn = click.option(
        "--lymph-nodes",
        "lymph_nodes",
        default="NA",
        show_default=True,
        help="Lymph node count 0-3, or NA when unknown",
    )(fn)
    for flag, name, ftype, help_text in reversed(_FEATURE_OPTS):
        fn = click.option(flag, name, type=ftype, required=True, help=help_text)(fn)
    return fn


def _build_feature_vector(lymph_nodes: str, **kwargs) -> FeatureVector:
    raw = lymph_nodes.strip().upper()
    if raw == "NA" or raw == "":
        lymph = -1
    else:
        try:
            lymph = int(raw)
        except ValueError:
            raise click.ClickException("lymph-nodes must be an integer 0-3 or NA")
    mapping = dict(kwargs)
    mapping["lymph_nodes"] = lymph
    fv = FeatureVector.from_mapping(mapping)
    try:
        fv.validate()
    except ValueError as exc:
        raise click.ClickException(str(exc))
    return fv


@click.group()
def main():
    """Distributional random forest for ODX recurrence-score prediction."""


@main.command()
@click.option("--cohort", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--trees", default=2000, show_default=True, help="Number of trees")
@click.option("--mtry", default=3, show_default=True, help="Candidate features per split")
@click.option("--min-leaf", default=5, show_default=True, help="Minimum rows per leaf")
@click.option("--max-depth", default=None, type=int, help="Depth limit (default unbounded)")
@click.option(
    "--resampling",
    type=click.Choice(["subsample", "bootstrap"]),
    default="subsample",
    show_default=True,
)
@click.option("--fraction", default=0.5, show_default=True, help="Subsample fraction")
@click.option("--seed", default=0, show_default=True)
def train(cohort, out, trees, mtry, min_leaf, max_depth, resampling, fraction, seed):
    """Fit a forest on a cohort CSV and write the model file."""
    data = _load_cohort_or_fail(cohort)
    try:
        config = ForestConfig(
            num_trees=trees,
            resampling=resampling,
            fraction=fraction,
            seed=seed,
            tree=TreeConfig(min_leaf_size=min_leaf, max_depth=max_depth, mtry=mtry),
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if data.n < 2 * min_leaf:
        click.echo(
            f"warning: cohort has only {data.n} row(s); trees will be degenerate single leaves",
            err=True,
        )
    forest = fit_forest(data, config)
    save_model(forest, out)
    click.echo(
        f"fitted {config.num_trees} trees on {data.n} rows "
        f"(seed {config.seed}, fingerprint {forest.dataset_fingerprint[:16]}...)"
    )
    click.echo(f"model written to {out}")


@main.command()
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cohort", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--folds", default=None, type=int, help="Use K-fold CV instead of out-of-bag")
@click.option("--cv-seed", default=0, show_default=True, help="Fold-assignment seed")
@click.option("--force", is_flag=True, help="Proceed despite a fingerprint mismatch")
@click.option("--out-dir", default=None, type=click.Path(file_okay=False), help="Write report files here")
def evaluate(model, cohort, folds, cv_seed, force, out_dir):
    """Validate a model: out-of-bag by default, K-fold with --folds."""
    data = _load_cohort_or_fail(cohort)
    forest = _load_model_or_fail(model, data, force)
    try:
        if folds is None:
            weights = oob_weights_all(forest, data)
            result = oob_evaluate(forest, data, weights=weights)
            divergence = divergence_analysis(result.report, weights, data)
            body = format_evaluation(result)
            body += "\n\nPatient vs neighborhood (mean absolute difference)"
            for q, groups in divergence.group_means().items():
                correct = "n/a" if groups["correct"] is None else f"{groups['correct']:.2f}"
                wrong = "n/a" if groups["misclassified"] is None else f"{groups['misclassified']:.2f}"
                body += f"\n  {q:<10} correct: {correct:>8}   misclassified: {wrong:>8}"
        else:
            cv = CvConfig(k=folds, seed=cv_seed)
            cv_result = kfold_cv(data, forest.config, cv)
            result = cv_result.pooled
            body = format_evaluation(result)
            body += f"\n\nCross-validation mean CRPS (averaged over folds): {cv_result.cv_mean_crps:.4f}"
            for fold in cv_result.folds:
                acc = fold.metrics.accuracy
                acc_text = "undefined" if acc is None else f"{acc:.1%}"
                body += (
                    f"\n  fold {fold.fold_index}: {len(fold.report.rows)} rows, "
                    f"mean CRPS {fold.report.mean_crps:.4f}, accuracy {acc_text}"
                )
    except (OobUnavailableError, ValueError) as exc:
        raise click.ClickException(str(exc))
    table = per_observation_table(result.report)
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / "observations.tsv").write_text(table + "\n", encoding="utf-8")
        (out_path / "summary.txt").write_text(body + "\n", encoding="utf-8")
        click.echo(f"reports written to {out_dir}")
    else:
        click.echo(table)
        click.echo("")
    click.echo(body)


@main.command()
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cohort", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--force", is_flag=True, help="Proceed despite a fingerprint mismatch")
@click.option("--neighbors", "k", default=10, show_default=True, help="Neighbors to include")
@click.option("--bins", default=DEFAULT_HISTOGRAM_BINS, show_default=True)
@_feature_options
def predict(model, cohort, force, k, bins, lymph_nodes, **features):
    """Predict the score distribution for one patient; prints JSON."""
    data = _load_cohort_or_fail(cohort)
    forest = _load_model_or_fail(model, data, force)
    fv = _build_feature_vector(lymph_nodes, **features)
    response = prediction_response(forest, data, fv, k=k, bins=bins)
    click.echo(json.dumps(response, indent=2, sort_keys=True))


@main.command()
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cohort", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--force", is_flag=True, help="Proceed despite a fingerprint mismatch")
@click.option("--k", default=10, show_default=True)
@_feature_options
def neighbors(model, cohort, force, k, lymph_nodes, **features):
    """Most similar cohort patients by forest weight; prints JSON."""
    data = _load_cohort_or_fail(cohort)
    forest = _load_model_or_fail(model, data, force)
    fv = _build_feature_vector(lymph_nodes, **features)
    response = neighbors_response(forest, data, fv, k=k)
    click.echo(json.dumps(response, indent=2, sort_keys=True))


@main.command()
@click.option("--n", default=333, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--report", is_flag=True, help="Print the band-frequency table")
def synth(n, seed, out, report):
    """Generate a synthetic cohort CSV with the published band marginals."""
    try:
        data = synth_cohort(COHORT_MARGINALS, n=n, seed=seed)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    write_cohort(data, out)
    click.echo(f"wrote {data.n} rows to {out}")
    if report:
        click.echo(format_cohort_table(data))


@main.command()
@click.option("--model", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--cohort", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--force", is_flag=True, help="Proceed despite a fingerprint mismatch")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help=f"Default {DEFAULT_PORT} or $DISTFOREST_PORT")
def serve(model, cohort, force, host, port):
    """Serve /api/v1 prediction endpoints for the decision UI.

    Model and cohort paths fall back to $DISTFOREST_MODEL and
    $DISTFOREST_COHORT.
    """
    import uvicorn

    model = model or os.environ.get("DISTFOREST_MODEL")
    cohort = cohort or os.environ.get("DISTFOREST_COHORT")
    if port is None:
        port = int(os.environ.get("DISTFOREST_PORT", DEFAULT_PORT))
    if not model or not cohort:
        raise click.UsageError("provide --model/--cohort or set DISTFOREST_MODEL/DISTFOREST_COHORT")
    try:
        from .service import load_bundle

        bundle = load_bundle(model, cohort, force=force)
    except (OSError, ValueError, FingerprintMismatch) as exc:
        raise click.ClickException(str(exc))
    app = create_app(bundle)
    click.echo(f"serving model {model} on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
