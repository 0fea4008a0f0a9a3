"""Command-line surface: solve, stackelberg, analyze, simulate.

Exit codes: 0 success, 1 runtime/I-O failure, 2 usage error.  Every
randomized command takes an explicit ``--seed`` (default 0) which is recorded
in the output metadata; re-running a command with identical inputs produces
byte-identical primary outputs.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._kernels import BACKEND
from .errors import EditGameError
from .governance import GovernanceSearch, optimal_governance
from .model import (
    MODE_CLAMP,
    MODE_ITERATIVE_EXCLUSION,
    ContributorProfile,
    GameInstance,
    closed_form_equilibrium,
    feasibility,
)
from .reports import analyze_corpus, load_quality_scores, write_json
from .simulator import PopulationConfig, SynthesisConfig, sample_population, synthesize_corpus
from .solvers import SolverConfig, best_response_equilibrium, spectral_equilibrium

_MODE_CHOICE = click.Choice([MODE_ITERATIVE_EXCLUSION, MODE_CLAMP])


def _parse_betas(raw: str) -> list[float]:
    try:
        betas = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"--beta must be a comma-separated list of numbers, got {raw!r}")
    if not betas:
        raise click.UsageError("--beta is empty")
    return betas


def _read_profiles_csv(path: str) -> list[ContributorProfile]:
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise click.ClickException(f"cannot read profiles: {exc}")
    with fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise click.ClickException(f"profiles file {path} is empty")
    if rows[0][0].strip().lower() == "contributor_id":
        rows = rows[1:]
    profiles = []
    for i, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise click.ClickException(f"profiles row {i}: expected contributor_id,beta")
        try:
            profiles.append(ContributorProfile(row[0].strip(), float(row[1])))
        except ValueError as exc:
            raise click.ClickException(f"profiles row {i}: {exc}")
    return profiles


def _gather_profiles(beta: str | None, profiles_path: str | None) -> list[ContributorProfile]:
    if beta is None and profiles_path is None:
        raise click.UsageError("provide --beta or --profiles")
    if beta is not None:
        betas = _parse_betas(beta)
        if len(betas) < 2:
            raise click.UsageError("at least 2 contributors are required (N >= 2)")
        try:
            return [ContributorProfile(f"c{i + 1}", b) for i, b in enumerate(betas)]
        except ValueError as exc:
            raise click.UsageError(str(exc))
    found = _read_profiles_csv(profiles_path)
    if len(found) < 2:
        raise click.UsageError("at least 2 contributors are required (N >= 2)")
    return found


@click.group()
@click.version_option(__version__, prog_name="editgame")
def main():
    """Competitive-editing equilibrium analysis."""


@main.command()
@click.option("--beta", help="Comma-separated contributor edit sizes, e.g. 1,2,4.")
@click.option("--profiles", "profiles_path", help="CSV with contributor_id,beta rows.")
@click.option("--L", "effort_constant", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
@click.option("--t", "governance", type=click.FloatRange(min=0), default=0.0, show_default=True)
@click.option("--mode", type=_MODE_CHOICE, default=MODE_ITERATIVE_EXCLUSION, show_default=True)
@click.option("--check", is_flag=True, help="Cross-run all three solvers and report the max discrepancy.")
@click.option("--json", "as_json", is_flag=True, help="Emit a JSON report instead of text.")
def solve(beta, profiles_path, effort_constant, governance, mode, check, as_json):
    """Solve one contributor game: contributions, ownership, feasibility."""
    profiles = _gather_profiles(beta, profiles_path)
    try:
        game = GameInstance(tuple(profiles), effort_constant, governance)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    sol = closed_form_equilibrium(game, mode=mode)
    payload = {
        "N": game.n,
        "L": effort_constant,
        "t": governance,
        "mode": mode,
        "contributors": [p.contributor_id for p in game.profiles],
        "beta": [p.beta for p in game.profiles],
        "x_star": list(sol.contributions.contributions),
        "ownership": list(sol.ownership),
        "feasible": list(sol.feasible),
        "active_set": list(sol.active_set),
    }
    if check:
        candidates = {"closed_form": sol, "best_response": best_response_equilibrium(game, SolverConfig())}
        if feasibility(game).all():
            candidates["spectral"] = spectral_equilibrium(game)
        else:
            payload["check_note"] = "spectral route skipped (infeasible contributor present)"
        names = sorted(candidates)
        disc = 0.0
        for i, na in enumerate(names):
            for nb in names[i + 1 :]:
                xa = candidates[na].contribution_array
                xb = candidates[nb].contribution_array
                disc = max(disc, float(np.abs(xa - xb).max()))
                ca = candidates[na].ownership_array
                cb = candidates[nb].ownership_array
                disc = max(disc, float(np.abs(ca - cb).max()))
        payload["solvers_checked"] = names
        payload["max_discrepancy"] = disc
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    click.echo(f"N={game.n} L={effort_constant:g} t={governance:g} mode={mode}")
    click.echo("contributor  beta        x*            c*       feasible")
    for i, p in enumerate(game.profiles):
        click.echo(
            f"{p.contributor_id:<12} {p.beta:<10.4g} {sol.contributions.contributions[i]:<13.6g} "
            f"{sol.ownership[i]:<8.4f} {'yes' if sol.feasible[i] else 'no'}"
        )
    click.echo(f"active set: {list(sol.active_set)}")
    if check:
        click.echo(f"solvers checked: {payload['solvers_checked']}")
        click.echo(f"max discrepancy: {payload['max_discrepancy']:.3e}")
        if "check_note" in payload:
            click.echo(payload["check_note"])


@main.command()
@click.option("--beta", help="Comma-separated contributor edit sizes.")
@click.option("--profiles", "profiles_path", help="CSV with contributor_id,beta rows.")
@click.option("--L", "effort_constant", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
@click.option("--z-star", type=click.FloatRange(min=0, min_open=True), required=True,
              help="Maximum enforcement level allowed.")
@click.option("--tolerance", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Search tolerance on t [default: 1e-6 * z_star].")
@click.option("--grid", "grid_points", type=click.IntRange(min=2), default=65, show_default=True)
@click.option("--raw-entropy", is_flag=True, help="Report unnormalized entropy (nats).")
@click.option("--out", "out_path", help="Write the JSON report here instead of stdout.")
@click.option("--csv", "csv_path", help="Also write the (t, entropy) grid as CSV.")
def stackelberg(beta, profiles_path, effort_constant, z_star, tolerance, grid_points, raw_entropy, out_path, csv_path):
    """Pick the entropy-maximizing enforcement level t in [0, z-star]."""
    profiles = _gather_profiles(beta, profiles_path)
    search = GovernanceSearch(
        z_star=z_star, search_tolerance=tolerance, normalization=not raw_entropy
    )
    profile = optimal_governance(profiles, effort_constant, search, grid_points=grid_points)
    payload = {
        "L": effort_constant,
        "z_star": z_star,
        "normalized": not raw_entropy,
        "argmax_t": profile.argmax_t,
        "constrained": profile.constrained,
        "grid": [[t, h] for t, h in profile.grid],
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "entropy"])
            writer.writerows(profile.grid)


@main.command()
@click.argument("corpus_path")
@click.option("--out", "out_dir", required=True, help="Report directory.")
@click.option("--L", "effort_constant", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
@click.option("--t", "governance", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Governance level used for predictions (the data never pins it down).")
@click.option("--mode", type=_MODE_CHOICE, default=MODE_ITERATIVE_EXCLUSION, show_default=True)
@click.option("--exclude", "exclude_path", help="File with contributor_ids to drop (one per line), e.g. bots.")
@click.option("--quality", "quality_path", help="CSV article_id,score for the entropy-quality correlation.")
@click.option("--train-count", type=click.IntRange(min=1), default=None,
              help="Run repeated train/test validation with this many training articles.")
@click.option("--repeats", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def analyze(corpus_path, out_dir, effort_constant, governance, mode, exclude_path,
            quality_path, train_count, repeats, seed):
    """Run the measurement pipeline on a revision corpus and write reports."""
    from .corpus import load_corpus

    try:
        corpus = load_corpus(corpus_path)
        if exclude_path:
            drop = [
                line.strip()
                for line in Path(exclude_path).read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            corpus = corpus.excluding(drop)
        quality = load_quality_scores(quality_path) if quality_path else None
        if len(corpus) == 0:
            raise click.ClickException("corpus is empty after loading/exclusion")
        summary = analyze_corpus(
            corpus,
            out_dir,
            L=effort_constant,
            t=governance,
            mode=mode,
            quality_scores=quality,
            train_count=train_count,
            repeats=repeats,
            seed=seed,
            metadata={"command": "analyze", "corpus": str(corpus_path)},
        )
    except (EditGameError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"analyzed {summary['articles_compared']} of {summary['articles_total']} articles "
               f"(governance t={governance:g}, L={effort_constant:g})")
    if summary["skipped_single_contributor"]:
        click.echo(
            f"skipped {len(summary['skipped_single_contributor'])} single-contributor article(s)"
        )
    if summary["articles_compared"] == 0:
        click.echo("comparison empty: no multi-contributor articles in the corpus")
    if summary["pearson_pooled"] is not None:
        click.echo(f"pooled pearson (predicted vs observed): {summary['pearson_pooled']:.4f}")
    click.echo(f"reports written to {out_dir}")


@main.command()
@click.option("--articles", type=click.IntRange(min=1), default=None, help="Number of articles.")
@click.option("--seed", type=int, default=None, help="Population seed (synthesis derives from it).")
@click.option("--out", "out_path", required=True, help="Corpus file to write (JSONL).")
@click.option("--contributors", help="Contributor count range low,high  [default: 2,247].")
@click.option("--beta-mean", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--beta-min", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--L", "effort_constant", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--t", "governance", type=click.FloatRange(min=0), default=None)
@click.option("--rounds", type=click.IntRange(min=1), default=None)
@click.option("--noise", type=click.FloatRange(min=0, max=1, max_open=True), default=None)
@click.option("--sentences", type=click.IntRange(min=1), default=None, help="Sentences per article.")
@click.option("--config", "config_path", help="JSON config with population/synthesis sections.")
def simulate(articles, seed, out_path, contributors, beta_mean, beta_min,
             effort_constant, governance, rounds, noise, sentences, config_path):
    """Generate a synthetic revision corpus plus a metadata sidecar."""
    from .corpus import write_corpus_jsonl

    config = {"population": {}, "synthesis": {}}
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"cannot read config: {exc}")
        config["population"].update(loaded.get("population", {}))
        config["synthesis"].update(loaded.get("synthesis", {}))

    pop_kwargs = dict(config["population"])
    if articles is not None:
        pop_kwargs["article_count"] = articles
    if seed is not None:
        pop_kwargs["seed"] = seed
    if contributors is not None:
        try:
            lo, hi = (int(v) for v in contributors.split(","))
        except ValueError:
            raise click.UsageError("--contributors must be low,high integers")
        pop_kwargs["contributors_range"] = (lo, hi)
    if beta_mean is not None:
        pop_kwargs["beta_mean"] = beta_mean
    if beta_min is not None:
        pop_kwargs["beta_min"] = beta_min
    if "article_count" not in pop_kwargs:
        raise click.UsageError("provide --articles (or article_count in --config)")
    if "contributors_range" in pop_kwargs:
        pop_kwargs["contributors_range"] = tuple(pop_kwargs["contributors_range"])

    syn_kwargs = dict(config["synthesis"])
    for key, value in (
        ("effort_constant", effort_constant),
        ("governance", governance),
        ("rounds", rounds),
        ("noise", noise),
        ("sentences_per_article", sentences),
    ):
        if value is not None:
            syn_kwargs[key] = value
    syn_kwargs.setdefault("seed", pop_kwargs.get("seed", 0))

    try:
        pop_cfg = PopulationConfig(**pop_kwargs)
        syn_cfg = SynthesisConfig(**syn_kwargs)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(str(exc))

    try:
        population = sample_population(pop_cfg)
        corpus = synthesize_corpus(population, syn_cfg)
        write_corpus_jsonl(corpus, out_path)
        write_json(
            Path(str(out_path) + ".meta.json"),
            {
                "tool": "editgame",
                "version": __version__,
                "kernel_backend": BACKEND,
                "population": {
                    "article_count": pop_cfg.article_count,
                    "contributors_range": list(pop_cfg.contributors_range),
                    "beta_mean": pop_cfg.beta_mean,
                    "beta_min": pop_cfg.beta_min,
                    "seed": pop_cfg.seed,
                },
                "synthesis": {
                    "effort_constant": syn_cfg.effort_constant,
                    "governance": syn_cfg.governance,
                    "rounds": syn_cfg.rounds,
                    "noise": syn_cfg.noise,
                    "sentences_per_article": syn_cfg.sentences_per_article,
                    "seed": syn_cfg.seed,
                },
                "counts": {
                    "articles": len(corpus),
                    "revisions": sum(len(a.revisions) for a in corpus),
                },
            },
        )
    except (EditGameError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"wrote {len(corpus)} articles, {sum(len(a.revisions) for a in corpus)} revisions to {out_path}"
    )


if __name__ == "__main__":
    main()
