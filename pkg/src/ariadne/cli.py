"""Command-line entry point for the offline pipeline and the explorer
service.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from ariadne import clustering as clu
from ariadne import pipeline as pl
from ariadne import semindex as idx
from ariadne.ingest import IngestError
from ariadne.lexical import ExtractionError
from ariadne.synth import write_synth_corpus

DATA_ERRORS = (
    IngestError,
    ExtractionError,
    idx.IndexFormatError,
    clu.ClusteringError,
    pl.PipelineError,
    FileNotFoundError,
)


def _wd(workdir: str) -> pl.Workdir:
    wd = pl.Workdir(Path(workdir))
    wd.root.mkdir(parents=True, exist_ok=True)
    return wd


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def cli(verbose: bool):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
@click.option("--articles", "n_articles", default=500, show_default=True)
@click.option("--topics", "n_topics", default=5, show_default=True)
@click.option("--seed", default=7, show_default=True)
def synth(workdir, n_articles, n_topics, seed):
    """Generate a synthetic corpus plus ground-truth assignments."""
    corpus, truth = write_synth_corpus(workdir, n_articles, n_topics, seed)
    click.echo(f"wrote {corpus} and {truth}")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
@click.option("--corpus", type=click.Path(exists=True), help="Copy this corpus file into the workdir first.")
@click.option("--assignments", multiple=True, type=click.Path(exists=True))
def ingest(workdir, corpus, assignments):
    """Parse the corpus and attach cluster assignment files."""
    wd = _wd(workdir)
    if corpus:
        wd.corpus.write_bytes(Path(corpus).read_bytes())
    pl.stage_ingest(wd, [Path(a) for a in assignments])
    click.echo(f"wrote {wd.records}")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
@click.option("--min-count", default=5, show_default=True)
@click.option("--mi-threshold", default=3.0, show_default=True)
@click.option("--stopwords", type=click.Path(exists=True))
def extract(workdir, min_count, mi_threshold, stopwords):
    """Extract topical terms and build the vocabulary."""
    wd = _wd(workdir)
    pl.stage_extract(wd, min_count, mi_threshold, Path(stopwords) if stopwords else None)
    click.echo(f"wrote {wd.vocabulary}")


@cli.command("build-index")
@click.option("--workdir", required=True, type=click.Path())
@click.option("--dim", default=idx.DEFAULT_DIM, show_default=True)
@click.option("--seed", default=idx.DEFAULT_SEED, show_default=True)
@click.option("--min-entity-count", default=idx.DEFAULT_MIN_ENTITY_COUNT, show_default=True)
def build_index(workdir, dim, seed, min_entity_count):
    """Build the co-occurrence matrix and project it to the semantic index."""
    wd = _wd(workdir)
    pl.stage_build_index(wd, dim, seed, min_entity_count)
    click.echo(f"wrote {wd.index}")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
def embed(workdir):
    """Embed articles as weighted averages of their entity vectors."""
    wd = _wd(workdir)
    pl.stage_embed(wd)
    click.echo(f"wrote {wd.article_matrix}")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["kmeans", "louvain"]), default="kmeans", show_default=True)
@click.option("--k", default=31, show_default=True)
@click.option("--knn", default=clu.KNN_K, show_default=True)
@click.option("--threshold", default=clu.KNN_THRESHOLD, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--label")
def cluster(workdir, method, k, knn, threshold, seed, label):
    """Produce an in-house clustering solution."""
    out = pl.stage_cluster(_wd(workdir), method, k, knn, threshold, seed, label)
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--workdir", required=True, type=click.Path())
@click.option("--solution", required=True)
@click.option("--n-terms", default=10, show_default=True)
def label(workdir, solution, n_terms):
    """Label a solution's clusters with their top topical terms."""
    out = pl.stage_label(_wd(workdir), solution, n_terms)
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--nmi", "paths", nargs=2, required=True, type=click.Path(exists=True))
@click.option("--average", type=click.Choice(["arithmetic", "max"]), default="arithmetic", show_default=True)
def compare(paths, average):
    """Normalized mutual information between two partition CSV files."""
    a = clu.import_partition(paths[0])
    b = clu.import_partition(paths[1])
    click.echo(f"NMI({a.solution_label}, {b.solution_label}) = {clu.nmi(a, b, average):.6f}")


@cli.command()
@click.option("--workdir", "--index", "workdir", required=True, type=click.Path(exists=True))
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--show", type=int)
@click.option("--link-threshold", type=float)
@click.option("--quantile", type=float)
@click.option("--open-text", is_flag=True, default=None, help="Serve titles/abstracts (only for license-free corpora).")
def serve(workdir, listen, show, link_threshold, quantile, open_text):
    """Run the explorer HTTP service over a built workdir."""
    import uvicorn

    from ariadne.service import ServiceConfig, create_app

    config = ServiceConfig.from_env(
        Path(workdir), listen=listen, show=show,
        link_threshold=link_threshold, quantile=quantile, serve_text=open_text,
    )
    host, _, port = config.listen.partition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


@cli.command("run-all")
@click.option("--workdir", required=True, type=click.Path())
@click.option("--assignments", multiple=True, type=click.Path(exists=True))
@click.option("--min-count", default=5, show_default=True)
@click.option("--mi-threshold", default=3.0, show_default=True)
@click.option("--dim", default=idx.DEFAULT_DIM, show_default=True)
@click.option("--seed", default=idx.DEFAULT_SEED, show_default=True)
@click.option("--kmeans-k", default=31, show_default=True)
@click.option("--force", is_flag=True)
def run_all(workdir, assignments, min_count, mi_threshold, dim, seed, kmeans_k, force):
    """Run every pipeline stage in dependency order."""
    wd = _wd(workdir)
    pl.run_all(
        wd, [Path(a) for a in assignments], min_count, mi_threshold,
        dim, seed, kmeans_k=kmeans_k, force=force,
    )
    click.echo(f"pipeline complete in {wd.root}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except DATA_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # pragma: no cover - internal faults
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
