"""Read-only HTTP service exposing context queries, scans, article lookups,
cluster solution metadata, and external search link generation.

All endpoints serve from an immutable in-memory index; identical requests
return identical bodies (the layout seed is derived from the query string).
"""

from __future__ import annotations

import logging
import os
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ariadne import articles as art
from ariadne import clustering  # noqa: F401  (re-exported for service scripts)
from ariadne import ingest as ing
from ariadne import query as cq
from ariadne import semindex as idx
from ariadne.pipeline import Workdir
from ariadne.records import EntityType, PREFIX_TYPE

log = logging.getLogger(__name__)

DEFAULT_PROVIDERS = {
    "google": "https://www.google.com/search?q={q}",
    "google-scholar": "https://scholar.google.com/scholar?q={q}",
    "wikipedia": "https://en.wikipedia.org/w/index.php?search={q}",
    "worldcat": "https://search.worldcat.org/search?q={q}",
}
CONTEXT_TERM_COUNT = 5


@dataclass
class ServiceConfig:
    workdir: Path
    listen: str = "127.0.0.1:8000"
    show: int = cq.DEFAULT_SHOW
    link_threshold: float = cq.LINK_THRESHOLD
    quantile: float = cq.MAHALANOBIS_QUANTILE
    layout_iterations: int = 120
    serve_text: bool = False  # license flag: titles/abstracts only when true
    providers: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PROVIDERS))

    @classmethod
    def from_env(cls, workdir: Path, **overrides) -> "ServiceConfig":
        """Environment variables with prefix ARIADNE_ override defaults."""
        env = {
            "listen": os.environ.get("ARIADNE_LISTEN"),
            "show": os.environ.get("ARIADNE_SHOW"),
            "link_threshold": os.environ.get("ARIADNE_LINK_THRESHOLD"),
            "quantile": os.environ.get("ARIADNE_QUANTILE"),
            "serve_text": os.environ.get("ARIADNE_SERVE_TEXT"),
        }
        kwargs: dict = {"workdir": workdir}
        if env["listen"]:
            kwargs["listen"] = env["listen"]
        if env["show"]:
            kwargs["show"] = int(env["show"])
        if env["link_threshold"]:
            kwargs["link_threshold"] = float(env["link_threshold"])
        if env["quantile"]:
            kwargs["quantile"] = float(env["quantile"])
        if env["serve_text"]:
            kwargs["serve_text"] = env["serve_text"].lower() in ("1", "true", "yes")
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


def external_links(
    raw_query: str,
    related_terms: list[str],
    providers: dict[str, str] | None = None,
) -> dict:
    """Exact links use the raw query; context links join the top related
    topical terms with AND.  Empty related terms omit the context map."""
    providers = DEFAULT_PROVIDERS if providers is None else providers
    exact = {
        name: tpl.format(q=urllib.parse.quote_plus(raw_query)) for name, tpl in providers.items()
    }
    terms = related_terms[:CONTEXT_TERM_COUNT]
    context = {}
    if terms:
        joined = " AND ".join(terms)
        context = {name: tpl.format(q=urllib.parse.quote_plus(joined)) for name, tpl in providers.items()}
    return {"exact": exact, "context": context}


class ExplorerState:
    """Immutable index artifacts loaded once at startup."""

    def __init__(self, config: ServiceConfig):
        wd = Workdir(config.workdir)
        self.config = config
        self.sm = idx.load_index(wd.index)
        self.am = art.load_articles(wd.article_matrix) if wd.article_matrix.exists() else None
        self.records = ing.read_records(wd.records) if wd.records.exists() else []
        self.by_id = {r.record_id: r for r in self.records}
        self.term_lists: dict[str, list[str]] = {}
        if wd.terms.exists():
            import json

            self.term_lists = json.loads(wd.terms.read_text("utf-8"))
        inventory = ing.build_entity_inventory(self.records, self.term_lists) if self.records else self.sm.entities
        self.idf = art.compute_idf(list(inventory), max(len(self.records), 1))
        self.solutions = ing.solution_stats(self.records) if self.records else []
        self.titles = {r.record_id: r.title for r in self.records} if config.serve_text else {}


def _parse_types(types: str) -> set[EntityType] | None:
    if not types:
        return None
    out = set()
    for part in types.split(","):
        part = part.strip().lower()
        if not part:
            continue
        if part in PREFIX_TYPE:
            out.add(PREFIX_TYPE[part])
        else:
            try:
                out.add(EntityType(part))
            except ValueError:
                pass
    return out or None


def create_app(config: ServiceConfig, state: ExplorerState | None = None) -> FastAPI:
    app = FastAPI(title="ariadne explorer", version="0.1.0")
    app.state.explorer = state  # loaded lazily so tests can inject fixtures
    app.state.config = config
    log.info("service config: %s", config)

    def get_state() -> ExplorerState | None:
        if app.state.explorer is None:
            try:
                app.state.explorer = ExplorerState(config)
            except FileNotFoundError:
                return None
        return app.state.explorer

    @app.get("/relate")
    def relate(input: str = "", show: int | None = None, types: str = "", scan: bool = False):
        st = get_state()
        if st is None:
            return JSONResponse({"error": "index not loaded"}, status_code=503)
        n = show if show is not None else st.config.show
        graph = cq.context_graph(
            input,
            st.sm,
            st.idf,
            am=st.am,
            titles=st.titles,
            show=n,
            type_filter=_parse_types(types),
            scan=scan,
            threshold=st.config.link_threshold,
            quantile=st.config.quantile,
            layout_iterations=st.config.layout_iterations,
        )
        terms = [
            e["key"].split(":", 1)[1]
            for e in graph.related_by_type.get(EntityType.TOPICAL_TERM.value, [])
        ]
        body = graph.to_dict()
        body["query"] = {"input": input, "show": n, "types": types, "scan": scan}
        body["external_links"] = external_links(input, terms, st.config.providers)
        return body

    @app.get("/article/{record_id}")
    def article(record_id: str, show: int | None = None):
        st = get_state()
        if st is None:
            return JSONResponse({"error": "index not loaded"}, status_code=503)
        rec = st.by_id.get(record_id)
        if rec is None:
            return JSONResponse({"error": f"unknown record: {record_id}"}, status_code=404)
        entities: dict[str, list[str]] = {}
        for etype, key in rec.entity_keys():
            entities.setdefault(etype.value, []).append(key)
        for t in st.term_lists.get(record_id, []):
            entities.setdefault(EntityType.TOPICAL_TERM.value, []).append(f"term:{t}")
        body: dict = {"record_id": record_id, "entities": entities}
        if st.config.serve_text:
            body["title"] = rec.title
            body["abstract"] = rec.abstract
        if st.am is not None:
            v = st.am.row(record_id)
            if v is not None:
                q = cq.Query(raw=f"article:{record_id}")
                n = show if show is not None else st.config.show
                pool = cq.rank(v, st.sm, n=n)
                survivors = cq.mahalanobis_filter(pool, v, st.sm, quantile=st.config.quantile, n=n)
                graph = cq.build_graph(
                    survivors, v, q, st.sm, am=st.am, titles=st.titles, show=n,
                    threshold=st.config.link_threshold,
                    layout_iterations=st.config.layout_iterations,
                )
                body["context"] = graph.to_dict()
        return body

    @app.get("/solutions")
    def solutions():
        st = get_state()
        if st is None:
            return JSONResponse({"error": "index not loaded"}, status_code=503)
        return [
            {"label": s.label, "cluster_count": s.cluster_count, "coverage": s.coverage}
            for s in st.solutions
        ]

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
