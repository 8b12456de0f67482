"""Semantic indexing and context exploration over bibliographic entity networks.

Offline pipeline: ingest records, extract topical terms, build the
entity/vocabulary co-occurrence matrix, reduce it with a signed random
projection, embed articles, and cluster them.  Online: a read-only HTTP
service that ranks entities by cosine similarity and serves context graphs.
"""

__version__ = "0.1.0"

from ariadne.records import BibRecord, ClusterSolution, Entity, EntityType

__all__ = ["BibRecord", "ClusterSolution", "Entity", "EntityType", "__version__"]
