"""Synthetic corpus generator: planted-topic articles with topic-correlated
authors, journals, subjects and citations, plus a ground-truth assignment
file.  Stands in for licensed bibliographic data in tests and demos.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_CONS = "bcdfghklmnprstvz"
_VOWEL = "aeiou"


def _word(rng: np.random.Generator, syllables: int = 3) -> str:
    return "".join(
        _CONS[rng.integers(len(_CONS))] + _VOWEL[rng.integers(len(_VOWEL))]
        for _ in range(syllables)
    )


def _pool(rng: np.random.Generator, size: int, syllables: int = 3) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    while len(out) < size:
        w = _word(rng, syllables)
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def synth_corpus(
    n_articles: int = 500,
    n_topics: int = 5,
    seed: int = 7,
) -> tuple[str, list[tuple[str, str]]]:
    """Returns (corpus text in the ingest format, truth rows
    (record_id, topic_key)).  Deterministic for a fixed seed."""
    if n_topics < 2:
        raise ValueError("n_topics must be >= 2")
    rng = np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(99)]))

    common = _pool(rng, 60)
    topics = []
    for t in range(n_topics):
        topics.append(
            {
                "terms": _pool(rng, 40),
                "authors": [f"{_word(rng, 2)} {_CONS[rng.integers(len(_CONS))]}" for _ in range(15)],
                "journals": [f"{rng.integers(1000, 9999)}-{rng.integers(1000, 9999)}" for _ in range(3)],
                "subjects": _pool(rng, 8, syllables=4),
                "citations": [
                    f"{_word(rng, 2)} {_CONS[rng.integers(len(_CONS))]}, {1960 + rng.integers(60)}, {_word(rng, 2)}, v{rng.integers(1, 400)}, p{rng.integers(1, 999)}"
                    for _ in range(60)
                ],
            }
        )

    blocks: list[str] = []
    truth: list[tuple[str, str]] = []
    for i in range(n_articles):
        t = int(i % n_topics)
        pool = topics[t]
        rid = f"SYN:{i:06d}"
        truth.append((rid, str(t + 1)))

        def sample(words, n, noise=0.15):
            out = []
            for _ in range(n):
                if rng.random() < noise:
                    out.append(common[rng.integers(len(common))])
                else:
                    out.append(words[rng.integers(len(words))])
            return out

        title = " ".join(sample(pool["terms"], 8))
        abstract = " ".join(sample(pool["terms"], 60))
        lines = [f"ID\t{rid}", f"TI\t{title}", f"AB\t{abstract}"]
        for a in rng.choice(pool["authors"], size=rng.integers(1, 4), replace=False):
            lines.append(f"AU\t{a}")
        lines.append(f"SN\t{pool['journals'][rng.integers(3)]}")
        for s in rng.choice(pool["subjects"], size=rng.integers(2, 6), replace=False):
            lines.append(f"SU\t{s}")
        n_cites = int(rng.integers(5, 16))
        for _ in range(n_cites):
            src = topics[rng.integers(n_topics)] if rng.random() < 0.1 else pool
            lines.append(f"CI\t{src['citations'][rng.integers(60)]}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n", truth


def write_synth_corpus(
    out_dir: str | Path,
    n_articles: int = 500,
    n_topics: int = 5,
    seed: int = 7,
) -> tuple[Path, Path]:
    """Writes corpus.txt and truth.csv (assignment-file schema, label
    "truth") into out_dir; returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text, truth = synth_corpus(n_articles, n_topics, seed)
    corpus_path = out_dir / "corpus.txt"
    truth_path = out_dir / "truth.csv"
    corpus_path.write_text(text, encoding="utf-8")
    lines = ["record_id,solution_label,cluster_key"]
    lines += [f"{rid},truth,{ck}" for rid, ck in truth]
    truth_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return corpus_path, truth_path
