#!/usr/bin/env python3
"""Regenerates the bundled toy corpora from data/toy/model.txt.

LLM passages follow the fixture bigram chain most of the time; human passages
mix bigram steps with unigram draws, so they are less predictable under the
toy scorer without being trivially separable.

    python3 tools/make_toy_corpus.py            # writes data/toy/*.jsonl
"""

import collections
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
TOY = ROOT / "data" / "toy"


def load_model(path):
    docs = [line.split() for line in path.read_text().splitlines() if line.strip()]
    starts = [d[0] for d in docs]
    succ = collections.defaultdict(list)
    unigram = []
    for d in docs:
        unigram.extend(d)
        for a, b in zip(d, d[1:]):
            succ[a].append(b)
    return starts, succ, unigram


def generate(rng, model, length, bigram_prob):
    starts, succ, unigram = model
    out = [rng.choice(starts)]
    while len(out) < length:
        prev = out[-1]
        if rng.random() < bigram_prob:
            nxt = rng.choice(succ[prev]) if succ[prev] else rng.choice(starts)
        else:
            nxt = rng.choice(unigram)
        out.append(nxt)
    return " ".join(out)


def write_jsonl(path, records):
    with path.open("w") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")


def main():
    model = load_model(TOY / "model.txt")
    rng = random.Random(20241015)

    records = []
    for dataset in ("toy-news", "toy-stories"):
        for i in range(10):
            for label, prob in (("human", 0.8), ("llm", 0.9)):
                length = rng.randint(150, 230)
                records.append({
                    "id": f"{dataset}-{label}-{i:02d}",
                    "text": generate(rng, model, length, prob),
                    "label": label,
                    "source_model": "toy-bigram" if label == "llm" else "human",
                    "dataset": dataset,
                })
    write_jsonl(TOY / "corpus.jsonl", records)

    small = []
    for i, (label, prob) in enumerate((("human", 0.8), ("llm", 0.9), ("human", 0.8), ("llm", 0.9))):
        small.append({
            "id": f"fixture-{i}",
            "text": generate(rng, model, rng.randint(20, 40), prob),
            "label": label,
            "source_model": "toy-bigram" if label == "llm" else "human",
            "dataset": "toy-fixture",
        })
    write_jsonl(TOY / "detect_fixture.jsonl", small)


if __name__ == "__main__":
    main()
