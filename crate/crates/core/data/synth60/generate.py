"""Regenerates the synth60 corpus: 60 short documents in two topics."""

import random
from pathlib import Path

ASTRONOMY = """telescope galaxy orbit planet comet asteroid nebula star stellar
cosmic eclipse lunar solar gravity satellite spacecraft astronaut meteor
constellation supernova quasar pulsar observatory horizon crater rocket
universe radiation spectrum celestial""".split()
COOKING = """recipe oven flour butter garlic onion pepper sauce simmer roast
bake knife skillet dough pastry spice herb vinegar kitchen chef dessert
noodle broth tomato cheese grill marinade ginger lemon sugar""".split()
GENERAL = """people report recent study interesting method result early
simple public various common later process measure careful""".split()

QUERIES = [
    ("q01", "comet orbit around the planet", "astronomy"),
    ("q02", "telescope observatory images of a galaxy", "astronomy"),
    ("q03", "solar eclipse and lunar crater", "astronomy"),
    ("q04", "rocket spacecraft and astronaut", "astronomy"),
    ("q05", "supernova radiation spectrum", "astronomy"),
    ("q06", "garlic butter sauce", "cooking"),
    ("q07", "bake dough in the oven", "cooking"),
    ("q08", "chef kitchen knife skillet", "cooking"),
    ("q09", "tomato noodle broth with ginger", "cooking"),
    ("q10", "lemon sugar dessert pastry", "cooking"),
]


def document(rng, topic_words):
    n = rng.randint(25, 45)
    words = [rng.choice(topic_words) if rng.random() < 0.75 else rng.choice(GENERAL) for _ in range(n)]
    return " ".join(words)


def main():
    rng = random.Random(60)
    here = Path(__file__).parent
    docs, labels = [], []
    for i in range(60):
        topic = "astronomy" if i % 2 == 0 else "cooking"
        words = ASTRONOMY if topic == "astronomy" else COOKING
        doc_id = f"d{i + 1:02d}"
        docs.append(f"{doc_id}\t{document(rng, words)}")
        labels.append(f"{doc_id}\t{topic}")
    (here / "docs.tsv").write_text("\n".join(docs) + "\n")
    (here / "labels.tsv").write_text("\n".join(labels) + "\n")
    (here / "queries.tsv").write_text("".join(f"{q}\t{t}\n" for q, t, _ in QUERIES))
    judgments = []
    for q, _, topic in QUERIES:
        for line in labels:
            doc_id, label = line.split("\t")
            if label == topic:
                judgments.append(f"{q}\t{doc_id}")
    (here / "judgments.tsv").write_text("\n".join(judgments) + "\n")


if __name__ == "__main__":
    main()
