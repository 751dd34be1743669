#!/usr/bin/env python3
"""Train the MLP probe on relation-aware vs control embeddings.

The experiment the toolkit exists for, in miniature. Two embedding tables
over the same synthetic characters:

  aware    a character's vector is the mean of its component vectors plus
           noise, so containment is decodable from the embedding alone
  control  every vector is an independent Gaussian draw

The same probe config trains on both. The aware table should land well
above chance on the held-out characters; the control table should not.
"""

import numpy as np

from cscprobe.chars import DecompositionTable, Vocabulary
from cscprobe.datasets import build_glyph_dataset
from cscprobe.embeddings import EmbeddingTable, random_table
from cscprobe.probe import ProbeConfig, train_probe

DIM = 32


def synthetic_world(n_chars=400, n_components=50, seed=0):
    rng = np.random.default_rng(seed)
    components = [chr(0x2F00 + i) for i in range(n_components)]
    chars = [chr(0x4E00 + i) for i in range(n_chars)]
    entries = {}
    for c in chars:
        k = int(rng.integers(2, 5))
        picks = rng.choice(n_components, size=k, replace=False)
        entries[c] = tuple(components[int(i)] for i in picks)
    return DecompositionTable(entries=entries), components, chars, rng


def aware_table(decomp, components, chars, rng):
    comp_vecs = {c: rng.normal(0.0, 1.0, DIM) for c in components}
    rows = []
    order = components + chars
    for c in order:
        if c in comp_vecs:
            rows.append(comp_vecs[c])
        else:
            base = np.mean([comp_vecs[u] for u in decomp.components_of(c)], axis=0)
            rows.append(base + rng.normal(0.0, 0.15, DIM))
    return EmbeddingTable(
        dim=DIM, chars=tuple(order), vectors=np.array(rows, dtype=np.float32)
    )


def main():
    decomp, components, chars, rng = synthetic_world()
    vocab = Vocabulary(chars=tuple(chars))
    dataset = build_glyph_dataset(decomp, vocab, seed=7)
    print(f"dataset: {len(dataset.pairs)} pairs, "
          f"{len(dataset.split_pairs('test'))} held out")

    config = ProbeConfig(layers=2, seed=0, hidden_dim=64, epochs=15)
    aware = aware_table(decomp, components, chars, rng)
    control = random_table(Vocabulary(chars=aware.chars), DIM, seed=99)

    for name, table in (("aware", aware), ("control", control)):
        _, report = train_probe(config, dataset, table)
        print(f"\n== {name} embeddings ==")
        print(f"  first-epoch loss {report.epoch_losses[0]:.4f} -> "
              f"final {report.epoch_losses[-1]:.4f}")
        print(f"  test accuracy {report.final_accuracy:.4f}")

    print("\nthe aware table encodes the containment relation; the control")
    print("table cannot beat chance because the split hides every probed")
    print("character from training")


if __name__ == "__main__":
    main()
