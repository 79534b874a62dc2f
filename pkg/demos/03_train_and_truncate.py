"""Train a small encoder and show that truncation is free.

The encoder is trained once at full dimension; any prefix of the output
vector is itself a complete embedding. No re-training, no separate models:
encode at 64, keep the first 16 floats, and you have the 16-dim embedding
bit for bit.
"""

import numpy as np

from nestembed import (
    TrainConfig,
    deterministic_split,
    encode,
    init_model,
    make_synthetic_triplets,
    train,
    triplet_accuracy,
)

LADDER = (64, 32, 16)


def main() -> None:
    rows = make_synthetic_triplets(4, 120, seed=42)
    split = deterministic_split(rows, (0.8, 0.1, 0.1), seed=42)
    print(f"synthetic triplets: {len(rows)} "
          f"(train {len(split.train)} / validation {len(split.validation)} "
          f"/ test {len(split.test)})")

    config = TrainConfig(batch_size=32, epochs=2, ladder=LADDER, seed=7)
    model, report = train(init_model(config), split.train, config)
    print(f"trained in {report.duration_seconds:.2f}s, "
          f"{report.batches_per_epoch} batches/epoch")
    print(f"epoch mean losses: {[round(v, 4) for v in report.epoch_mean_losses]}")
    print()

    print("held-out triplet accuracy by dimension:")
    for m in LADDER:
        acc = triplet_accuracy(model, split.test, m)
        print(f"  dim {m:3d}: {acc:.4f}")
    print()

    text = split.test[0].anchor
    full = encode(model, text)
    print(f"encode({text!r}) -> {full.shape} {full.dtype}")
    for m in LADDER:
        sliced = encode(model, text, m)
        matches = np.array_equal(sliced, full[:m])
        print(f"  first {m:3d} coordinates identical to encode(text, {m}): {matches}")


if __name__ == "__main__":
    main()
