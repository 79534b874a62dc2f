"""Tour of the nested classification and contrastive losses.

A single embedding is scored by a stack of linear classifiers, one per
ladder dimension, and the per-dimension cross-entropies are combined into
one training signal. The weight-tied variant shares one matrix across all
dimensions; the contrastive path does the same nesting over in-batch
softmax losses.
"""

import numpy as np

from nestembed import (
    ClassifierStack,
    LabeledExample,
    LossWeights,
    TripletBatch,
    matryoshka_wrap,
    mnrl,
    mrl_e_loss,
    mrl_loss,
    softmax_ce,
)

LADDER = (16, 8, 4)
N_CLASSES = 5


def main() -> None:
    rng = np.random.default_rng(42)
    example = LabeledExample(rng.normal(size=16), label=2)

    # independent stack: one (classes, m) matrix per ladder dimension
    stack = ClassifierStack.independent(
        {m: rng.normal(size=(N_CLASSES, m)) for m in LADDER})
    weights = LossWeights.uniform(LADDER)
    result = mrl_loss(example, stack, weights, LADDER)
    print(f"independent stack: {stack.parameter_count()} parameters")
    print(f"nested loss over ladder {LADDER}: {result.value:.6f}")

    per_dim = {
        m: softmax_ce(stack.weights[m] @ example.embedding[:m], 2).value
        for m in LADDER
    }
    print("per-dimension cross-entropies:")
    for m, v in per_dim.items():
        print(f"  dim {m:3d}: {v:.6f}")
    print(f"sum check: {sum(per_dim.values()):.6f}")
    print()

    # weight-tied stack: first m columns of one shared matrix serve dim m
    shared = rng.normal(size=(N_CLASSES, 16))
    tied = ClassifierStack.weight_tied(shared)
    tied_result = mrl_e_loss(example, shared, weights, LADDER)
    print(f"weight-tied stack: {tied.parameter_count()} parameters "
          f"({stack.parameter_count() - tied.parameter_count()} fewer)")
    print(f"weight-tied nested loss: {tied_result.value:.6f}")
    print(f"shared-matrix gradient shape: {tied_result.grads['weights'].shape}")
    print()

    # contrastive: every other positive in the batch is a negative
    batch = TripletBatch(
        anchors=rng.normal(size=(6, 16)),
        positives=rng.normal(size=(6, 16)),
        negatives=rng.normal(size=(6, 16)),
    )
    single = mnrl(batch)
    print(f"in-batch contrastive loss at full dim: {single.value:.6f}")

    wrapped = matryoshka_wrap(batch, LADDER, weights)
    print(f"nested contrastive loss over {LADDER}: {wrapped.value:.6f}")
    parts = [mnrl(batch.truncated(m)).value for m in LADDER]
    print(f"equals the sum of per-dim losses: {np.isclose(wrapped.value, sum(parts))}")


if __name__ == "__main__":
    main()
