"""Score a model against gold similarity judgments, dimension by dimension.

Builds the correlation grid: for every ladder dimension and similarity
metric, Pearson and Spearman correlation between model scores and gold
scores, plus a "max" column taking the best metric per dimension. The
interesting read is how slowly the numbers decay as dimensions shrink.
"""

from nestembed import (
    TrainConfig,
    as_scored_pairs,
    evaluate,
    init_model,
    make_synthetic_scored_pairs,
    make_synthetic_triplets,
    train,
)

LADDER = (64, 32, 16)


def main() -> None:
    triplets = make_synthetic_triplets(4, 120, seed=42)
    config = TrainConfig(batch_size=32, epochs=2, ladder=LADDER, seed=7)
    model, _ = train(init_model(config), triplets, config)

    pairs = as_scored_pairs(make_synthetic_scored_pairs(4, 150, seed=43))
    print(f"evaluating on {len(pairs)} scored pairs, gold in [0, 1]")
    report = evaluate(model, pairs)

    metrics = ("cosine", "manhattan", "euclidean", "dot", "max")
    print()
    print("spearman by dimension and metric:")
    print(f"{'dim':>5}  " + "  ".join(f"{k:>10}" for k in metrics))
    for dim in report.dimensions:
        row = [report.cells[dim][key].spearman for key in metrics]
        print(f"{dim:>5}  " + "  ".join(f"{v:>10.4f}" for v in row))

    print()
    print("csv form (first 3 lines):")
    for line in report.to_csv().splitlines()[:3]:
        print(f"  {line}")


if __name__ == "__main__":
    main()
