"""Walk through Arabic normalization and the hashed n-gram featurizer.

Shows why surface variants of the same phrase collapse to one normalized
form, and how that form becomes a sparse feature vector the encoder can
consume. Run directly; prints a short narration.
"""

from nestembed import fnv1a64, hash_ngrams, normalize_arabic

VARIANTS = [
    "أحب القراءة",       # alef with hamza above
    "احب القراءة",       # bare alef
    "أحبُّ القراءة",      # with diacritics
    "أحب  القراءة ",     # doubled space, trailing space
    "أحب القـــراءة",    # tatweel stretching
]


def main() -> None:
    print("surface variants of one phrase:")
    forms = set()
    for raw in VARIANTS:
        norm = normalize_arabic(raw)
        forms.add(norm.value)
        print(f"  {raw!r:40} -> {norm.value!r}")
    print(f"distinct normalized forms: {len(forms)}")
    print()

    text = normalize_arabic("قمر جميل")
    feats = hash_ngrams(text, n_min=2, n_max=4)
    print(f"text {text.value!r} produced {len(feats.indices)} distinct n-gram ids")
    print(f"feature space size: {feats.feature_space}")
    print(f"total n-gram occurrences: {feats.total}")
    print(f"first feature ids: {feats.indices[:8]}")
    print()

    # same text, same features, every time: the hash is a pure function
    again = hash_ngrams(text, n_min=2, n_max=4)
    print(f"featurization deterministic: {feats == again}")

    # boundary markers make prefixes and suffixes distinguishable
    h = fnv1a64("^قم".encode("utf-8"))
    print(f"fnv1a64('^قم') = {h:#018x} -> bucket {h % feats.feature_space}")


if __name__ == "__main__":
    main()
