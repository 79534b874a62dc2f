"""Arabic-aware text normalization and hashed character n-gram features.

Normalization rules (fixed, versioned with the package):
  1. Unicode canonical composition (NFC).
  2. Alef variants -> bare alef:  آ (U+0622), أ (U+0623), إ (U+0625) -> ا (U+0627)
  3. Alef maqsura -> ya:          ى (U+0649) -> ي (U+064A)
  4. Remove tashkeel (diacritics) U+064B..U+0652 and tatweel U+0640.
  5. Trim and collapse whitespace runs to a single space.

The featurizer replaces sub-word tokenization at desk scale: every character
n-gram of the boundary-marked text ("^" + text + "$") is hashed with 64-bit
FNV-1a into a power-of-two feature space.

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .errors import ConfigError

# Tashkeel (fathatan .. sukun) plus tatweel; removed outright.
_STRIP_RE = re.compile(r"[ً-ْـ]")

# hamza-carrying alef forms and madda collapse to bare alef
_ALEF_MAP = {
    0x0622: 0x0627,  # آ alef with madda
    0x0623: 0x0627,  # أ alef with hamza above
    0x0625: 0x0627,  # إ alef with hamza below
    0x0649: 0x064A,  # ى alef maqsura -> ي ya
}

_WS_RE = re.compile(r"\s+")

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class NormalizedText:
    """A string that has passed normalize_arabic. Construct via normalize_arabic."""

    value: str


@dataclass(frozen=True)
class FeatureVector:
    """Sparse bag of hashed n-grams.

    indices are strictly increasing ids in [0, feature_space); counts is the
    parallel list of occurrence counts (all >= 1).
    """

    indices: tuple[int, ...]
    counts: tuple[int, ...]
    feature_space: int

    def __post_init__(self):
        if len(self.indices) != len(self.counts):
            raise ValueError("indices and counts must be parallel")
        if any(c < 1 for c in self.counts):
            raise ValueError("counts must all be >= 1")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")

    @property
    def total(self) -> int:
        return sum(self.counts)


def _normalize_pass(s: str) -> str:
    s = unicodedata.normalize("NFC", s)
    s = s.translate(_ALEF_MAP)
    s = _STRIP_RE.sub("", s)
    return _WS_RE.sub(" ", s).strip()


def normalize_arabic(raw: str) -> NormalizedText:
    """Normalize Arabic text per the module rules; idempotent by construction.

    The pass is iterated to a fixed point because NFC can re-compose a bare
    alef with a stray combining hamza/madda (U+0653..U+0655) back into a
    mapped variant; each extra pass strictly shrinks the string, so the loop
    terminates.
    """
    s = raw
    for _ in range(32):
        out = _normalize_pass(s)
        if out == s:
            return NormalizedText(out)
        s = out
    raise RuntimeError("normalization did not converge")  # unreachable in practice


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over raw bytes."""
    h = FNV64_OFFSET
    for b in data:
        h = ((h ^ b) * FNV64_PRIME) & _MASK64
    return h


def hash_ngrams(text: NormalizedText, n_min: int = 2, n_max: int = 4,
                feature_space: int = 1 << 15) -> FeatureVector:
    """Hash every character n-gram of the boundary-marked text into a FeatureVector.

    The text is wrapped as "^" + text + "$" before extraction so word-edge
    n-grams are distinct from interior ones. Index = fnv1a64(utf-8 bytes) mod
    feature_space. Empty text yields an empty FeatureVector (no markers added).
    """
    if n_min < 1 or n_min > n_max:
        raise ConfigError(f"need 1 <= n_min <= n_max, got ({n_min}, {n_max})")
    if feature_space <= 0 or feature_space & (feature_space - 1):
        raise ConfigError(f"feature_space must be a power of two, got {feature_space}")
    if not text.value:
        return FeatureVector((), (), feature_space)

    marked = "^" + text.value + "$"
    counts: dict[int, int] = {}
    for n in range(n_min, n_max + 1):
        for i in range(len(marked) - n + 1):
            idx = fnv1a64(marked[i:i + n].encode("utf-8")) % feature_space
            counts[idx] = counts.get(idx, 0) + 1
    items = sorted(counts.items())
    return FeatureVector(tuple(i for i, _ in items), tuple(c for _, c in items),
                         feature_space)


@dataclass(frozen=True)
class NormConfig:
    """Featurization settings carried by an encoder model."""

    n_min: int = 2
    n_max: int = 4
    feature_space: int = 1 << 15

    def __post_init__(self):
        if self.n_min < 1 or self.n_min > self.n_max:
            raise ConfigError(f"need 1 <= n_min <= n_max, got ({self.n_min}, {self.n_max})")
        f = self.feature_space
        if f <= 0 or f & (f - 1):
            raise ConfigError(f"feature_space must be a power of two, got {f}")

    def featurize(self, raw: str) -> FeatureVector:
        return hash_ngrams(normalize_arabic(raw), self.n_min, self.n_max,
                           self.feature_space)
