"""The free monoid on {1,...,N}: finite words, prefixes, shifts, and generation cuts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .arith import rat_str
from .errors import DepthCapError

DEFAULT_WORD_CAP = 32


@dataclass(frozen=True, order=True)
class Word:
    """Finite word over the alphabet {1,...,N}; symbols are stored 1-based."""

    symbols: tuple = ()
    alphabet: int = 2

    def __post_init__(self):
        for s in self.symbols:
            if not 1 <= s <= self.alphabet:
                raise ValueError(f"symbol {s} outside alphabet of size {self.alphabet}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def is_empty(self) -> bool:
        return not self.symbols

    def parent(self) -> "Word":
        """Drop the last symbol (the word written i^-)."""
        if not self.symbols:
            raise ValueError("the empty word has no parent")
        return Word(self.symbols[:-1], self.alphabet)

    def shift(self, j: int) -> "Word":
        """Drop the first j symbols (the shift sigma^j)."""
        if not 0 <= j <= len(self.symbols):
            raise ValueError(f"shift count {j} outside 0..{len(self.symbols)}")
        return Word(self.symbols[j:], self.alphabet)

    def prefix(self, n: int) -> "Word":
        if not 0 <= n <= len(self.symbols):
            raise ValueError(f"prefix length {n} outside 0..{len(self.symbols)}")
        return Word(self.symbols[:n], self.alphabet)

    def child(self, s: int) -> "Word":
        return Word(self.symbols + (s,), self.alphabet)

    def concat(self, o: "Word") -> "Word":
        return Word(self.symbols + o.symbols, self.alphabet)

    def is_prefix_of(self, o: "Word") -> bool:
        return o.symbols[: len(self.symbols)] == self.symbols

    def display(self) -> str:
        if not self.symbols:
            return "∅"
        if self.alphabet <= 9:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)

    def __repr__(self) -> str:
        return f"Word({self.display()})"

    @classmethod
    def parse(cls, text: str, alphabet: int) -> "Word":
        text = text.strip()
        if text in ("", "∅"):
            return cls((), alphabet)
        if "," in text:
            syms = tuple(int(t) for t in text.split(","))
        else:
            syms = tuple(int(ch) for ch in text)
        return cls(syms, alphabet)


def parent(w: Word) -> Word:
    return w.parent()


def shift(w: Word, j: int) -> Word:
    return w.shift(j)


def repeated(symbol: int, count: int, alphabet: int) -> Word:
    """The padding word with one symbol repeated, e.g. l(q) = 1...1."""
    return Word((symbol,) * count, alphabet)


def all_words(alphabet: int, length: int) -> Iterator[Word]:
    """All words of exactly the given length, in lexicographic order."""
    if length == 0:
        yield Word((), alphabet)
        return
    for prefix in all_words(alphabet, length - 1):
        for s in range(1, alphabet + 1):
            yield prefix.child(s)


@dataclass(frozen=True)
class GenerationCut:
    """Prefix-free, complete word set where cylinder diameter first drops to <= scale."""

    words: tuple
    scale: Fraction
    diameter_source: str = "enclosure-upper"

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def covering_prefix(self, stream: Sequence[int]) -> Word:
        """The unique cut word that prefixes the given infinite-word sample."""
        matches = [
            w for w in self.words if tuple(stream[: len(w)]) == w.symbols
        ]
        if len(matches) != 1:
            raise AssertionError(
                f"cut is not a partition at stream {stream[:8]}...: {len(matches)} matches"
            )
        return matches[0]


def generation_cut(
    system,
    r: Fraction,
    diameter_source: str = "enclosure-upper",
    max_len: int = DEFAULT_WORD_CAP,
) -> GenerationCut:
    """The words with diam(phi_w(F)) <= r < diam(phi_parent(F)) under one diameter source.

    `system` must expose `n_maps` and `cylinder_diam_bounds(word) -> RationalInterval`.
    The chosen source (certified upper bound by default, sample lower bound with
    "sample-lower") is applied consistently so the cut is prefix-free and complete.
    For r at or above the attractor diameter the cut is the full first generation.
    """
    if diameter_source not in ("enclosure-upper", "sample-lower"):
        raise ValueError(f"unknown diameter source {diameter_source!r}")
    r = Fraction(r)
    if r <= 0:
        raise ValueError("cut scale must be positive")
    n = system.n_maps

    def diam_of(w: Word) -> Fraction:
        if diameter_source == "enclosure-upper":
            return system.cylinder_diam_upper(w)
        return system.cylinder_diam_bounds(w).lo

    root = Word((), n)
    if diam_of(root) <= r:
        return GenerationCut(tuple(root.child(s) for s in range(1, n + 1)), r, diameter_source)

    out = []
    stack = [root]
    while stack:
        w = stack.pop()
        for s in range(1, n + 1):
            c = w.child(s)
            if diam_of(c) <= r:
                out.append(c)
            else:
                if len(c) >= max_len:
                    raise DepthCapError(
                        f"generation cut at scale {rat_str(r)} exceeds word cap {max_len}"
                    )
                stack.append(c)
    out.sort()
    return GenerationCut(tuple(out), r, diameter_source)
