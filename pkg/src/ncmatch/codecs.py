"""Catalan-family combinatorics and advice-tape bit plumbing.

Binary trees, balanced (Dyck) words and 231-avoiding permutations are
interconvertible and countable; objects are shipped over the advice tape
as fixed-width ranks, with Elias delta available when the length is not
known to the reader.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import (
    CapExceeded,
    InvalidDyck,
    InvalidInstance,
    Not231Avoiding,
    RankOutOfRange,
    TapeExhausted,
    TruncatedCode,
)


def catalan(n: int) -> int:
    """The n-th Catalan number, exactly."""
    if n < 0:
        raise ValueError("catalan is defined for n >= 0")
    return comb(2 * n, n) // (n + 1)


def bits_for_universe(universe_size: int) -> int:
    """ceil(log2(universe_size)); 0 for a single-element universe."""
    if universe_size < 1:
        raise ValueError("universe must be nonempty")
    return (universe_size - 1).bit_length()


# ---------------------------------------------------------------------------
# binary trees


@dataclass(frozen=True)
class BinaryTree:
    """An ordered rooted binary tree node; children may be None."""

    left: "BinaryTree | None" = None
    right: "BinaryTree | None" = None

    @property
    def size(self) -> int:
        return 1 + tree_size(self.left) + tree_size(self.right)


def tree_size(t: BinaryTree | None) -> int:
    if t is None:
        return 0
    return 1 + tree_size(t.left) + tree_size(t.right)


def enumerate_trees(n: int) -> Iterator[BinaryTree | None]:
    """All ordered rooted binary trees with n nodes (None for n = 0)."""
    if n == 0:
        yield None
        return
    for ls in range(n):
        for left in enumerate_trees(ls):
            for right in enumerate_trees(n - 1 - ls):
                yield BinaryTree(left, right)


def tree_rank(t: BinaryTree | None) -> int:
    """Rank of t in the canonical order of trees of its size.

    Trees sort by left-subtree size, then left rank (major), then right
    rank (minor); this makes rank/unrank O(n) arithmetic steps.
    """
    if t is None:
        return 0
    n = tree_size(t)
    ls = tree_size(t.left)
    prefix = sum(catalan(k) * catalan(n - 1 - k) for k in range(ls))
    return prefix + tree_rank(t.left) * catalan(n - 1 - ls) + tree_rank(t.right)


def tree_unrank(n: int, r: int) -> BinaryTree | None:
    """Inverse of tree_rank over trees with n nodes."""
    if not 0 <= r < catalan(n):
        raise RankOutOfRange(f"rank {r} out of range for {n}-node trees")
    if n == 0:
        return None
    for ls in range(n):
        block = catalan(ls) * catalan(n - 1 - ls)
        if r < block:
            left_rank, right_rank = divmod(r, catalan(n - 1 - ls))
            return BinaryTree(
                tree_unrank(ls, left_rank),
                tree_unrank(n - 1 - ls, right_rank),
            )
        r -= block
    raise AssertionError("unreachable: rank was range checked")


# ---------------------------------------------------------------------------
# balanced words


@dataclass(frozen=True)
class DyckWord:
    """A balanced word over {0, 1}: equal counts, no prefix with more 1s."""

    bits: tuple[int, ...]

    def __post_init__(self):
        depth = 0
        for b in self.bits:
            if b not in (0, 1):
                raise InvalidDyck("bits must be 0 or 1")
            depth += 1 if b == 0 else -1
            if depth < 0:
                raise InvalidDyck("prefix with more 1s than 0s")
        if depth != 0:
            raise InvalidDyck("unbalanced word")

    @property
    def n(self) -> int:
        return len(self.bits) // 2

    def __iter__(self):
        return iter(self.bits)


def enumerate_dyck(n: int) -> Iterator[DyckWord]:
    """All balanced words of length 2n, in lexicographic order (0 < 1)."""

    def rec(slots: int, open_: int) -> Iterator[tuple[int, ...]]:
        if slots == 0:
            yield ()
            return
        if open_ < slots:
            for rest in rec(slots - 1, open_ + 1):
                yield (0,) + rest
        if open_ > 0:
            for rest in rec(slots - 1, open_ - 1):
                yield (1,) + rest

    for bits in rec(2 * n, 0):
        yield DyckWord(bits)


@lru_cache(maxsize=None)
def _ballot(slots: int, open_: int) -> int:
    """Completions of a prefix with `open_` unmatched 0s and `slots` left."""
    if open_ < 0 or open_ > slots:
        return 0
    if slots == 0:
        return 1
    return _ballot(slots - 1, open_ + 1) + _ballot(slots - 1, open_ - 1)


def dyck_rank(w: DyckWord) -> int:
    """Lexicographic rank among balanced words of the same length."""
    rank = 0
    open_ = 0
    slots = len(w.bits)
    for b in w.bits:
        slots -= 1
        if b == 1:
            # every word continuing with 0 here comes first
            rank += _ballot(slots, open_ + 1)
            open_ -= 1
        else:
            open_ += 1
    return rank


def dyck_unrank(n: int, r: int) -> DyckWord:
    if not 0 <= r < catalan(n):
        raise RankOutOfRange(f"rank {r} out of range for balanced words of length {2 * n}")
    bits = []
    open_ = 0
    for slots in range(2 * n - 1, -1, -1):
        zero_block = _ballot(slots, open_ + 1)
        if r < zero_block:
            bits.append(0)
            open_ += 1
        else:
            r -= zero_block
            bits.append(1)
            open_ -= 1
    return DyckWord(tuple(bits))


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    """A permutation of 1..n stored one-line as a tuple of values."""

    values: tuple[int, ...]

    def __post_init__(self):
        n = len(self.values)
        if sorted(self.values) != list(range(1, n + 1)):
            raise InvalidInstance(f"not a permutation of 1..{n}: {self.values}")

    @property
    def n(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]


def is_231_avoiding(perm: Permutation | Sequence[int]) -> tuple[bool, tuple[int, int, int] | None]:
    """Check for a 231 pattern: indices i < j < k with v[k] < v[i] < v[j].

    Returns (True, None) when avoiding, else (False, witness) where the
    witness is the first offending 0-based index triple in (j, i, k) scan
    order.  O(n^2).
    """
    v = list(perm)
    n = len(v)
    suffix_min = [0] * (n + 1)
    suffix_min[n] = n + 1  # sentinel above any value
    for t in range(n - 1, -1, -1):
        suffix_min[t] = min(v[t], suffix_min[t + 1])
    for j in range(1, n - 1):
        for i in range(j):
            if v[i] < v[j] and suffix_min[j + 1] < v[i]:
                k = next(t for t in range(j + 1, n) if v[t] < v[i])
                return False, (i, j, k)
    return True, None


_ENUM_CAP = 10


def enumerate_231_avoiding(n: int, cap: int = _ENUM_CAP) -> Iterator[Permutation]:
    """All 231-avoiding permutations of 1..n; there are catalan(n) of them.

    Generated structurally from the before-max/after-max decomposition, so
    no filtering over n! objects happens.
    """
    if n > cap:
        raise CapExceeded(f"enumeration capped at n <= {cap}")

    def rec(values: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        # values is an increasing run; in a 231-avoiding permutation every
        # value before the maximum is smaller than every value after it
        if not values:
            yield ()
            return
        m = len(values)
        for split in range(m):
            for before in rec(values[:split]):
                for after in rec(values[split : m - 1]):
                    yield before + (values[-1],) + after

    for vals in rec(tuple(range(1, n + 1))):
        yield Permutation(vals)


def perm_to_tree(perm: Permutation | Sequence[int]) -> BinaryTree | None:
    """Bijection from 231-avoiding permutations to binary trees.

    The maximum splits the one-line word; everything before it must be the
    smallest values, which is exactly 231-avoidance, applied recursively.
    """
    values = tuple(perm)

    def rec(vals: tuple[int, ...], lo: int) -> BinaryTree | None:
        if not vals:
            return None
        m = len(vals)
        pos = vals.index(max(vals))
        before, after = vals[:pos], vals[pos + 1 :]
        if sorted(before) != list(range(lo, lo + pos)):
            raise Not231Avoiding(f"{values} contains a 231 pattern")
        return BinaryTree(rec(before, lo), rec(after, lo + pos))

    return rec(values, 1)


def tree_to_perm(t: BinaryTree | None) -> Permutation:
    """Inverse of perm_to_tree."""

    def rec(node: BinaryTree | None, lo: int) -> tuple[int, ...]:
        if node is None:
            return ()
        ls = tree_size(node.left)
        rs = tree_size(node.right)
        before = rec(node.left, lo)
        after = rec(node.right, lo + ls)
        return before + (lo + ls + rs,) + after

    return Permutation(rec(t, 1))


def tree_to_dyck(t: BinaryTree | None) -> DyckWord:
    """Preorder encoding: node -> 0 <left> 1 <right>; single node is 01."""

    def rec(node: BinaryTree | None) -> tuple[int, ...]:
        if node is None:
            return ()
        return (0,) + rec(node.left) + (1,) + rec(node.right)

    return DyckWord(rec(t))


def dyck_to_tree(w: DyckWord) -> BinaryTree | None:
    """Inverse of tree_to_dyck."""
    bits = w.bits

    def rec(pos: int) -> tuple[BinaryTree | None, int]:
        if pos >= len(bits) or bits[pos] == 1:
            return None, pos
        left, pos = rec(pos + 1)
        # bits[pos] is the 1 closing this node
        right, pos = rec(pos + 1)
        return BinaryTree(left, right), pos

    tree, end = rec(0)
    if end != len(bits):
        raise InvalidDyck("trailing bits after parse")
    return tree


# ---------------------------------------------------------------------------
# advice tape


class AdviceTape:
    """A finite bit tape: the oracle appends, the algorithm reads forward.

    Reading past the written portion is a hard error so advice-length
    miscounts surface immediately instead of being zero-filled away.
    """

    def __init__(self, bits: Iterable[int] = ()):
        self._bits: list[int] = []
        self.cursor = 0
        self.write_bits(bits)

    @property
    def bits_written(self) -> int:
        return len(self._bits)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(self._bits)

    def write_bit(self, bit: int) -> None:
        if bit not in (0, 1):
            raise ValueError("tape bits must be 0 or 1")
        self._bits.append(bit)

    def write_bits(self, bits: Iterable[int]) -> None:
        for b in bits:
            self.write_bit(b)

    def read_bit(self) -> int:
        if self.cursor >= len(self._bits):
            raise TapeExhausted(
                f"read at {self.cursor} but only {len(self._bits)} bits written"
            )
        b = self._bits[self.cursor]
        self.cursor += 1
        return b

    def read_bits(self, k: int) -> list[int]:
        return [self.read_bit() for _ in range(k)]


def elias_delta_encode(m: int) -> list[int]:
    """Standard Elias delta code of a positive integer."""
    if m < 1:
        raise ValueError("Elias delta encodes integers >= 1")
    n_bits = m.bit_length()
    l_bits = n_bits.bit_length() - 1
    code = [0] * l_bits
    code += [int(c) for c in bin(n_bits)[2:]]
    code += [(m >> k) & 1 for k in range(n_bits - 2, -1, -1)]
    return code


def elias_delta_decode(tape: AdviceTape) -> int:
    """Read one Elias delta codeword off the tape."""
    try:
        l_bits = 0
        while tape.read_bit() == 0:
            l_bits += 1
        n_bits = 1
        for _ in range(l_bits):
            n_bits = (n_bits << 1) | tape.read_bit()
        m = 1
        for _ in range(n_bits - 1):
            m = (m << 1) | tape.read_bit()
        return m
    except TapeExhausted as exc:
        raise TruncatedCode("tape ended inside an Elias delta codeword") from exc


def write_ranked(tape: AdviceTape, rank: int, universe_size: int) -> int:
    """Write a rank as a fixed-width big-endian field; returns bits used."""
    if not 0 <= rank < universe_size:
        raise RankOutOfRange(f"rank {rank} outside universe of {universe_size}")
    width = bits_for_universe(universe_size)
    tape.write_bits((rank >> k) & 1 for k in range(width - 1, -1, -1))
    return width


def read_ranked(tape: AdviceTape, universe_size: int) -> int:
    """Read a fixed-width rank written by write_ranked."""
    width = bits_for_universe(universe_size)
    rank = 0
    for b in tape.read_bits(width):
        rank = (rank << 1) | b
    if rank >= universe_size:
        raise RankOutOfRange(f"decoded rank {rank} outside universe of {universe_size}")
    return rank
