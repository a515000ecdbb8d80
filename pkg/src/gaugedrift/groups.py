"""Finite gauge groups represented by explicit multiplication tables.

Only small groups are needed (cyclic Z_n and dihedral D_n); table lookup
keeps every downstream operator construction trivially correct. Elements
are plain integers in ``[0, order)`` with 0 always the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FiniteGroup",
    "WordSampler",
    "make_cyclic",
    "make_dihedral",
    "group_from_name",
    "element_order",
    "sample_uniform",
    "sample_word",
    "word_distribution",
    "total_variation",
]


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its Cayley table.

    ``mul_table[a, b]`` is the index of the product a*b and ``inv_table[a]``
    the index of the inverse of a. The identity is element 0 by convention.
    """

    name: str
    order: int
    mul_table: np.ndarray
    inv_table: np.ndarray
    identity: int = 0

    def __post_init__(self):
        mul = np.asarray(self.mul_table, dtype=np.int64)
        inv = np.asarray(self.inv_table, dtype=np.int64)
        n = self.order
        if n <= 0:
            raise ValueError(f"group order must be positive, got {n}")
        if mul.shape != (n, n):
            raise ValueError(f"mul_table shape {mul.shape} does not match order {n}")
        if inv.shape != (n,):
            raise ValueError(f"inv_table shape {inv.shape} does not match order {n}")
        if mul.min() < 0 or mul.max() >= n:
            raise ValueError("mul_table entries out of range (closure violated)")
        if inv.min() < 0 or inv.max() >= n:
            raise ValueError("inv_table entries out of range")
        e = self.identity
        elems = np.arange(n)
        if not (np.array_equal(mul[e], elems) and np.array_equal(mul[:, e], elems)):
            raise ValueError(f"element {e} is not a two-sided identity")
        if not (np.all(mul[elems, inv] == e) and np.all(mul[inv, elems] == e)):
            raise ValueError("inv_table does not satisfy the inverse law")
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul_table", mul)
        object.__setattr__(self, "inv_table", inv)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    def elements(self) -> range:
        return range(self.order)

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


def make_cyclic(n: int) -> FiniteGroup:
    """Cyclic group Z_n with additive composition modulo n."""
    if n < 1:
        raise ValueError(f"cyclic group needs n >= 1, got {n}")
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    inv = (-idx) % n
    return FiniteGroup(name=f"z{n}", order=n, mul_table=mul, inv_table=inv)


def make_dihedral(n: int) -> FiniteGroup:
    """Dihedral group D_n of order 2n.

    Indexing convention: elements 0..n-1 are the rotations r^k, elements
    n..2n-1 are the reflections s*r^k, with the relation s r s = r^{-1}.
    """
    if n < 1:
        raise ValueError(f"dihedral group needs n >= 1, got {n}")
    order = 2 * n
    mul = np.zeros((order, order), dtype=np.int64)
    for i in range(order):
        ri, refl_i = i % n, i // n
        for j in range(order):
            rj, refl_j = j % n, j // n
            if refl_i == 0 and refl_j == 0:
                mul[i, j] = (ri + rj) % n  # r^ri r^rj
            elif refl_i == 0 and refl_j == 1:
                mul[i, j] = n + (rj - ri) % n  # r^ri s r^rj = s r^(rj-ri)
            elif refl_i == 1 and refl_j == 0:
                mul[i, j] = n + (ri + rj) % n  # s r^ri r^rj
            else:
                mul[i, j] = (rj - ri) % n  # s r^ri s r^rj = r^(rj-ri)
    inv = np.concatenate([(-np.arange(n)) % n, n + np.arange(n)])
    return FiniteGroup(name=f"d{n}", order=order, mul_table=mul, inv_table=inv)


def group_from_name(name: str) -> FiniteGroup:
    """Build a group from its config-file name, ``z<n>`` or ``d<n>``."""
    s = name.strip().lower()
    if len(s) >= 2 and s[0] in ("z", "d") and s[1:].isdigit():
        n = int(s[1:])
        return make_cyclic(n) if s[0] == "z" else make_dihedral(n)
    raise ValueError(f"unrecognized group name {name!r} (expected z<n> or d<n>)")


def element_order(group: FiniteGroup, g: int) -> int:
    """Smallest k >= 1 with g^k equal to the identity."""
    if not 0 <= g < group.order:
        raise ValueError(f"element index {g} out of range for {group.name}")
    k = 1
    acc = g
    while acc != group.identity:
        acc = group.mul(acc, g)
        k += 1
    return k


def sample_uniform(group: FiniteGroup, rng: np.random.Generator) -> int:
    """Draw one element from the uniform (Haar) distribution on the group."""
    return int(rng.integers(group.order))


@dataclass(frozen=True, eq=False)
class WordSampler:
    """Approximate uniform sampling by multiplying random generator words.

    Each draw picks ``word_length`` generators uniformly (with repetition)
    and returns their ordered product. The generators must generate the
    whole group, which is checked by subgroup closure at construction.
    """

    group: FiniteGroup
    generators: tuple[int, ...]
    word_length: int

    def __post_init__(self):
        gens = tuple(int(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("at least one generator is required")
        for g in gens:
            if not 0 <= g < self.group.order:
                raise ValueError(f"generator index {g} out of range for {self.group.name}")
        if self.word_length < 0:
            raise ValueError(f"word_length must be >= 0, got {self.word_length}")
        if len(_generated_subgroup(self.group, gens)) != self.group.order:
            raise ValueError(
                f"generators {gens} generate a proper subgroup of {self.group.name}"
            )


def _generated_subgroup(group: FiniteGroup, gens: tuple[int, ...]) -> set[int]:
    seen = {group.identity, *gens}
    frontier = list(seen)
    while frontier:
        a = frontier.pop()
        for g in gens:
            for prod in (group.mul(a, g), group.mul(g, a)):
                if prod not in seen:
                    seen.add(prod)
                    frontier.append(prod)
    return seen


def sample_word(sampler: WordSampler, rng: np.random.Generator) -> int:
    """Product of ``word_length`` uniformly chosen generators (identity if 0)."""
    g = sampler.group.identity
    if sampler.word_length == 0:
        return g
    picks = rng.integers(len(sampler.generators), size=sampler.word_length)
    mul = sampler.group.mul_table
    for j in picks:
        g = int(mul[g, sampler.generators[j]])
    return g


def word_distribution(sampler: WordSampler) -> np.ndarray:
    """Exact distribution of sample_word, by repeated convolution.

    The single-step distribution is uniform over the generator list
    (duplicates add weight); convolving it ``word_length`` times under the
    group product gives the law of the word. Converges to uniform for any
    generating set as the length grows.
    """
    n = sampler.group.order
    step = np.zeros(n)
    for g in sampler.generators:
        step[g] += 1.0 / len(sampler.generators)
    dist = np.zeros(n)
    dist[sampler.group.identity] = 1.0
    for _ in range(sampler.word_length):
        out = np.zeros(n)
        np.add.at(out, sampler.group.mul_table, np.outer(dist, step))
        dist = out
    return dist


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Total-variation distance between two distributions on the same support."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())
