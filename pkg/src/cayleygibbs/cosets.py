"""Odd-index subgroups of the tree group and their coset classes.

A subgroup spec picks two disjoint nonempty generator sets A1, A2 and a level
s >= 1.  Collapsing every A1-letter to the least A1-generator, every A2-letter
to the least A2-generator and dropping the rest is a homomorphism onto the
subgroup generated by those two letters; its images are alternating words.
Words whose image has length divisible by 2s+1 form a subgroup of index 2s+1,
and the left cosets are labeled by a signed length residue: +length for images
starting with the A1 representative, -length for images starting with the A2
representative, taken mod 2s+1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from cayleygibbs.words import (
    IDENTITY,
    Word,
    enumerate_ball,
    inverse,
    multiply,
    neighborhood,
    reduce_word,
    word_to_str,
)


class SpecError(ValueError):
    """Raised for an invalid subgroup spec."""


@dataclass(frozen=True)
class SubgroupSpec:
    """Parameters (k, s, A1, A2) selecting one odd-index subgroup.

    A1 and A2 must be disjoint nonempty subsets of {1..k+1}; the letters in
    neither set form the residual set A0, which may hold at most k-1 letters.
    """

    k: int
    s: int
    a1: frozenset[int] = field()
    a2: frozenset[int] = field()

    def __init__(self, k: int, s: int, a1: Iterable[int], a2: Iterable[int]):
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a1", frozenset(a1))
        object.__setattr__(self, "a2", frozenset(a2))
        self._validate()

    def _validate(self) -> None:
        if self.k < 1:
            raise SpecError(f"k must be >= 1, got {self.k}")
        if self.s < 1:
            raise SpecError(f"s must be >= 1, got {self.s}")
        letters = set(range(1, self.k + 2))
        if not self.a1 or not self.a2:
            raise SpecError("A1 and A2 must both be nonempty")
        if not self.a1 <= letters or not self.a2 <= letters:
            raise SpecError(f"A1 and A2 must be subsets of 1..{self.k + 1}")
        if self.a1 & self.a2:
            raise SpecError("A1 and A2 must be disjoint")
        if len(self.a0) > self.k - 1:
            raise SpecError(f"residual set {sorted(self.a0)} exceeds k-1 letters")

    @property
    def a0(self) -> frozenset[int]:
        return frozenset(range(1, self.k + 2)) - self.a1 - self.a2

    @property
    def m1(self) -> int:
        return min(self.a1)

    @property
    def m2(self) -> int:
        return min(self.a2)

    @property
    def index(self) -> int:
        """Number of coset classes."""
        return 2 * self.s + 1

    @property
    def is_singleton(self) -> bool:
        return len(self.a1) == 1 and len(self.a2) == 1

    def to_json(self) -> str:
        payload = {
            "k": self.k,
            "s": self.s,
            "A1": sorted(self.a1),
            "A2": sorted(self.a2),
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "SubgroupSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"bad spec JSON: {exc}") from None
        if not isinstance(payload, dict):
            raise SpecError("spec JSON must be an object")
        missing = {"k", "s", "A1", "A2"} - payload.keys()
        if missing:
            raise SpecError(f"spec JSON missing keys: {sorted(missing)}")
        return cls(k=payload["k"], s=payload["s"], a1=payload["A1"], a2=payload["A2"])


@dataclass(frozen=True)
class CosetLabel:
    """Coset class: residue in 0..2s and its canonical representative word.

    Residue 0 is the subgroup itself (representative e).  Residues 1..s have
    representatives alternating from the A1 letter with that length; residues
    s+1..2s alternate from the A2 letter with length 2s+1-residue.
    """

    residue: int
    rep: Word

    def __str__(self) -> str:
        return f"K{self.residue}[{word_to_str(self.rep)}]"


def _alternating(first: int, second: int, length: int) -> Word:
    return tuple(first if i % 2 == 0 else second for i in range(length))


def class_representative(residue: int, spec: SubgroupSpec) -> Word:
    """Canonical representative word of a coset class."""
    n = spec.index
    if not 0 <= residue < n:
        raise ValueError(f"residue must be in 0..{n - 1}, got {residue}")
    if residue == 0:
        return IDENTITY
    if residue <= spec.s:
        return _alternating(spec.m1, spec.m2, residue)
    return _alternating(spec.m2, spec.m1, n - residue)


def _rep_residue(rep: Word, spec: SubgroupSpec) -> int:
    if not rep:
        return 0
    if rep[0] == spec.m1:
        return len(rep)
    return spec.index - len(rep)


def project(x: Word, spec: SubgroupSpec) -> Word:
    """Collapse a word onto the two class generators and reduce.

    A1-letters map to the least A1-generator, A2-letters to the least
    A2-generator, residual letters vanish.  This is a homomorphism, and its
    reduced images alternate between the two generators.
    """
    mapped = []
    for c in x:
        if c in spec.a1:
            mapped.append(spec.m1)
        elif c in spec.a2:
            mapped.append(spec.m2)
        elif not 1 <= c <= spec.k + 1:
            raise ValueError(f"generator index {c} out of range 1..{spec.k + 1}")
    return reduce_word(mapped)


def fold_alternating(w: Word, spec: SubgroupSpec) -> CosetLabel:
    """Reduce an alternating word to its class representative recursively.

    Words of length at most s are canonical; lengths s+1..2s swap to the
    complementary representative starting from the other generator.  Longer
    words fold their trailing 2s letters down to a single letter and recurse,
    which removes one full 2s+1 block per step.
    """
    s = spec.s
    pair = {spec.m1, spec.m2}
    if any(c not in pair for c in w) or reduce_word(w) != w:
        raise ValueError("fold_alternating expects a reduced two-letter word")
    if len(w) == 0:
        return CosetLabel(0, IDENTITY)
    if len(w) <= 2 * s:
        if len(w) <= s:
            rep = w
        else:
            other = spec.m2 if w[0] == spec.m1 else spec.m1
            second = spec.m1 if other == spec.m2 else spec.m2
            rep = _alternating(other, second, 2 * s + 1 - len(w))
        return CosetLabel(_rep_residue(rep, spec), rep)
    folded = fold_alternating(w[-2 * s :], spec)
    return fold_alternating(multiply(w[: -2 * s], folded.rep), spec)


def _image_state(x: Word, spec: SubgroupSpec) -> tuple[int, int]:
    """(first letter, length) of project(x, spec), without building the word.

    The reduced image alternates between the two generators, so it is fully
    determined by its first letter and its length; appending one collapsed
    letter either extends it or cancels its last letter.
    """
    a1, a2 = spec.a1, spec.a2
    m1 = spec.m1
    start = 0  # 0 = empty, 1 = starts with m1, 2 = starts with m2
    length = 0
    for c in x:
        if c in a1:
            sym = 1
        elif c in a2:
            sym = 2
        elif 1 <= c <= spec.k + 1:
            continue
        else:
            raise ValueError(f"generator index {c} out of range 1..{spec.k + 1}")
        if length == 0:
            start = sym
            length = 1
        else:
            last = start if length % 2 == 1 else 3 - start
            if sym == last:
                length -= 1
                if length == 0:
                    start = 0
            else:
                length += 1
    return start, length


def label(x: Word, spec: SubgroupSpec) -> CosetLabel:
    """Coset class of a word, by the signed length residue of its image."""
    start, length = _image_state(x, spec)
    n = spec.index
    residue = length % n if start != 2 else (-length) % n
    return CosetLabel(residue, class_representative(residue, spec))


def is_member(x: Word, spec: SubgroupSpec) -> bool:
    """Whether x belongs to the subgroup (class residue 0)."""
    return label(x, spec).residue == 0


def coset_classes(spec: SubgroupSpec, radius: int, max_vertices: int | None = None) -> dict[int, list[Word]]:
    """Partition the ball of the given radius into coset classes.

    Radius must be at least 2s so every class is populated; the result maps
    each residue to its members in ball enumeration order.
    """
    if radius < 2 * spec.s:
        raise ValueError(f"radius must be >= 2s = {2 * spec.s} to populate every class")
    classes: dict[int, list[Word]] = {r: [] for r in range(spec.index)}
    for x in enumerate_ball(spec.k, radius, max_vertices).vertices():
        classes[label(x, spec).residue].append(x)
    return classes


@dataclass(frozen=True)
class CosetCheckReport:
    """Outcome of the brute-force left-coset and closure verification."""

    passed: bool
    radius: int
    pairs_checked: int
    closure_pairs_checked: int
    first_violation: tuple[Word, Word] | None


def check_cosets(spec: SubgroupSpec, radius: int, max_vertices: int | None = None) -> CosetCheckReport:
    """Verify label classes against the subgroup by direct word arithmetic.

    For every pair x, y in the ball: label(x) == label(y) iff y^-1 x is a
    member, which is the left-coset relation.  Additionally members must be
    closed under x y^-1.
    """
    words = list(enumerate_ball(spec.k, radius, max_vertices).vertices())
    residues = [label(x, spec).residue for x in words]
    pairs = 0
    violation = None
    for i, x in enumerate(words):
        for j, y in enumerate(words):
            pairs += 1
            same_coset = is_member(multiply(inverse(y), x), spec)
            if same_coset != (residues[i] == residues[j]):
                violation = (x, y)
                break
        if violation:
            break
    members = [x for i, x in enumerate(words) if residues[i] == 0]
    closure_pairs = 0
    if violation is None:
        for x in members:
            for y in members:
                closure_pairs += 1
                if not is_member(multiply(x, inverse(y)), spec):
                    violation = (x, y)
                    break
            if violation:
                break
    return CosetCheckReport(
        passed=violation is None,
        radius=radius,
        pairs_checked=pairs,
        closure_pairs_checked=closure_pairs,
        first_violation=violation,
    )


def neighbor_counts(x: Word, spec: SubgroupSpec) -> tuple[int, ...]:
    """How many of the k+1 nearest neighbors fall in each coset class."""
    counts = [0] * spec.index
    for y in neighborhood(x, spec.k):
        counts[label(y, spec).residue] += 1
    return tuple(counts)


def matching_permutation(base: tuple[int, ...], other: tuple[int, ...]) -> tuple[int, ...] | None:
    """Coordinate permutation p with base[p[i]] == other[i], or None.

    Greedy over positions, so the lexicographically smallest permutation is
    returned when repeated counts allow several.  Equal vectors map to the
    identity.
    """
    if len(base) != len(other) or sorted(base) != sorted(other):
        return None
    used = [False] * len(base)
    perm = []
    for value in other:
        for j, b in enumerate(base):
            if not used[j] and b == value:
                used[j] = True
                perm.append(j)
                break
    return tuple(perm)
