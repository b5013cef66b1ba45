"""Successor-profile invariance and derivation of weakly periodic systems.

The load-bearing fact: for specs whose A1 and A2 are singletons, the coset
classes of a vertex's successors are determined by the pair (class of the
vertex, class of its parent).  That makes the successor-class counts per
state pair well defined, which is exactly the coefficient table of the
weakly periodic field equations.  Non-singleton specs break the property;
the checker reports witnesses and the derivation refuses to certify.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from cayleygibbs.cosets import CosetLabel, SubgroupSpec, label
from cayleygibbs.words import IDENTITY, Word, enumerate_ball, parent, successors

StatePair = tuple[int, int]


class IllDefinedSystemError(RuntimeError):
    """Successor counts differed between representatives of one state."""


def successor_labels(x: Word, spec: SubgroupSpec) -> tuple[CosetLabel, ...]:
    """Coset classes of the successors of x, in ascending generator order."""
    return tuple(label(y, spec) for y in successors(x, spec.k))


def state_of(x: Word, spec: SubgroupSpec) -> StatePair:
    """(class of x, class of its parent); undefined for the root."""
    return (label(x, spec).residue, label(parent(x), spec).residue)


@dataclass(frozen=True)
class InvarianceViolation:
    x: Word
    y: Word
    profile_x: tuple[int, ...]
    profile_y: tuple[int, ...]
    shared_positions_equal: bool


@dataclass(frozen=True)
class InvarianceReport:
    holds: bool
    radius: int
    words_checked: int
    states_seen: int
    violations: tuple[InvarianceViolation, ...]


def check_invariance(
    spec: SubgroupSpec, radius: int, max_vertices: int | None = None
) -> InvarianceReport:
    """Test whether successor class profiles depend only on the state pair.

    Equivalent to checking every pair x, y with equal classes and equal
    parent classes: profiles are compared as multisets of class residues
    (the first representative of each state stands in for x).  Each
    violation also records whether the profiles agree at the generator
    positions both words share, as a positional diagnostic.
    """
    if radius < 2:
        raise ValueError(f"radius must be >= 2, got {radius}")
    first_rep: dict[StatePair, tuple[Word, tuple[int, ...], tuple[int, ...]]] = {}
    violations: list[InvarianceViolation] = []
    words_checked = 0
    for x in enumerate_ball(spec.k, radius, max_vertices).vertices():
        if x == IDENTITY:
            continue
        words_checked += 1
        st = state_of(x, spec)
        profile = tuple(lab.residue for lab in successor_labels(x, spec))
        key = tuple(sorted(profile))
        if st not in first_rep:
            first_rep[st] = (x, key, profile)
            continue
        rep, rep_key, rep_profile = first_rep[st]
        if key != rep_key:
            violations.append(
                InvarianceViolation(
                    x=rep,
                    y=x,
                    profile_x=rep_profile,
                    profile_y=profile,
                    shared_positions_equal=_shared_positions_equal(rep, x, spec),
                )
            )
    return InvarianceReport(
        holds=not violations,
        radius=radius,
        words_checked=words_checked,
        states_seen=len(first_rep),
        violations=tuple(violations),
    )


def _shared_positions_equal(x: Word, y: Word, spec: SubgroupSpec) -> bool:
    """Compare successor classes at the generator indices both words keep."""
    skip = {x[-1], y[-1]}
    for i in range(1, spec.k + 2):
        if i in skip:
            continue
        if label(x + (i,), spec).residue != label(y + (i,), spec).residue:
            return False
    return True


@dataclass(frozen=True)
class ClassCountReport:
    passed: bool
    radius: int
    class_vectors: dict[int, tuple[int, ...]]
    permutations_found: bool


def check_class_counts(
    spec: SubgroupSpec, radius: int, max_vertices: int | None = None
) -> ClassCountReport:
    """Verify neighbor-class counts are constant on each coset class.

    Also verifies a coordinate permutation matching every vertex's count
    vector to the root's exists.  Only meaningful for singleton specs.
    """
    from cayleygibbs.cosets import matching_permutation, neighbor_counts

    if not spec.is_singleton:
        raise ValueError("class count equality requires singleton A1 and A2")
    base = neighbor_counts(IDENTITY, spec)
    vectors: dict[int, tuple[int, ...]] = {}
    passed = True
    permutations = True
    for x in enumerate_ball(spec.k, radius, max_vertices).vertices():
        r = label(x, spec).residue
        q = neighbor_counts(x, spec)
        if vectors.setdefault(r, q) != q:
            passed = False
        if matching_permutation(base, q) is None:
            permutations = False
    return ClassCountReport(
        passed=passed and permutations,
        radius=radius,
        class_vectors=vectors,
        permutations_found=permutations,
    )


@dataclass(frozen=True)
class WeaklyPeriodicSystem:
    """States (class, parent class) with successor-class-count rows.

    ``counts[i][j]`` is how many successors of a vertex in ``states[i]``
    land in ``states[j]``.  Rows sum to k.  ``reps_checked`` records how
    many ball representatives confirmed each row (the well-definedness
    certificate); it is None for systems loaded from JSON.
    """

    k: int
    s: int
    states: tuple[StatePair, ...]
    counts: tuple[tuple[int, ...], ...]
    spec: SubgroupSpec | None = None
    reps_checked: tuple[int, ...] | None = None

    def state_index(self, state: StatePair) -> int:
        return self.states.index(state)

    def row(self, state: StatePair) -> dict[StatePair, int]:
        i = self.state_index(state)
        return {
            self.states[j]: n for j, n in enumerate(self.counts[i]) if n
        }

    def to_json(self) -> str:
        payload = {
            "states": [list(st) for st in self.states],
            "counts": {
                f"{st[0]},{st[1]}": {
                    f"{su[0]},{su[1]}": n for su, n in self.row(st).items()
                }
                for st in self.states
            },
            "k": self.k,
            "s": self.s,
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "WeaklyPeriodicSystem":
        payload = json.loads(text)
        states = tuple(tuple(st) for st in payload["states"])
        index = {st: i for i, st in enumerate(states)}
        counts = [[0] * len(states) for _ in states]
        for key, row in payload["counts"].items():
            i = index[tuple(int(p) for p in key.split(","))]
            for target, n in row.items():
                counts[i][index[tuple(int(p) for p in target.split(","))]] = n
        return cls(
            k=payload["k"],
            s=payload["s"],
            states=states,
            counts=tuple(tuple(r) for r in counts),
        )


def derive_system(
    spec: SubgroupSpec,
    radius: int | None = None,
    rep_cap: int = 12,
    allow_nonsingleton: bool = False,
) -> WeaklyPeriodicSystem:
    """Derive the weakly periodic system by walking the tree.

    Breadth-first walk from the root collects up to ``rep_cap``
    representatives of every state pair within the radius (default 4s+4)
    and counts the successor states of each.  Every state must be
    confirmed by at least three representatives with identical counts,
    otherwise the system is rejected as ill defined.
    """
    if spec.k == 1:
        raise ValueError("k = 1 gives a line graph with no branching; unsupported")
    if not spec.is_singleton and not allow_nonsingleton:
        raise ValueError(
            "derivation requires singleton A1 and A2 (pass allow_nonsingleton to probe anyway)"
        )
    if radius is None:
        radius = 4 * spec.s + 4
    reps: dict[StatePair, list[Word]] = {}
    frontier: list[Word] = [IDENTITY]
    for _ in range(radius):
        nxt: list[Word] = []
        for w in frontier:
            parent_residue = label(w, spec).residue
            for child in successors(w, spec.k):
                st = (label(child, spec).residue, parent_residue)
                bucket = reps.setdefault(st, [])
                if len(bucket) < rep_cap:
                    bucket.append(child)
                    nxt.append(child)
        frontier = nxt

    states = tuple(sorted(reps))
    rows: list[tuple[int, ...]] = []
    checked: list[int] = []
    for st in states:
        bucket = reps[st]
        if len(bucket) < 3:
            raise IllDefinedSystemError(
                f"state {st} has only {len(bucket)} representatives within radius {radius}"
            )
        per_rep = [_successor_state_counts(x, spec) for x in bucket]
        for other, rep_word in zip(per_rep[1:], bucket[1:]):
            if other != per_rep[0]:
                raise IllDefinedSystemError(
                    f"state {st}: representative {bucket[0]} gives {dict(per_rep[0])} "
                    f"but {rep_word} gives {dict(other)}; successor counts are "
                    "representative-dependent, so the invariance property fails"
                )
        row = [0] * len(states)
        for target, n in per_rep[0].items():
            if target[1] != st[0]:
                raise IllDefinedSystemError(
                    f"successor state {target} of {st} does not descend from class {st[0]}"
                )
            row[states.index(target)] = n
        if sum(row) != spec.k:
            raise IllDefinedSystemError(f"state {st}: row sums to {sum(row)}, expected {spec.k}")
        rows.append(tuple(row))
        checked.append(len(bucket))
    return WeaklyPeriodicSystem(
        k=spec.k,
        s=spec.s,
        states=states,
        counts=tuple(rows),
        spec=spec,
        reps_checked=tuple(checked),
    )


def _successor_state_counts(x: Word, spec: SubgroupSpec) -> Counter:
    own = label(x, spec).residue
    return Counter(
        (label(child, spec).residue, own) for child in successors(x, spec.k)
    )


def reference_counts(k: int) -> dict[StatePair, dict[StatePair, int]]:
    """The nine-state successor-count table for s = 1 singleton specs.

    States are (class, parent class) over classes 0..2; the table holds for
    every k >= 2 with the same sparsity pattern.
    """
    table: dict[StatePair, dict[StatePair, int]] = {}
    for i in range(3):
        down = (i - 1) % 3
        up = (i + 1) % 3
        table[(i, i)] = {(i, i): k - 2, (up, i): 1, (down, i): 1}
        table[(i, down)] = {(i, i): k - 1, (up, i): 1}
        table[(i, up)] = {(i, i): k - 1, (down, i): 1}
    return {st: {su: n for su, n in row.items() if n} for st, row in sorted(table.items())}


def matches_reference(system: WeaklyPeriodicSystem) -> bool:
    """Whether a derived s = 1 system equals the hardcoded nine-state table."""
    if system.s != 1:
        return False
    expected = reference_counts(system.k)
    if set(system.states) != set(expected):
        return False
    return all(system.row(st) == expected[st] for st in system.states)
