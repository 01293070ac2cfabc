"""Built-in rings and ring-building combinators.

Group rings, the golden-ratio ring, the two countably based rings driving
the classification arguments (here called the su2 tensor ring and the free
unitary word ring), truncated Verlinde rings, tensor and free products,
generated subrings and divisibility testing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .elements import RingElement
from .errors import NotAFusionSubringError, StructuralError
from .rings import (
    BasedRingTable,
    DimensionFunction,
    LazyBasedRing,
    Ring,
)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


# -- group rings ---------------------------------------------------------------


def group_ring(elements: list[str], mul: dict[tuple[str, str], str], name: str = "") -> BasedRingTable:
    """The based ring of a finite group; the table is checked to be a group."""
    elems = list(elements)
    eset = set(elems)
    if len(eset) != len(elems):
        raise StructuralError("duplicate group elements")
    for (a, b), c in mul.items():
        if a not in eset or b not in eset or c not in eset:
            raise StructuralError(f"multiplication entry ({a!r}, {b!r}) -> {c!r} outside the element set")
    for a in elems:
        for b in elems:
            if (a, b) not in mul:
                raise StructuralError(f"missing multiplication entry ({a!r}, {b!r})")

    unit = next((e for e in elems if all(mul[(e, g)] == g and mul[(g, e)] == g for g in elems)), None)
    if unit is None:
        raise StructuralError("table has no two-sided unit")
    inverse: dict[str, str] = {}
    for g in elems:
        inv = next((h for h in elems if mul[(g, h)] == unit and mul[(h, g)] == unit), None)
        if inv is None:
            raise StructuralError(f"element {g!r} has no inverse")
        inverse[g] = inv
    for a in elems:
        for b in elems:
            for c in elems:
                if mul[(mul[(a, b)], c)] != mul[(a, mul[(b, c)])]:
                    raise StructuralError(f"multiplication is not associative at ({a!r}, {b!r}, {c!r})")

    products = {(a, b): RingElement.basis(mul[(a, b)]) for a in elems for b in elems}
    dims = DimensionFunction({g: 1.0 for g in elems}, exactness="integer")
    return BasedRingTable(elems, unit, inverse, products, dims=dims, name=name or f"group[{len(elems)}]")


def cyclic_group_ring(n: int) -> BasedRingTable:
    """Group ring of Z/n with labels '0'..'n-1'."""
    if n < 1:
        raise ValueError("n must be positive")
    elems = [str(i) for i in range(n)]
    mul = {(str(a), str(b)): str((a + b) % n) for a in range(n) for b in range(n)}
    return group_ring(elems, mul, name=f"cyclic[{n}]")


def permutation_group_ring(n: int) -> BasedRingTable:
    """Group ring of the full symmetric group on n points (small n only)."""
    if not 1 <= n <= 5:
        raise ValueError("permutation_group_ring supports 1 <= n <= 5")
    perms = sorted(itertools.permutations(range(n)))
    label = {p: "".join(str(i) for i in p) for p in perms}
    elems = [label[p] for p in perms]
    mul = {}
    for p in perms:
        for q in perms:
            composed = tuple(p[q[i]] for i in range(n))
            mul[(label[p], label[q])] = label[composed]
    return group_ring(elems, mul, name=f"sym[{n}]")


# -- the golden ratio ring ------------------------------------------------------


def fibonacci() -> BasedRingTable:
    """Basis {1, phi} with trivial involution and phi*phi = 1 + phi."""
    products = {
        ("1", "1"): RingElement.basis("1"),
        ("1", "phi"): RingElement.basis("phi"),
        ("phi", "1"): RingElement.basis("phi"),
        ("phi", "phi"): RingElement((("1", 1), ("phi", 1))),
    }
    dims = DimensionFunction({"1": 1.0, "phi": GOLDEN_RATIO}, exactness="quadratic")
    return BasedRingTable(["1", "phi"], "1", {"1": "1", "phi": "phi"}, products, dims=dims, name="fibonacci")


# -- the su2 tensor ring on the natural numbers ----------------------------------


def _su2_product(a: str, b: str) -> RingElement:
    n, m = int(a), int(b)
    return RingElement((str(k), 1) for k in range(abs(n - m), n + m + 1, 2))


def _is_canonical_nat(label: str) -> bool:
    return label.isdigit() and (label == "0" or not label.startswith("0"))


def su2_ring() -> LazyBasedRing:
    """Clebsch-Gordan fusion on basis 0, 1, 2, ... with dimension n + 1."""
    return LazyBasedRing(
        name="su2",
        unit="0",
        product_fn=_su2_product,
        involution_fn=lambda a: a,
        level_fn=lambda a: int(a),
        enumerate_level_fn=lambda n: [str(n)],
        contains_fn=_is_canonical_nat,
        dims=lambda a: float(int(a) + 1),
        dim_exactness="integer",
        min_level_dim_fn=lambda n: float(n + 1),
        iterated_power_fn=None,
        metadata={"kind": "a1"},
    )


# -- the free unitary word ring ---------------------------------------------------

_WORD_UNIT = "e"


def _parse_word(label: str) -> tuple[str, ...]:
    if label == _WORD_UNIT:
        return ()
    letters = []
    i = 0
    while i < len(label):
        if label[i] != "p" or i + 1 >= len(label) or label[i + 1] not in "+-":
            raise ValueError(f"bad word label {label!r}")
        letters.append(label[i + 1])
        i += 2
    return tuple(letters)


def _format_word(letters: tuple[str, ...]) -> str:
    return "".join("p" + s for s in letters) or _WORD_UNIT


def _word_dual(letters: tuple[str, ...]) -> tuple[str, ...]:
    flip = {"+": "-", "-": "+"}
    return tuple(flip[s] for s in reversed(letters))


def _word_product(a: str, b: str) -> RingElement:
    w = _parse_word(a)
    z = _parse_word(b)
    terms = []
    for k in range(min(len(w), len(z)) + 1):
        x, u = w[: len(w) - k], w[len(w) - k :]
        if _word_dual(u) == z[:k]:
            terms.append((_format_word(x + z[k:]), 1))
    return RingElement(terms)


@lru_cache(maxsize=None)
def _word_dim(letters: tuple[str, ...]) -> int:
    # d(s w) = 2 d(w) - [w starts with the opposite sign] d(tail w)
    if not letters:
        return 1
    if len(letters) == 1:
        return 2
    head, rest = letters[0], letters[1:]
    value = 2 * _word_dim(rest)
    opposite = "-" if head == "+" else "+"
    if rest[0] == opposite:
        value -= _word_dim(rest[1:])
    return value


def _word_contains(label: str) -> bool:
    try:
        _parse_word(label)
        return True
    except ValueError:
        return False


def _word_power(label: str, n: int) -> str | None:
    """n-th power when it provably stays a single basis word (uniform sign)."""
    letters = _parse_word(label)
    if not letters or len(set(letters)) != 1:
        return None
    return _format_word(letters * n)


def free_unitary_ring() -> LazyBasedRing:
    """Words in p+, p- with the common-subword fusion rule; d(p+) = 2."""
    return LazyBasedRing(
        name="free_unitary",
        unit=_WORD_UNIT,
        product_fn=_word_product,
        involution_fn=lambda a: _format_word(_word_dual(_parse_word(a))),
        level_fn=lambda a: len(_parse_word(a)),
        enumerate_level_fn=lambda n: [
            _format_word(w) for w in itertools.product("+-", repeat=n)
        ],
        contains_fn=_word_contains,
        dims=lambda a: float(_word_dim(_parse_word(a))),
        dim_exactness="integer",
        min_level_dim_fn=lambda n: float(n + 1),
        iterated_power_fn=_word_power,
        metadata={"kind": "a2"},
    )


# -- truncated Verlinde rings -----------------------------------------------------


def su2_level(level: int) -> BasedRingTable:
    """The level-N truncation on basis 0..N: k*m runs from |k-m| to min(k+m, 2N-k-m)."""
    if level < 1:
        raise ValueError("level must be at least 1")
    labels = [str(k) for k in range(level + 1)]
    products = {}
    for k in range(level + 1):
        for m in range(level + 1):
            top = min(k + m, 2 * level - k - m)
            products[(str(k), str(m))] = RingElement(
                (str(j), 1) for j in range(abs(k - m), top + 1, 2)
            )
    denom = math.sin(math.pi / (level + 2))
    dims = DimensionFunction(
        {str(k): math.sin((k + 1) * math.pi / (level + 2)) / denom for k in range(level + 1)},
        exactness="numeric",
    )
    return BasedRingTable(labels, "0", {l: l for l in labels}, products, dims=dims, name=f"su2_level[{level}]")


# -- tensor products ---------------------------------------------------------------

PAIR_SEP = "|"


def pair_label(a: str, b: str) -> str:
    return f"{a}{PAIR_SEP}{b}"


def split_pair_label(label: str) -> tuple[str, str]:
    left, sep, right = label.partition(PAIR_SEP)
    if not sep:
        raise ValueError(f"not a pair label: {label!r}")
    return left, right


def tensor_product(r1: BasedRingTable, r2: BasedRingTable, name: str = "") -> BasedRingTable:
    """Componentwise products on the pair basis; dimensions multiply."""
    if r1.is_lazy or r2.is_lazy:
        raise StructuralError("tensor products require finite tables")
    basis = [pair_label(a, b) for a in r1.basis for b in r2.basis]
    unit = pair_label(r1.unit, r2.unit)
    involution = {
        pair_label(a, b): pair_label(r1.involution_of(a), r2.involution_of(b))
        for a in r1.basis
        for b in r2.basis
    }
    products = {}
    for a1 in r1.basis:
        for a2 in r2.basis:
            for b1 in r1.basis:
                for b2 in r2.basis:
                    p1 = r1.product(a1, b1)
                    p2 = r2.product(a2, b2)
                    terms = []
                    for c1, m1 in p1.items():
                        for c2, m2 in p2.items():
                            terms.append((pair_label(c1, c2), m1 * m2))
                    products[(pair_label(a1, a2), pair_label(b1, b2))] = RingElement(terms)
    dims = None
    if r1.dims is not None and r2.dims is not None:
        exact = "integer" if (r1.dims.exactness == r2.dims.exactness == "integer") else "numeric"
        dims = DimensionFunction(
            {pair_label(a, b): r1.dims(a) * r2.dims(b) for a in r1.basis for b in r2.basis},
            exactness=exact,
        )
    return BasedRingTable(basis, unit, involution, products, dims=dims, name=name or f"({r1.name})x({r2.name})")


# -- free products ------------------------------------------------------------------

LETTER_SEP = ":"
WORD_SEP = "."
FREE_UNIT = "e"


def _free_format(word: tuple[tuple[int, str], ...]) -> str:
    return WORD_SEP.join(f"{i}{LETTER_SEP}{a}" for i, a in word) or FREE_UNIT


def _free_parse(label: str, nfactors: int) -> tuple[tuple[int, str], ...]:
    if label == FREE_UNIT:
        return ()
    letters = []
    for chunk in label.split(WORD_SEP):
        idx_text, sep, a = chunk.partition(LETTER_SEP)
        if not sep or not idx_text.isdigit():
            raise ValueError(f"bad free-product label {label!r}")
        idx = int(idx_text)
        if idx >= nfactors:
            raise ValueError(f"factor index out of range in {label!r}")
        letters.append((idx, a))
    return tuple(letters)


def free_product(factors: list[Ring], name: str = "") -> LazyBasedRing:
    """Free product on alternating words in the non-unit letters of the factors.

    Words from distinct factors concatenate; a same-factor junction expands
    by the factor's fusion and recurses on the shorter outer words.  Always
    lazy: alternating words are unbounded even over finite tables.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("free products need at least one factor")
    nfactors = len(factors)

    def valid_word(word: tuple[tuple[int, str], ...]) -> bool:
        prev = None
        for i, a in word:
            if not factors[i].contains(a) or a == factors[i].unit:
                return False
            if prev is not None and prev == i:
                return False
            prev = i
        return True

    def product_words(w: tuple, z: tuple) -> RingElement:
        if not w:
            return RingElement.basis(_free_format(z))
        if not z:
            return RingElement.basis(_free_format(w))
        i, a = w[-1]
        j, b = z[0]
        if i != j:
            return RingElement.basis(_free_format(w + z))
        expansion = factors[i].product(a, b)
        out = RingElement()
        unit_i = factors[i].unit
        for gamma, coeff in expansion.items():
            if gamma == unit_i:
                out = out + coeff * product_words(w[:-1], z[1:])
            else:
                out = out + coeff * RingElement.basis(_free_format(w[:-1] + ((i, gamma),) + z[1:]))
        return out

    def product_fn(a: str, b: str) -> RingElement:
        return product_words(_free_parse(a, nfactors), _free_parse(b, nfactors))

    def involution_fn(a: str) -> str:
        word = _free_parse(a, nfactors)
        return _free_format(tuple((i, factors[i].involution_of(x)) for i, x in reversed(word)))

    def level_fn(a: str) -> int:
        return len(_free_parse(a, nfactors))

    all_finite = all(not f.is_lazy for f in factors)
    letters_by_factor: list[list[str]] = []
    if all_finite:
        letters_by_factor = [[a for a in f.basis if a != f.unit] for f in factors]

    def enumerate_level_fn(n: int) -> list[str]:
        if not all_finite:
            raise StructuralError("level enumeration requires finite factor tables")
        if n == 0:
            return [FREE_UNIT]
        words: list[str] = []

        def extend(word: tuple, last: int | None):
            if len(word) == n:
                words.append(_free_format(word))
                return
            for i in range(nfactors):
                if i == last:
                    continue
                for a in letters_by_factor[i]:
                    extend(word + ((i, a),), i)

        extend((), None)
        return sorted(words)

    def contains_fn(a: str) -> bool:
        try:
            return valid_word(_free_parse(a, nfactors))
        except ValueError:
            return False

    def factor_dim(i: int, a: str) -> float:
        f = factors[i]
        if f.is_lazy:
            return f.dim(a)
        from .rings import ring_dims

        return ring_dims(f)(a)

    have_dims = all(f.has_dims if f.is_lazy else True for f in factors)

    def dims_fn(label: str) -> float:
        word = _free_parse(label, nfactors)
        value = 1.0
        for i, a in word:
            value *= factor_dim(i, a)
        return value

    min_letter = None
    if all_finite and have_dims:
        letter_dims = [
            factor_dim(i, a) for i in range(nfactors) for a in letters_by_factor[i]
        ]
        if letter_dims:
            min_letter = min(letter_dims)

    def min_level_dim_fn(n: int) -> float:
        if min_letter is None:
            return 1.0
        return max(1.0, min_letter**n)

    return LazyBasedRing(
        name=name or "free(" + ",".join(f.name for f in factors) + ")",
        unit=FREE_UNIT,
        product_fn=product_fn,
        involution_fn=involution_fn,
        level_fn=level_fn,
        enumerate_level_fn=enumerate_level_fn if all_finite else None,
        contains_fn=contains_fn,
        dims=dims_fn if have_dims else None,
        dim_exactness="numeric",
        min_level_dim_fn=min_level_dim_fn,
        metadata={"kind": "free_product", "factors": factors},
    )


# -- generated subrings ---------------------------------------------------------------


@dataclass
class SubringClosure:
    """Closure of {unit, a, dual(a)} under products, possibly truncated.

    ``stabilized`` records whether the closure stopped growing within the
    iteration budget; only a stabilized closure is a genuine fusion subring.
    """

    ring: Ring
    generator: str
    labels: list[str]
    stabilized: bool

    def as_table(self) -> BasedRingTable:
        if not self.stabilized:
            raise StructuralError("closure did not stabilize; no finite subring table")
        products = {}
        for a in self.labels:
            for b in self.labels:
                products[(a, b)] = self.ring.product(a, b)
        involution = {a: self.ring.involution_of(a) for a in self.labels}
        return BasedRingTable(
            self.labels,
            self.ring.unit,
            involution,
            products,
            name=f"subring<{self.generator}> of {self.ring.name}",
        )


def subring_generated(ring: Ring, generator: str, depth: int = 64) -> SubringClosure:
    """Smallest fusion subring containing one label, saturated up to depth rounds."""
    ring.require(generator)
    current = {ring.unit, generator, ring.involution_of(generator)}
    stabilized = False
    for _ in range(depth):
        new = set()
        for a in current:
            for b in current:
                for c in ring.product(a, b).support():
                    if c not in current:
                        new.add(c)
                        new.add(ring.involution_of(c))
        if not new:
            stabilized = True
            break
        current |= new
    if ring.is_lazy:
        labels = sorted(current, key=lambda l: (ring.level(l), l))
    else:
        labels = sorted(current)
    return SubringClosure(ring=ring, generator=generator, labels=labels, stabilized=stabilized)


# -- divisibility -----------------------------------------------------------------------


@dataclass
class DivisibilityResult:
    """Decomposition of a ring into copies of a subring as right modules."""

    divisible: bool
    subring: tuple[str, ...]
    components: list[list[str]]
    anchors: list[str]
    bijections: list[dict[str, str]]
    reason: str = ""


def check_fusion_subring(ring: BasedRingTable, subset) -> tuple[str, ...]:
    """Validate that a basis subset is a fusion subring; returns it sorted."""
    labels = tuple(sorted(set(subset)))
    lset = set(labels)
    for a in labels:
        ring.require(a)
    if ring.unit not in lset:
        raise NotAFusionSubringError("subset does not contain the unit")
    for a in labels:
        if ring.involution_of(a) not in lset:
            raise NotAFusionSubringError(f"subset is not involution-closed at {a!r}")
        for b in labels:
            outside = [c for c in ring.product(a, b).support() if c not in lset]
            if outside:
                raise NotAFusionSubringError(
                    f"product {a!r}*{b!r} leaves the subset at {outside[0]!r}"
                )
    return labels


def is_divisible(ring: BasedRingTable, subset) -> DivisibilityResult:
    """Test whether a fusion subring decomposes the ring as based right modules.

    The right multiplication action of the subring partitions the basis into
    connected components; each must be isomorphic to the standard right
    module of the subring, with the isomorphism anchored at a component
    element mapping to the subring unit.
    """
    if ring.is_lazy:
        raise StructuralError("divisibility testing requires a finite ring")
    sub = check_fusion_subring(ring, subset)
    sset = set(sub)

    # connected components under right multiplication by subring labels
    adjacency: dict[str, set[str]] = {b: set() for b in ring.basis}
    for b in ring.basis:
        for beta in sub:
            for c in ring.product(b, beta).support():
                adjacency[b].add(c)
                adjacency[c].add(b)
    seen: set[str] = set()
    components: list[list[str]] = []
    for start in ring.basis:
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        components.append(sorted(comp))

    anchors: list[str] = []
    bijections: list[dict[str, str]] = []
    for comp in components:
        if len(comp) != len(sub):
            return DivisibilityResult(
                False, sub, components, [], [],
                reason=f"component {comp} has size {len(comp)} != {len(sub)}",
            )
        found = None
        for anchor in comp:
            mapping = {anchor: ring.unit}
            ok = True
            # the anchor plays the subring unit: its right actions are forced
            for beta in sub:
                image = ring.product(anchor, beta)
                if image.total() != 1:
                    ok = False
                    break
                target = image.support()[0]
                if target not in comp:
                    ok = False
                    break
                if target in mapping and mapping[target] != beta:
                    ok = False
                    break
                mapping[target] = beta
            if not ok or len(mapping) != len(comp):
                continue
            # full table comparison against the standard right module
            inverse = {v: k for k, v in mapping.items()}
            for c in comp:
                for beta in sub:
                    actual = ring.product(c, beta)
                    sub_image = ring.product(mapping[c], beta)
                    transported = RingElement(
                        (inverse[s], coeff) for s, coeff in sub_image.items()
                    )
                    if actual != transported:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found = mapping
                break
        if found is None:
            return DivisibilityResult(
                False, sub, components, [], [],
                reason=f"component {comp} is not a standard right module copy",
            )
        anchors.append(next(k for k, v in found.items() if v == ring.unit))
        bijections.append(found)
    return DivisibilityResult(True, sub, components, anchors, bijections)
