"""Shared fixtures and independent oracles for the test suite."""

import itertools

import pytest


def subgroups_up_to_conjugacy(elements, mul, unit) -> int:
    """Brute-force subgroup count up to conjugacy for a finite group table.

    Deliberately independent of the module enumeration machinery: subsets
    closed under multiplication are found by exhaustion, then identified
    under conjugation by every group element.
    """
    elems = list(elements)
    subgroups = []
    for r in range(1, len(elems) + 1):
        for subset in itertools.combinations(elems, r):
            sset = set(subset)
            if unit not in sset:
                continue
            if all(mul[(a, b)] in sset for a in subset for b in subset):
                subgroups.append(frozenset(sset))
    inverse = {}
    for g in elems:
        inverse[g] = next(h for h in elems if mul[(g, h)] == unit)
    classes = set()
    for H in subgroups:
        orbit = frozenset(
            frozenset(mul[(mul[(g, h)], inverse[g])] for h in H) for g in elems
        )
        classes.add(orbit)
    return len(classes)


@pytest.fixture(scope="session")
def subgroup_oracle():
    return subgroups_up_to_conjugacy


def cyclic_group_data(n):
    elems = [str(i) for i in range(n)]
    mul = {(str(a), str(b)): str((a + b) % n) for a in range(n) for b in range(n)}
    return elems, mul, "0"


def klein_four_data():
    elems = []
    mul = {}
    for a in itertools.product("01", repeat=2):
        elems.append("|".join(a))
    for a in itertools.product("01", repeat=2):
        for b in itertools.product("01", repeat=2):
            c = tuple(str((int(x) + int(y)) % 2) for x, y in zip(a, b))
            mul[("|".join(a), "|".join(b))] = "|".join(c)
    return elems, mul, "0|0"


def symmetric3_data():
    perms = sorted(itertools.permutations(range(3)))
    label = {p: "".join(map(str, p)) for p in perms}
    mul = {}
    for p in perms:
        for q in perms:
            composed = tuple(p[q[i]] for i in range(3))
            mul[(label[p], label[q])] = label[composed]
    return [label[p] for p in perms], mul, "012"


def dihedral_data(n):
    def label(i, j):
        return f"r{i}" + ("s" if j else "")

    elems = [label(i, j) for i in range(n) for j in (0, 1)]
    mul = {}
    for i1 in range(n):
        for j1 in (0, 1):
            for i2 in range(n):
                for j2 in (0, 1):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % n
                    mul[(label(i1, j1), label(i2, j2))] = label(i, (j1 + j2) % 2)
    return elems, mul, "r0"
