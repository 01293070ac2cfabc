"""Enumeration, canonical forms, torsion verdicts, and proof-replay probes."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionrings import (
    BasedModuleTable,
    ModuleSearchConfig,
    RingElement,
    canonical_form,
    canonical_key,
    chebyshev_coeffs,
    cyclic_group_ring,
    dimension_bound,
    enumerate_modules,
    fibonacci,
    free_product,
    free_product_module_probe,
    free_unitary_ring,
    fuse,
    integer_dim_shortcut,
    is_cofinite,
    is_connected,
    is_torsion_free,
    permutation_group_ring,
    quotient_module,
    singleton_module,
    standard_module,
    su2_level,
    su2_ring,
    tensor_obstruction_probe,
    tensor_product,
    twisted_tensor_module,
    unfold_word_module,
    verify_module,
    word_module_structure_check,
    a_infinity_check,
)


# -- enumeration against the independent subgroup oracle -------------------------------

from conftest import (
    cyclic_group_data,
    dihedral_data,
    klein_four_data,
    subgroups_up_to_conjugacy,
    symmetric3_data,
)
from fusionrings import group_ring


def test_subgroup_oracle_sanity():
    assert subgroups_up_to_conjugacy(*cyclic_group_data(2)) == 2
    assert subgroups_up_to_conjugacy(*cyclic_group_data(3)) == 2
    assert subgroups_up_to_conjugacy(*cyclic_group_data(4)) == 3
    assert subgroups_up_to_conjugacy(*cyclic_group_data(6)) == 4
    assert subgroups_up_to_conjugacy(*symmetric3_data()) == 4
    assert subgroups_up_to_conjugacy(*klein_four_data()) == 5
    assert subgroups_up_to_conjugacy(*dihedral_data(4)) == 8


GROUP_CASES = [
    (cyclic_group_ring(2), cyclic_group_data(2)),
    (cyclic_group_ring(3), cyclic_group_data(3)),
    (cyclic_group_ring(4), cyclic_group_data(4)),
    (cyclic_group_ring(6), cyclic_group_data(6)),
    (cyclic_group_ring(8), cyclic_group_data(8)),
    (tensor_product(cyclic_group_ring(2), cyclic_group_ring(2)), klein_four_data()),
    (permutation_group_ring(3), symmetric3_data()),
    (group_ring(*dihedral_data(4)[:2], name="dihedral8"), dihedral_data(4)),
]


@pytest.mark.parametrize("ring,group", GROUP_CASES, ids=lambda x: getattr(x, "name", "data"))
def test_group_ring_class_counts_match_subgroup_oracle(ring, group):
    bound = dimension_bound(ring)
    result = enumerate_modules(ring, ModuleSearchConfig(max_basis_size=bound))
    assert result.complete
    assert len(result.classes) == subgroups_up_to_conjugacy(*group)


def test_enumerated_modules_are_verified_connected_cofinite():
    ring = su2_level(3)
    result = enumerate_modules(ring, ModuleSearchConfig(max_basis_size=dimension_bound(ring)))
    assert result.classes, "the standard module must always appear"
    keys = [canonical_key(m) for m in result.classes]
    assert canonical_key(standard_module(ring)) in keys
    for module in result.classes:
        assert verify_module(module).ok
        assert is_connected(module)
        assert is_cofinite(module).status == "cofinite"


def test_enumeration_deterministic_across_thread_counts():
    ring = permutation_group_ring(3)
    outputs = []
    for threads in (1, 2, 8):
        result = enumerate_modules(
            ring, ModuleSearchConfig(max_basis_size=6, threads=threads)
        )
        outputs.append([canonical_key(m) for m in result.classes])
    assert outputs[0] == outputs[1] == outputs[2]


def test_budget_exhaustion_flags_incomplete():
    ring = tensor_product(fibonacci(), fibonacci())
    result = enumerate_modules(
        ring, ModuleSearchConfig(max_basis_size=6, time_budget=0.0)
    )
    assert not result.complete


# -- canonical forms ----------------------------------------------------------------------------


def _relabel(module, mapping):
    ring = module.ring
    action = {}
    for alpha in ring.basis:
        for b in module.basis:
            action[(alpha, mapping[b])] = module.action_row(alpha, b).map_labels(mapping.get)
    return BasedModuleTable(ring, [mapping[b] for b in module.basis], action)


@settings(max_examples=20, deadline=None)
@given(st.permutations(["0", "1", "2", "3"]))
def test_canonical_form_invariant_under_relabeling(perm):
    ring = cyclic_group_ring(4)
    std = standard_module(ring)
    mapping = dict(zip(std.basis, [f"x{p}" for p in perm]))
    renamed = _relabel(std, mapping)
    assert canonical_key(renamed) == canonical_key(std)
    one = canonical_form(renamed)
    two = canonical_form(std)
    for alpha in ring.basis:
        assert np.array_equal(one.matrix(alpha), two.matrix(alpha))


def test_canonical_form_swapped_quotient():
    ring = cyclic_group_ring(4)
    q = quotient_module(ring, ["0", "2"])
    swapped = _relabel(q, {"0": "b", "1": "a"})
    assert canonical_key(swapped) == canonical_key(q)


def test_canonical_forms_distinguish_sizes():
    ring = cyclic_group_ring(4)
    assert canonical_key(standard_module(ring)) != canonical_key(
        quotient_module(ring, ["0", "2"])
    )


def test_canonical_form_detects_nonstandard_twist():
    fib = fibonacci()
    square = tensor_product(fib, fib)
    tw = twisted_tensor_module(fib)
    assert canonical_key(tw) != canonical_key(standard_module(square))


# -- torsion verdicts -----------------------------------------------------------------------------


def test_fibonacci_certified_with_tadpole_class():
    verdict = is_torsion_free(fibonacci())
    assert verdict.status == "torsion_free_certified"
    assert verdict.class_count == 1
    only = verdict.enumeration.classes[0]
    m = only.matrix("phi")
    assert sorted(map(tuple, m.tolist())) in (
        [(0, 1), (1, 1)],
        [(1, 1), (1, 0)],
    )


def test_group_rings_not_torsion_free():
    for ring in (cyclic_group_ring(2), cyclic_group_ring(3), permutation_group_ring(3)):
        verdict = is_torsion_free(ring)
        assert verdict.status == "not_torsion_free"
        assert verdict.witnesses


def test_trivial_ring_is_torsion_free():
    verdict = is_torsion_free(cyclic_group_ring(1))
    assert verdict.status == "torsion_free_certified"


def test_su2_level3_quotient_witness():
    verdict = is_torsion_free(su2_level(3))
    assert verdict.status == "not_torsion_free"
    q = quotient_module(su2_level(3), ["0", "3"])
    assert canonical_key(q) in {canonical_key(w) for w in verdict.witnesses}


def test_integer_dim_shortcut():
    witness = integer_dim_shortcut(su2_level(1))
    assert witness is not None
    assert witness.size == 1
    assert integer_dim_shortcut(cyclic_group_ring(1)) is None
    assert integer_dim_shortcut(fibonacci()) is None


# -- tensor power coefficients -------------------------------------------------------------------


def test_chebyshev_small_values():
    assert chebyshev_coeffs(0) == [1]
    assert chebyshev_coeffs(1) == [0, 1]
    assert chebyshev_coeffs(2) == [-1, 0, 1]
    assert chebyshev_coeffs(3) == [0, -2, 0, 1]


@pytest.mark.parametrize("n", range(17))
def test_chebyshev_reexpansion_identity(n):
    ring = su2_ring()
    coeffs = chebyshev_coeffs(n)
    one = RingElement.basis("1")
    power = RingElement.basis("0")
    total = coeffs[0] * power
    for k in range(1, n + 1):
        power = fuse(ring, power, one)
        total = total + coeffs[k] * power
    assert total == RingElement.basis(str(n))


# -- unfolding and word module checks ---------------------------------------------------------------


def test_unfold_standard_word_module():
    std = standard_module(free_unitary_ring())
    for depth in range(1, 7):
        unfolded = unfold_word_module(std, depth)
        assert len(unfolded.vertices) == 2 * sum(2**k for k in range(depth + 1))
        assert all(a_infinity_check(c) for c in unfolded.components)


def test_unfold_singleton_has_two_vertices():
    from fusionrings import LazyBasedModule

    a2 = free_unitary_ring()
    point = LazyBasedModule(
        a2,
        act_fn=lambda alpha, b: RingElement.basis("pt") * max(1, int(a2.dim(alpha))),
        level_fn=lambda b: 0,
        enumerate_level_fn=lambda n: ["pt"] if n == 0 else [],
    )
    unfolded = unfold_word_module(point, 0)
    assert len(unfolded.vertices) == 2


def test_unfold_detects_planted_loop():
    from fusionrings import LazyBasedModule

    a2 = free_unitary_ring()
    std = standard_module(a2)

    def looped(alpha, b):
        row = std.action_row(alpha, b)
        if alpha == "p+" and b == "p+":
            # a loop at an interior vertex: its minus copy gains a third edge
            row = row + RingElement.basis("p+")
        return row

    bad = LazyBasedModule(a2, looped, std.level, std.enumerate_level, dims=a2.dim, anchor="e")
    unfolded = unfold_word_module(bad, 3)
    assert not all(a_infinity_check(c) for c in unfolded.components)


def test_word_structure_check_standard():
    std = standard_module(free_unitary_ring())
    report = word_module_structure_check(std, 5)
    assert report.ok, report.violations


def test_word_structure_depth_one_shape():
    std = standard_module(free_unitary_ring())
    report = word_module_structure_check(std, 1)
    assert report.ok
    window = std.truncate(1)
    M = window.matrix("p+")
    # around the minimal vertex: one incoming and one outgoing edge
    root = window.index["e"]
    assert M[root].sum() == 1 and M[:, root].sum() == 1


def test_word_structure_flags_planted_loop():
    from fusionrings import LazyBasedModule

    a2 = free_unitary_ring()
    std = standard_module(a2)

    def looped(alpha, b):
        row = std.action_row(alpha, b)
        if alpha == "p+" and b == "p+":
            row = row + RingElement.basis("p+")
        return row

    bad = LazyBasedModule(a2, looped, std.level, std.enumerate_level, dims=a2.dim, anchor="e")
    report = word_module_structure_check(bad, 3)
    assert not report.loop_free
    assert any("loop" in v for v in report.violations)


# -- free product probe ------------------------------------------------------------------------------


def test_probe_standard_fib_free_square():
    ring = free_product([fibonacci(), fibonacci()])
    report = free_product_module_probe(ring, standard_module(ring), 3)
    assert report.ok
    assert report.base_vertex == "e"
    assert report.identification_ok


def test_probe_standard_z2_z3():
    ring = free_product([cyclic_group_ring(2), cyclic_group_ring(3)])
    report = free_product_module_probe(ring, standard_module(ring), 3)
    assert report.ok, report.obstructions


def test_probe_depth_zero_vacuous():
    ring = free_product([fibonacci(), fibonacci()])
    report = free_product_module_probe(ring, standard_module(ring), 0)
    assert report.vacuous and report.ok


def test_probe_detects_torsion_coset_module():
    from fusionrings import LazyBasedModule

    ring = free_product([cyclic_group_ring(2), cyclic_group_ring(3)])
    orders = {0: 2, 1: 3}

    def parse(label):
        if label == "e":
            return ()
        return tuple(
            (int(c.split(":")[0]), int(c.split(":")[1])) for c in label.split(".")
        )

    def fmt(word):
        return ".".join(f"{f}:{p}" for f, p in word) or "e"

    def reduce(word):
        out = []
        for f, p in word:
            p %= orders[f]
            if not p:
                continue
            if out and out[-1][0] == f:
                q = (out[-1][1] + p) % orders[f]
                out.pop()
                if q:
                    out.append((f, q))
            else:
                out.append((f, p))
        return tuple(out)

    def rep(word):
        w1 = reduce(word)
        w2 = reduce(word + ((0, 1),))
        return min(fmt(w1), fmt(w2), key=lambda l: (len(parse(l)), l))

    def coset_act(alpha, b):
        return RingElement.basis(rep(reduce(parse(alpha) + parse(b))))

    def enum(n):
        reps = set()

        def gen(word, last):
            if len(word) == n:
                reps.add(rep(word))
                return
            for f in (0, 1):
                if f == last:
                    continue
                powers = (1,) if f == 0 else (1, 2)
                for p in powers:
                    gen(word + ((f, p),), f)

        gen((), None)
        return sorted(l for l in reps if len(parse(l)) == n)

    coset = LazyBasedModule(
        ring, coset_act, lambda b: len(parse(b)), enum,
        dims=lambda b: 2.0, anchor="e", name="cosets by the order-two factor",
    )
    report = free_product_module_probe(ring, coset, 3)
    assert not report.ok
    assert any("factor 0" in o or "collide" in o for o in report.obstructions)


# -- tensor obstruction probe ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def fib_square_probe():
    return tensor_obstruction_probe(fibonacci(), fibonacci())


def test_tensor_probe_finds_isomorphic_subrings(fib_square_probe):
    report = fib_square_probe
    assert not report.torsion_free
    assert report.witness_reports
    for wr in report.witness_reports:
        assert wr.matched_pair == ("phi", "phi")
        assert wr.subring_left == ("1", "phi")
        assert wr.subring_right == ("1", "phi")
        assert wr.nontrivial and wr.finite and wr.isomorphic
    assert report.ok


def test_tensor_probe_trivial_factor_is_torsion_free():
    report = tensor_obstruction_probe(cyclic_group_ring(1), fibonacci())
    assert report.torsion_free
    assert report.ok


# -- Verlinde module classification ------------------------------------------------

# Connected based modules over the level-N truncation are the A-D-E-T graphs
# whose Coxeter number is N+2: A_{N+1} always, T_{(N+1)/2} at odd levels,
# D_{N/2+2} at even levels >= 4, and E types only at levels 10, 16, 28.
VERLINDE_EXPECTED = {
    1: [("tadpole", 1), ("A_n", 2)],
    2: [("A_n", 3)],
    3: [("tadpole", 2), ("A_n", 4)],
    4: [("A_n", 5), ("D_n", 4)],
    5: [("tadpole", 3), ("A_n", 6)],
}


@pytest.mark.parametrize("level", sorted(VERLINDE_EXPECTED))
def test_su2_level_module_classification(level):
    from fusionrings import dynkin_classify, module_graph, symmetrize

    ring = su2_level(level)
    result = enumerate_modules(ring, ModuleSearchConfig(max_basis_size=dimension_bound(ring)))
    assert result.complete
    found = []
    for module in result.classes:
        verdict = dynkin_classify(symmetrize(module_graph(module, "1")))
        found.append((verdict.kind, module.size))
    assert sorted(found) == sorted(
        (kind, size) for kind, size in VERLINDE_EXPECTED[level]
    )


# -- brute-force cross-validation of the search ---------------------------------------

def _count_classes_brute(matrices_by_size):
    """Count permutation-isomorphism classes from explicit matrix lists."""
    classes = set()
    for size, matrix_list in matrices_by_size:
        for mats in matrix_list:
            best = None
            for perm in itertools.permutations(range(size)):
                idx = np.array(perm)
                key = tuple(m[np.ix_(idx, idx)].tobytes() for m in mats)
                if best is None or key < best:
                    best = key
            classes.add((size, best))
    return len(classes)


def _connected(mats, size):
    union = sum((m + m.T for m in mats), np.zeros((size, size), dtype=np.int64))
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for w in np.nonzero(union[v])[0]:
            if int(w) not in seen:
                seen.add(int(w))
                stack.append(int(w))
    return len(seen) == size


def _all_matrices(size, cap):
    cells = size * size
    for values in itertools.product(range(cap + 1), repeat=cells):
        yield np.array(values, dtype=np.int64).reshape(size, size)


def test_search_matches_brute_force_fibonacci():
    # direct iteration over M(phi): symmetric, M^2 = I + M, no zero rows
    found = []
    for size in (1, 2):
        per_size = []
        for X in _all_matrices(size, 2):
            if not np.array_equal(X, X.T):
                continue
            if not np.array_equal(X @ X, np.eye(size, dtype=np.int64) + X):
                continue
            if np.any(X.sum(axis=1) == 0) or not _connected([X], size):
                continue
            per_size.append([X])
        found.append((size, per_size))
    brute = _count_classes_brute(found)
    result = enumerate_modules(fibonacci(), ModuleSearchConfig(max_basis_size=2))
    assert len(result.classes) == brute == 1


def test_search_matches_brute_force_z3():
    # M(1) with M(1) M(1)^T = I (inverse tie) and M(1)^2 = M(1)^T (1+1=2)
    found = []
    for size in (1, 2, 3):
        per_size = []
        for X in _all_matrices(size, 1):
            if not np.array_equal(X @ X.T, np.eye(size, dtype=np.int64)):
                continue
            if not np.array_equal(X @ X, X.T):
                continue
            if not _connected([X], size):
                continue
            per_size.append([X])
        found.append((size, per_size))
    brute = _count_classes_brute(found)
    result = enumerate_modules(cyclic_group_ring(3), ModuleSearchConfig(max_basis_size=3))
    assert len(result.classes) == brute == 2


def test_search_matches_brute_force_su2_level2():
    # generator X = M(1), derived M(2) = X^2 - I: the full condition list,
    # written out independently of the search machinery
    found = []
    for size in (1, 2, 3):
        per_size = []
        for X in _all_matrices(size, 2):
            if not np.array_equal(X, X.T):
                continue
            M2 = X @ X - np.eye(size, dtype=np.int64)
            if np.any(M2 < 0) or not np.array_equal(M2, M2.T):
                continue
            # 1 x 2 = 1 and 2 x 2 = 0
            if not np.array_equal(M2 @ X, X) or not np.array_equal(M2 @ M2, np.eye(size, dtype=np.int64)):
                continue
            if np.any(X.sum(axis=1) == 0) or np.any(M2.sum(axis=1) == 0):
                continue
            if not _connected([X, M2], size):
                continue
            per_size.append([X, M2])
        found.append((size, per_size))
    brute = _count_classes_brute(found)
    result = enumerate_modules(su2_level(2), ModuleSearchConfig(max_basis_size=3))
    assert len(result.classes) == brute == 1


def test_witnesses_satisfy_the_verdict_contract():
    # every witness is a verified, connected, cofinite module that is not
    # isomorphic to the standard one
    from fusionrings import is_cofinite, verify_module

    for ring in (cyclic_group_ring(2), su2_level(3), tensor_product(fibonacci(), fibonacci())):
        verdict = is_torsion_free(ring)
        assert verdict.status == "not_torsion_free"
        standard_key = canonical_key(standard_module(ring))
        assert verdict.witnesses
        for witness in verdict.witnesses:
            assert verify_module(witness).ok
            assert is_connected(witness)
            assert is_cofinite(witness).status == "cofinite"
            assert canonical_key(witness) != standard_key


def test_generator_override_still_complete():
    ring = su2_level(3)
    default = enumerate_modules(ring, ModuleSearchConfig(max_basis_size=5))
    overridden = enumerate_modules(
        ring, ModuleSearchConfig(max_basis_size=5, generators=("3", "1"))
    )
    assert [canonical_key(m) for m in default.classes] == [
        canonical_key(m) for m in overridden.classes
    ]


def test_explicit_entry_cap_mode():
    ring = fibonacci()
    result = enumerate_modules(
        ring,
        ModuleSearchConfig(max_basis_size=2, entry_bound_mode="explicit", explicit_cap=2),
    )
    assert len(result.classes) == 1


def test_word_structure_flags_double_arrow():
    from fusionrings import LazyBasedModule

    a2 = free_unitary_ring()
    std = standard_module(a2)

    def doubled(alpha, b):
        row = std.action_row(alpha, b)
        if alpha == "p+" and b == "e":
            row = row + RingElement.basis("p+")  # p+ appears twice now
        return row

    bad = LazyBasedModule(a2, doubled, std.level, std.enumerate_level, dims=a2.dim, anchor="e")
    report = word_module_structure_check(bad, 2)
    assert not report.multi_edge_free
    assert any("double arrow" in v for v in report.violations)


def test_word_structure_flags_two_way_pair():
    from fusionrings import LazyBasedModule

    a2 = free_unitary_ring()
    std = standard_module(a2)

    def opposed(alpha, b):
        row = std.action_row(alpha, b)
        if alpha == "p+" and b == "p+":
            row = row + RingElement.basis("e")  # e -> p+ already exists
        return row

    bad = LazyBasedModule(a2, opposed, std.level, std.enumerate_level, dims=a2.dim, anchor="e")
    report = word_module_structure_check(bad, 2)
    assert not report.two_way_free
    assert any("opposed" in v for v in report.violations)
