"""Based rings and fusion rings with exact integer structure constants.

A finite based ring is a table of products over an involutive pointed basis;
a lazy based ring computes single products on demand over a countable basis
graded by levels.  Dimension functions are Perron data of the multiplication
matrices.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .elements import RingElement, check_label
from .errors import (
    NoDimensionFunctionError,
    StructuralError,
    UnitGroupError,
    UnknownLabelError,
)
from .verification import VerificationReport

# Comparison tolerances; overridable per call.
DIM_TOL = 1e-9
REL_TOL = 1e-6


@dataclass(frozen=True)
class DimensionFunction:
    """Positive values per basis label plus an exactness tag.

    The tag is one of ``integer`` (provably integer-valued), ``quadratic``
    (known closed form in a quadratic irrational) or ``numeric``.
    """

    values: Mapping[str, float]
    exactness: str = "numeric"

    def __call__(self, label: str) -> float:
        try:
            return self.values[label]
        except KeyError:
            raise UnknownLabelError(f"no dimension recorded for label {label!r}") from None

    def of(self, element: RingElement) -> float:
        return sum(coeff * self(label) for label, coeff in element.items())

    @property
    def max_value(self) -> float:
        return max(self.values.values())

    @property
    def min_value(self) -> float:
        return min(self.values.values())

    def all_integer(self, tol: float = DIM_TOL) -> bool:
        return all(abs(v - round(v)) <= tol for v in self.values.values())

    def as_integers(self, tol: float = DIM_TOL) -> dict[str, int]:
        out = {}
        for label, v in self.values.items():
            if abs(v - round(v)) > tol:
                raise NoDimensionFunctionError(f"dimension of {label!r} is not integral: {v}")
            out[label] = int(round(v))
        return out


class BasedRingTable:
    """A finite based ring given by explicit structure constants.

    The constructor checks labels and shapes only; axioms are the business
    of :func:`verify_based_ring`, so deliberately broken tables can be built
    for testing.
    """

    is_lazy = False

    def __init__(
        self,
        basis: Iterable[str],
        unit: str,
        involution: Mapping[str, str],
        products: Mapping[tuple[str, str], RingElement | Mapping[str, int]],
        dims: DimensionFunction | None = None,
        name: str = "",
    ):
        self.basis: tuple[str, ...] = tuple(sorted(check_label(b) for b in basis))
        if len(set(self.basis)) != len(self.basis):
            raise StructuralError("duplicate basis labels")
        self.index = {label: i for i, label in enumerate(self.basis)}
        if unit not in self.index:
            raise StructuralError(f"unit {unit!r} is not a basis label")
        self.unit = unit
        self.involution = dict(involution)
        bad = set(self.involution) - set(self.basis) | set(self.involution.values()) - set(self.basis)
        if bad:
            raise StructuralError(f"involution mentions labels outside the basis: {sorted(bad)}")
        self._products: dict[tuple[str, str], RingElement] = {}
        for (a, b), value in products.items():
            if a not in self.index or b not in self.index:
                raise StructuralError(f"product entry ({a!r}, {b!r}) outside the basis")
            elem = value if isinstance(value, RingElement) else RingElement(value)
            self._products[(a, b)] = elem
        self.dims = dims
        self.name = name or f"table[{len(self.basis)}]"
        self._tensor: np.ndarray | None = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def contains(self, label: str) -> bool:
        return label in self.index

    def require(self, label: str) -> None:
        if label not in self.index:
            raise UnknownLabelError(f"label {label!r} is not in ring {self.name}")

    def product(self, a: str, b: str) -> RingElement:
        self.require(a)
        self.require(b)
        try:
            return self._products[(a, b)]
        except KeyError:
            raise StructuralError(f"missing product entry ({a!r}, {b!r})") from None

    def involution_of(self, label: str) -> str:
        self.require(label)
        try:
            return self.involution[label]
        except KeyError:
            raise StructuralError(f"involution undefined on {label!r}") from None

    def level(self, label: str) -> int:
        self.require(label)
        return 0

    def labels_up_to(self, depth: int) -> list[str]:
        return list(self.basis)

    def structure_tensor(self) -> np.ndarray:
        """The array ``T[a, b, c]`` of coefficients of c in a*b (int64, cached)."""
        if self._tensor is None:
            n = self.size
            T = np.zeros((n, n, n), dtype=np.int64)
            for a, ai in self.index.items():
                for b, bi in self.index.items():
                    for c, coeff in self.product(a, b).items():
                        ci = self.index.get(c)
                        if ci is None:
                            raise StructuralError(
                                f"product {a!r}*{b!r} leaves the basis at {c!r}"
                            )
                        T[ai, bi, ci] = coeff
            self._tensor = T
        return self._tensor

    def left_matrix(self, label: str) -> np.ndarray:
        """Matrix ``M[b, c] = coefficient of c in label*b``."""
        self.require(label)
        return self.structure_tensor()[self.index[label]]

    def with_dims(self, dims: DimensionFunction) -> "BasedRingTable":
        out = BasedRingTable.__new__(BasedRingTable)
        out.__dict__.update(self.__dict__)
        out.dims = dims
        return out

    def __repr__(self) -> str:
        return f"BasedRingTable({self.name}, size={self.size})"


class LazyBasedRing:
    """A countably based ring whose single products are computed on demand.

    Every basis product is a finite nonnegative combination; global
    quantifiers are truncated by the level grading.  Products are memoized
    behind a lock, with behavior identical to recomputation.
    """

    is_lazy = True

    def __init__(
        self,
        name: str,
        unit: str,
        product_fn: Callable[[str, str], RingElement],
        involution_fn: Callable[[str], str],
        level_fn: Callable[[str], int],
        enumerate_level_fn: Callable[[int], list[str]] | None = None,
        contains_fn: Callable[[str], bool] | None = None,
        dims: Callable[[str], float] | None = None,
        dim_exactness: str = "numeric",
        min_level_dim_fn: Callable[[int], float] | None = None,
        iterated_power_fn: Callable[[str, int], str | None] | None = None,
        metadata: dict | None = None,
    ):
        self.name = name
        self.unit = unit
        self.metadata = dict(metadata or {})
        self._product_fn = product_fn
        self._involution_fn = involution_fn
        self._level_fn = level_fn
        self._enumerate_fn = enumerate_level_fn
        self._contains_fn = contains_fn
        self._dims_fn = dims
        self.dim_exactness = dim_exactness
        self._min_level_dim_fn = min_level_dim_fn
        self._iterated_power_fn = iterated_power_fn
        self._cache: dict[tuple[str, str], RingElement] = {}
        self._lock = threading.Lock()

    def contains(self, label: str) -> bool:
        if self._contains_fn is not None:
            return self._contains_fn(label)
        return True

    def require(self, label: str) -> None:
        if not self.contains(label):
            raise UnknownLabelError(f"label {label!r} is not in ring {self.name}")

    def product(self, a: str, b: str) -> RingElement:
        self.require(a)
        self.require(b)
        key = (a, b)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._product_fn(a, b)
        with self._lock:
            self._cache.setdefault(key, result)
        return result

    def involution_of(self, label: str) -> str:
        self.require(label)
        return self._involution_fn(label)

    def level(self, label: str) -> int:
        self.require(label)
        return self._level_fn(label)

    def enumerate_level(self, n: int) -> list[str]:
        if self._enumerate_fn is None:
            raise StructuralError(f"ring {self.name} does not support level enumeration")
        return self._enumerate_fn(n)

    def labels_up_to(self, depth: int) -> list[str]:
        out: list[str] = []
        for n in range(depth + 1):
            out.extend(sorted(self.enumerate_level(n)))
        return out

    def dim(self, label: str) -> float:
        if self._dims_fn is None:
            raise NoDimensionFunctionError(f"ring {self.name} carries no dimension data")
        self.require(label)
        return self._dims_fn(label)

    @property
    def has_dims(self) -> bool:
        return self._dims_fn is not None

    def min_dim_at_level(self, n: int) -> float | None:
        """A lower bound for dimensions of level-n labels, when known."""
        if self._min_level_dim_fn is None:
            return None
        return self._min_level_dim_fn(n)

    def iterated_power(self, label: str, n: int) -> str | None:
        """Label of the n-th tensor power when it stays a single basis element."""
        if self._iterated_power_fn is None:
            return None
        return self._iterated_power_fn(label, n)

    def __repr__(self) -> str:
        return f"LazyBasedRing({self.name})"


Ring = BasedRingTable | LazyBasedRing


def _require_all(ring: Ring, x: RingElement) -> None:
    for label in x.support():
        ring.require(label)


def fuse(ring: Ring, x: RingElement, y: RingElement) -> RingElement:
    """Bilinear extension of the basis products; exact integer coefficients."""
    _require_all(ring, x)
    _require_all(ring, y)
    out = RingElement()
    for a, ca in x.items():
        for b, cb in y.items():
            out = out + ca * cb * ring.product(a, b)
    return out


def unit_coefficient(ring: Ring, x: RingElement) -> int:
    """Coefficient of the unit label in x (the counit-like linear functional)."""
    _require_all(ring, x)
    return x.coefficient(ring.unit)


def dual(ring: Ring, x: RingElement) -> RingElement:
    """Coefficientwise application of the basis involution."""
    _require_all(ring, x)
    return x.map_labels(ring.involution_of)


def structure_constant(ring: Ring, y: RingElement, z: RingElement, x: RingElement) -> int:
    """The multiplicity of x inside y*z, computed as the unit coefficient of y*z*dual(x)."""
    return unit_coefficient(ring, fuse(ring, fuse(ring, y, z), dual(ring, x)))


def _structural_scan(table: BasedRingTable) -> list[str]:
    errors: list[str] = []
    basis = set(table.basis)
    inv = table.involution
    if set(inv) != basis:
        errors.append("involution is not defined on exactly the basis")
    else:
        if sorted(inv.values()) != sorted(basis):
            errors.append("involution is not a bijection of the basis")
        else:
            noninv = [a for a in table.basis if inv.get(inv[a]) != a]
            if noninv:
                errors.append(f"involution is not involutive at {noninv[0]!r}")
        if inv.get(table.unit) != table.unit:
            errors.append("involution does not fix the unit")
    for a in table.basis:
        for b in table.basis:
            elem = table._products.get((a, b))
            if elem is None:
                errors.append(f"missing product entry ({a!r}, {b!r})")
                return errors  # one totality witness is enough
            if not elem.is_zero and not elem.is_nonnegative():
                errors.append(f"negative structure constant in {a!r}*{b!r}")
                return errors
            outside = [c for c in elem.support() if c not in basis]
            if outside:
                errors.append(f"product {a!r}*{b!r} leaves the basis at {outside[0]!r}")
                return errors
    return errors


def _first_bad(diff: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argwhere(diff)[0])


def verify_based_ring(table: BasedRingTable) -> VerificationReport:
    """Check the defining axioms of a finite based ring.

    Reported checks: unit laws, dual pairing (the unit coefficient of
    dual(a)*b is delta_{a,b}), the four-fold duality symmetry of the
    structure constants, anti-multiplicativity of the involution, and
    associativity.  Finite support is automatic for tables and recorded
    as such.
    """
    report = VerificationReport(subject=table.name)
    report.structural_errors = _structural_scan(table)
    if report.structural_errors:
        return report

    n = table.size
    T = table.structure_tensor().astype(np.float64)  # exact for desk-scale entries
    u = table.index[table.unit]
    inv = np.array([table.index[table.involution[b]] for b in table.basis])
    eye = np.eye(n)
    labels = table.basis

    def witness(idx: tuple[int, ...]) -> str:
        return ", ".join(labels[i] for i in idx)

    d = np.abs(T[u, :, :] - eye)
    report.add("unit law (left)", not d.any(), None if not d.any() else witness(_first_bad(d)))
    d = np.abs(T[:, u, :] - eye)
    report.add("unit law (right)", not d.any(), None if not d.any() else witness(_first_bad(d)))

    pairing = T[inv, :, u]
    d = np.abs(pairing - eye)
    report.add("dual pairing", not d.any(), None if not d.any() else witness(_first_bad(d)))

    report.add("finite support", True, "automatic for a finite table")

    B, G, A = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    sym1 = T[G, inv[A], inv[B]]
    sym2 = T[inv[A], B, inv[G]]
    sym3 = T[inv[G], inv[B], inv[A]]
    ok = np.array_equal(T, sym1) and np.array_equal(T, sym2) and np.array_equal(T, sym3)
    wit = None
    if not ok:
        for other in (sym1, sym2, sym3):
            dd = T != other
            if dd.any():
                wit = witness(_first_bad(dd))
                break
    report.add("duality symmetry", ok, wit)

    anti = T[inv[G], inv[B], inv[A]]  # dual(a*b) == dual(b)*dual(a)
    d2 = T != anti
    report.add("involution anti-multiplicative", not d2.any(), None if not d2.any() else witness(_first_bad(d2)))

    M = T  # M[a] is the left multiplication matrix of label a
    lhs = np.matmul(M[:, None, :, :], M[None, :, :, :])  # lhs[a,b] = M[a] @ M[b]
    rhs = np.einsum("abe,ecd->abcd", T, M)
    # With rows indexed by the acted-on label, associativity reads
    # M[a] @ M[b] == sum_e N_{b a}^e M[e]; swap the pair axes accordingly.
    rhs = np.swapaxes(rhs, 0, 1)
    d3 = lhs != rhs
    report.add("associativity", not d3.any(), None if not d3.any() else witness(_first_bad(d3)[:2]))
    return report


def verify_lazy_ring(ring: LazyBasedRing, depth: int) -> VerificationReport:
    """Check the based-ring axioms over all labels of level <= depth.

    Individual products are exact; only the quantifier is truncated.
    Associativity is checked for every triple within the depth.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    report = VerificationReport(subject=f"{ring.name} (depth {depth})")
    labels = ring.labels_up_to(depth)

    if ring.level(ring.unit) != 0:
        report.structural_errors.append("unit is not at level 0")
    for a in labels:
        ai = ring.involution_of(a)
        if not ring.contains(ai):
            report.structural_errors.append(f"involution leaves the ring at {a!r}")
            break
        if ring.involution_of(ai) != a:
            report.structural_errors.append(f"involution is not involutive at {a!r}")
            break
    if ring.involution_of(ring.unit) != ring.unit:
        report.structural_errors.append("involution does not fix the unit")
    if report.structural_errors:
        return report

    ok, wit = True, None
    for a in labels:
        for b in labels:
            p = ring.product(a, b)
            if not p.is_zero and not p.is_nonnegative():
                ok, wit = False, f"{a}, {b}"
                break
        if not ok:
            break
    report.add("nonnegative structure constants", ok, wit)

    unit_elem = RingElement.basis(ring.unit)
    ok, wit = True, None
    for a in labels:
        basis_a = RingElement.basis(a)
        if ring.product(ring.unit, a) != basis_a or ring.product(a, ring.unit) != basis_a:
            ok, wit = False, a
            break
    report.add("unit law", ok, wit)

    ok, wit = True, None
    for a in labels:
        for b in labels:
            expected = 1 if a == b else 0
            if ring.product(ring.involution_of(a), b).coefficient(ring.unit) != expected:
                ok, wit = False, f"{a}, {b}"
                break
        if not ok:
            break
    report.add("dual pairing", ok, wit)

    ok, wit = True, None
    for a in labels:
        for b in labels:
            left = dual(ring, ring.product(a, b))
            right = ring.product(ring.involution_of(b), ring.involution_of(a))
            if left != right:
                ok, wit = False, f"{a}, {b}"
                break
        if not ok:
            break
    report.add("involution anti-multiplicative", ok, wit)

    report.add("finite support", True, "every single product is a finite combination")

    # four-fold symmetry of the structure constants, quantified over pairs
    # within the depth; the third index ranges over the full product support
    ok, wit = True, None
    for b in labels:
        for g in labels:
            expansion = ring.product(b, g)
            for a, coeff in expansion.items():
                a_bar = ring.involution_of(a)
                b_bar = ring.involution_of(b)
                g_bar = ring.involution_of(g)
                if (
                    ring.product(g, a_bar).coefficient(b_bar) != coeff
                    or ring.product(a_bar, b).coefficient(g_bar) != coeff
                    or ring.product(g_bar, b_bar).coefficient(a_bar) != coeff
                ):
                    ok, wit = False, f"{b}, {g}, {a}"
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("duality symmetry", ok, wit)

    ok, wit = True, None
    for a in labels:
        ea = RingElement.basis(a)
        for b in labels:
            ab = ring.product(a, b)
            for c in labels:
                left = fuse(ring, ab, RingElement.basis(c))
                right = fuse(ring, ea, ring.product(b, c))
                if left != right:
                    ok, wit = False, f"{a}, {b}, {c}"
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("associativity", ok, wit)
    return report


def frobenius_perron_dims(table: BasedRingTable, tol: float = DIM_TOL, rel_tol: float = REL_TOL) -> DimensionFunction:
    """The dimension function of a finite fusion ring, from Perron data.

    Each label gets the spectral radius of its left-multiplication matrix;
    the result is validated (unit value 1, values >= 1, involution symmetry,
    multiplicativity) and an error is raised when any check fails, in which
    case the table admits no such dimension function candidate.
    """
    from .spectra import spectral_radius

    errors = _structural_scan(table)
    if errors:
        raise StructuralError("; ".join(errors))
    T = table.structure_tensor()
    n = table.size
    values = np.array([spectral_radius(T[a]) for a in range(n)])

    unit_value = values[table.index[table.unit]]
    if abs(unit_value - 1.0) > rel_tol:
        raise NoDimensionFunctionError(f"unit dimension is {unit_value}, not 1")
    if np.any(values < 1.0 - tol):
        bad = table.basis[int(np.argmin(values))]
        raise NoDimensionFunctionError(f"dimension of {bad!r} is below 1: {values.min()}")
    inv = np.array([table.index[table.involution[b]] for b in table.basis])
    if np.any(np.abs(values - values[inv]) > rel_tol * np.maximum(values, 1.0)):
        raise NoDimensionFunctionError("dimension is not involution-invariant")

    # multiplicativity: d(a*b) == d(a) d(b) within relative tolerance
    products = T.reshape(n * n, n).astype(np.float64) @ values
    expected = np.outer(values, values).reshape(n * n)
    err = np.abs(products - expected)
    if np.any(err > rel_tol * np.maximum(expected, 1.0)):
        k = int(np.argmax(err / np.maximum(expected, 1.0)))
        a, b = table.basis[k // n], table.basis[k % n]
        raise NoDimensionFunctionError(f"multiplicativity fails at ({a!r}, {b!r})")

    exact = "integer" if np.all(np.abs(values - np.round(values)) <= tol) else "numeric"
    if exact == "integer":
        values = np.round(values)
    return DimensionFunction(dict(zip(table.basis, (float(v) for v in values))), exactness=exact)


def ring_dims(ring: Ring) -> DimensionFunction:
    """Attached dimension data when present, else the Perron computation."""
    if ring.is_lazy:
        if not ring.has_dims:
            raise NoDimensionFunctionError(f"ring {ring.name} carries no dimension data")
        raise NoDimensionFunctionError("lazy rings expose dimensions per label, not as a table")
    if ring.dims is not None:
        return ring.dims
    return frobenius_perron_dims(ring)


def dim_of(ring: Ring, label: str) -> float:
    """Dimension of one basis label, for finite or lazy rings."""
    if ring.is_lazy:
        return ring.dim(label)
    return ring_dims(ring)(label)


def group_of_units(ring: BasedRingTable, dims: DimensionFunction, tol: float = DIM_TOL) -> list[str]:
    """Basis labels of dimension 1; checked to close under product and involution."""
    units = [b for b in ring.basis if abs(dims(b) - 1.0) <= tol]
    uset = set(units)
    for g in units:
        if ring.involution_of(g) not in uset:
            raise UnitGroupError(f"dual of {g!r} falls outside the dimension-one labels")
        for h in units:
            p = ring.product(g, h)
            if p.total() != 1 or p.support()[0] not in uset:
                raise UnitGroupError(f"product {g!r}*{h!r} leaves the dimension-one labels")
    return units
