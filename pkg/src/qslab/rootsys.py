"""Simply-laced root systems built by additive closure.

Positive roots are stored as integer coefficient vectors over the simple
roots; weights are integer coefficient vectors over the fundamental
weights.  With the bilinear form normalized so that every root has squared
length 2, the pairing of a weight with a root is a plain integer dot
product, and the height of a root equals its pairing with the all-ones
weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

Weight = tuple[int, ...]

# Dynkin edges in Bourbaki numbering: nodes 1,3,4,...,rank form the chain
# and node 2 hangs off node 4.
_E_SERIES_EDGES = {
    "E6": ((1, 3), (3, 4), (4, 5), (5, 6), (2, 4)),
    "E7": ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)),
    "E8": ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)),
}

# Guard for the closure loop: any valid input here has at most 120 positive
# roots, so hitting this bound means the matrix is of infinite type.
_CLOSURE_BOUND = 200


def cartan_matrix(type_label: str) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix of E6/E7/E8 in Bourbaki node numbering."""
    try:
        edges = _E_SERIES_EDGES[type_label]
    except KeyError:
        raise ValueError(f"unknown type label {type_label!r}") from None
    rank = int(type_label[1])
    rows = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for a, b in edges:
        rows[a - 1][b - 1] = -1
        rows[b - 1][a - 1] = -1
    return tuple(tuple(r) for r in rows)


def a_series_cartan(rank: int) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix of the chain A_n, used for solver cross-checks."""
    if rank < 1:
        raise ValueError("rank must be positive")
    return tuple(
        tuple(2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(rank))
        for i in range(rank)
    )


@dataclass(frozen=True)
class RootSystem:
    """An irreducible simply-laced root system.

    ``positive_roots`` is ordered by height, then lexicographically on the
    coefficient vectors; this canonical order is stable across runs and is
    what root indices refer to everywhere in this package.
    """

    type_label: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    marks: tuple[int, ...]
    coxeter_number: int
    highest_root_index: int

    @cached_property
    def heights(self) -> tuple[int, ...]:
        return tuple(sum(b) for b in self.positive_roots)

    @cached_property
    def rho(self) -> Weight:
        """The all-ones weight (half the sum of the positive roots)."""
        return (1,) * self.rank

    @cached_property
    def theta_weight(self) -> Weight:
        """The highest root expressed in the fundamental-weight basis."""
        return self.root_as_weight(self.highest_root_index)

    @cached_property
    def inverse_cartan(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact inverse of the Cartan matrix (Gauss-Jordan over Q)."""
        n = self.rank
        aug = [
            [Fraction(self.cartan[i][j]) for j in range(n)]
            + [Fraction(1 if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        for col in range(n):
            piv = next(r for r in range(col, n) if aug[r][col] != 0)
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = Fraction(1) / aug[col][col]
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return tuple(tuple(row[n:]) for row in aug)

    @cached_property
    def neighbors(self) -> dict[int, tuple[int, ...]]:
        """Dynkin adjacency, 1-based nodes."""
        return {
            i: tuple(j for j in range(1, self.rank + 1)
                     if j != i and self.cartan[i - 1][j - 1] == -1)
            for i in range(1, self.rank + 1)
        }

    @cached_property
    def _root_index(self) -> dict[tuple[int, ...], int]:
        return {b: n for n, b in enumerate(self.positive_roots)}

    def pairing(self, weight: Sequence[int], root_index: int) -> int:
        """(weight | beta) for the positive root with the given index."""
        b = self.positive_roots[root_index]
        if len(weight) != self.rank:
            raise ValueError("weight has wrong rank")
        return sum(w * c for w, c in zip(weight, b))

    def height(self, root_index: int) -> int:
        return self.heights[root_index]

    def root_as_weight(self, root_index: int) -> Weight:
        """Coefficient vector of a root rewritten in the weight basis."""
        b = self.positive_roots[root_index]
        return tuple(
            sum(self.cartan[j][i] * b[i] for i in range(self.rank))
            for j in range(self.rank)
        )

    def simple_root_as_weight(self, i: int) -> Weight:
        """alpha_i in the fundamental-weight basis (row i of the Cartan matrix)."""
        return self.cartan[i - 1]

    def to_root_basis(self, weight: Sequence[int]) -> tuple[Fraction, ...]:
        """Exact coordinates of a weight over the simple roots."""
        inv = self.inverse_cartan
        return tuple(
            sum(inv[i][j] * weight[j] for j in range(self.rank))
            for i in range(self.rank)
        )

    def find_root(self, coeffs: Sequence[int]) -> int:
        """Canonical index of a root given by its coefficient vector."""
        return self._root_index[tuple(coeffs)]


def is_dominant(weight: Sequence[int]) -> bool:
    return all(c >= 0 for c in weight)


def fundamental_weight(rank: int, node: int, multiple: int = 1) -> Weight:
    """The weight ``multiple * w_node`` as a coefficient tuple."""
    if not 1 <= node <= rank:
        raise ValueError(f"node {node} out of range for rank {rank}")
    return tuple(multiple if j == node - 1 else 0 for j in range(rank))


def _validate_cartan(matrix: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("Cartan matrix must be square and nonempty")
    for i in range(n):
        if rows[i][i] != 2:
            raise ValueError("Cartan matrix must have diagonal entries 2")
        for j in range(n):
            if i != j:
                if rows[i][j] != rows[j][i]:
                    raise ValueError("Cartan matrix must be symmetric (simply laced)")
                if rows[i][j] not in (0, -1):
                    raise ValueError("off-diagonal entries must be 0 or -1")
    # Irreducibility: the Dynkin graph must be connected.
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if j not in seen and rows[i][j] == -1:
                seen.add(j)
                frontier.append(j)
    if len(seen) != n:
        raise ValueError("Cartan matrix is not irreducible")
    return rows


def build_root_system(spec: str | Sequence[Sequence[int]]) -> RootSystem:
    """Build a root system from a type label (E6/E7/E8) or a Cartan matrix.

    Positive roots are enumerated by additive closure: starting from the
    simple roots, beta + alpha_j is appended whenever (beta | alpha_j) < 0,
    which for simply-laced systems is the exact root-addition criterion.
    The closure is then sorted by height, then lexicographically.
    """
    if isinstance(spec, str):
        label = spec.upper()
        cartan = cartan_matrix(label)
    else:
        label = "custom"
        cartan = _validate_cartan(spec)
    rank = len(cartan)

    simple = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        fresh = []
        for b in frontier:
            # (beta | alpha_j) in the length-2 normalization is (C b)_j.
            for j in range(rank):
                if sum(cartan[j][i] * b[i] for i in range(rank)) < 0:
                    nb = tuple(b[i] + (1 if i == j else 0) for i in range(rank))
                    if nb not in roots:
                        # every root of a finite simply-laced system has norm
                        # 2; a norm <= 0 vector certifies an affine/indefinite
                        # matrix even when the closure stalls early.
                        norm = sum(
                            nb[p] * cartan[p][q] * nb[q]
                            for p in range(rank) for q in range(rank)
                        )
                        if norm != 2:
                            raise ValueError(
                                "closure produced a non-root vector: not of finite type"
                            )
                        roots.add(nb)
                        fresh.append(nb)
        if len(roots) > _CLOSURE_BOUND:
            raise ValueError("closure does not terminate: not of finite type")
        frontier = fresh

    ordered = sorted(roots, key=lambda b: (sum(b), b))
    top_height = sum(ordered[-1])
    if len(ordered) > 1 and sum(ordered[-2]) == top_height:
        raise ValueError("no unique highest root: input is not irreducible finite type")
    marks = ordered[-1]
    rs = RootSystem(
        type_label=label,
        rank=rank,
        cartan=cartan,
        positive_roots=tuple(ordered),
        marks=marks,
        coxeter_number=top_height + 1,
        highest_root_index=len(ordered) - 1,
    )
    if label in _E_SERIES_EDGES:
        expected = {"E6": 36, "E7": 63, "E8": 120}[label]
        if len(ordered) != expected:
            raise AssertionError(
                f"{label}: enumerated {len(ordered)} positive roots, expected {expected}"
            )
    return rs


def delta(rs: RootSystem, node: int) -> int:
    """Number of positive roots pairing oddly with the fundamental weight."""
    if not 1 <= node <= rs.rank:
        raise ValueError(f"node {node} out of range")
    return sum(1 for b in rs.positive_roots if b[node - 1] % 2 == 1)


def lee_witness(rs: RootSystem, node: int, r: int) -> int:
    """Index of a positive root with (w_node | beta) = 1 and height r.

    Such a root exists for every node and every r in [1, h-1] in the E types;
    absence is reported as an error because it would falsify that fact.
    """
    h = rs.coxeter_number
    if not 1 <= r <= h - 1:
        raise ValueError(f"height {r} outside [1, {h - 1}]")
    for idx, (b, ht) in enumerate(zip(rs.positive_roots, rs.heights)):
        if ht == r and b[node - 1] == 1:
            return idx
    raise LookupError(
        f"no positive root with unit pairing at node {node} and height {r}"
    )


def height_symmetry_check(rs: RootSystem, node: int) -> bool:
    """Whether the unit-pairing roots are height-symmetric about h/2.

    Counts, for each r, the positive roots beta with (w_node | beta) = 1 at
    height r versus height h - r, and reports whether all counts agree.
    """
    h = rs.coxeter_number
    counts: dict[int, int] = {}
    for b, ht in zip(rs.positive_roots, rs.heights):
        if b[node - 1] == 1:
            counts[ht] = counts.get(ht, 0) + 1
    return all(counts.get(r, 0) == counts.get(h - r, 0) for r in range(1, h))
