"""Exact integer simplicial homology.

Boundary operators are sparse integer matrices over Python ints; ranks and invariant
factors come from a Smith normal form elimination that always pivots on an entry of
least absolute value.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

from sympy import factorint

from .complexes import SimplicialComplex, nerve
from .graph_core import GuardExceeded
from .mcp_env import get_config
from .qm_engine import InvariantViolation

logger = logging.getLogger(__name__)

DENSE_CHECK_LIMIT = 50

DISTINGUISHED = "distinguished"
NOT_DISTINGUISHED = "not_distinguished_by_this_invariant"


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", {k: v for k, v in self.entries.items() if v})

    @classmethod
    def from_dense(cls, data: list) -> "IntegerMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row)})

    def to_dense(self) -> list:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: dict = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        product: dict = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                product[(i, j)] = product.get((i, j), 0) + a * b
        return IntegerMatrix(self.rows, other.cols, product)

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple
    rank: int


@dataclass(frozen=True)
class HomologyGroup:
    betti: int = 0
    torsion: tuple = ()

    def is_trivial(self) -> bool:
        return self.betti == 0 and not self.torsion

    def render(self) -> str:
        parts = []
        if self.betti == 1:
            parts.append("Z")
        elif self.betti > 1:
            parts.append(f"Z^{self.betti}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomologySignature:
    groups: tuple
    reduced: bool

    @property
    def betti(self) -> tuple:
        return tuple(g.betti for g in self.groups)

    def normalized(self) -> tuple:
        groups = list(self.groups)
        while groups and groups[-1].is_trivial():
            groups.pop()
        return tuple(groups)

    def is_acyclic(self) -> bool:
        return not self.normalized()

    def render(self) -> list:
        tilde = "~" if self.reduced else ""
        return [f"H{tilde}_{k} = {g.render()}" for k, g in enumerate(self.groups)]


@dataclass(frozen=True)
class DegreeSupport:
    has_free: bool
    elementary_divisors: frozenset


@dataclass(frozen=True)
class WedgeSupport:
    degrees: tuple
    reduced: bool = True

    def normalized(self) -> tuple:
        degrees = list(self.degrees)
        while degrees and not degrees[-1].has_free and not degrees[-1].elementary_divisors:
            degrees.pop()
        return tuple(degrees)


@dataclass(frozen=True)
class WedgeVerdict:
    verdict: str
    differing_degrees: tuple

    @property
    def distinguished(self) -> bool:
        return self.verdict == DISTINGUISHED


def same_homology(a: HomologySignature, b: HomologySignature) -> bool:
    if a.reduced != b.reduced:
        raise SignatureMismatch("cannot compare reduced with unreduced homology")
    return a.normalized() == b.normalized()


def _faces(K: SimplicialComplex, max_degree: int, guard: int) -> list:
    levels = [set() for _ in range(max_degree + 1)]
    total = 0
    for facet in K.facets:
        ordered = tuple(sorted(facet))
        for k in range(min(len(ordered), max_degree + 1)):
            for face in itertools.combinations(ordered, k + 1):
                if face not in levels[k]:
                    levels[k].add(face)
                    total += 1
                    if total > guard:
                        raise GuardExceeded("face enumeration", total, guard)
    return [sorted(level) for level in levels]


def boundary_matrices(
    K: SimplicialComplex, max_degree: Optional[int] = None, check: bool = True
) -> list:
    """[d_0, ..., d_max]; d_k sends k-faces to (k-1)-faces with sorted-vertex orientation."""
    guard = get_config().face_guard
    if max_degree is None:
        max_degree = max(K.dimension, 0)
    faces = _faces(K, max_degree, guard)
    matrices = [IntegerMatrix(0, len(faces[0]))]
    for k in range(1, max_degree + 1):
        position = {f: i for i, f in enumerate(faces[k - 1])}
        entries = {}
        for j, face in enumerate(faces[k]):
            for i in range(len(face)):
                entries[(position[face[:i] + face[i + 1:]], j)] = -1 if i % 2 else 1
        matrices.append(IntegerMatrix(len(faces[k - 1]), len(faces[k]), entries))
    if check:
        for k in range(1, max_degree):
            if not (matrices[k] @ matrices[k + 1]).is_zero():
                raise InvariantViolation(f"boundary of boundary is nonzero in degree {k + 1}")
    return matrices


def _eliminate(M: IntegerMatrix) -> list:
    """Diagonal entries (absolute values) of a sparse Smith-style elimination."""
    rows: dict = {}
    columns: dict = {}
    for (i, j), v in M.entries.items():
        rows.setdefault(i, {})[j] = v
        columns.setdefault(j, set()).add(i)

    def set_entry(i, j, v):
        if v:
            rows[i][j] = v
            columns.setdefault(j, set()).add(i)
        else:
            rows[i].pop(j, None)
            columns[j].discard(i)

    def add_row(target, source, factor):
        for j, v in list(rows[source].items()):
            set_entry(target, j, rows[target].get(j, 0) + factor * v)

    def pick_pivot():
        for i, row in rows.items():
            for j, v in row.items():
                if v in (1, -1):
                    return i, j
        return min(
            ((i, j) for i, row in rows.items() for j in row),
            key=lambda ij: (abs(rows[ij[0]][ij[1]]), ij),
        )

    diagonal = []
    while True:
        for i in [i for i, row in rows.items() if not row]:
            del rows[i]
        if not rows:
            break
        r, c = pick_pivot()
        while True:
            p = rows[r][c]
            for k in sorted(columns[c] - {r}):
                add_row(k, r, -(rows[k][c] // p))
            rest = columns[c] - {r}
            if rest:
                r = min(rest, key=lambda k: (abs(rows[k][c]), k))
                continue
            for j in [j for j in rows[r] if j != c]:
                a = rows[r][j]
                set_entry(r, j, a - (a // p) * p)
            others = [j for j in rows[r] if j != c]
            if others:
                c = min(others, key=lambda j: (abs(rows[r][j]), j))
                continue
            break
        diagonal.append(abs(p))
        columns[c].discard(r)
        del rows[r]
    return diagonal


def _invariant_factors(diagonal: list) -> tuple:
    """Rearrange diagonal entries into a divisibility chain via their prime powers."""
    factors = [1] * len(diagonal)
    exponents: dict = {}
    for d in diagonal:
        if d > 1:
            for prime, e in factorint(d).items():
                exponents.setdefault(prime, []).append(e)
    last = len(diagonal) - 1
    for prime, powers in exponents.items():
        for i, e in enumerate(sorted(powers, reverse=True)):
            factors[last - i] *= prime**e
    return tuple(sorted(factors))


def dense_smith(M: IntegerMatrix) -> tuple:
    """(D, P, Q) with P @ M @ Q == D diagonal, d_1 | d_2 | ..., for small matrices."""
    A = M.to_dense()
    m, n = M.rows, M.cols
    P = [[int(i == j) for j in range(m)] for i in range(m)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        P[a], P[b] = P[b], P[a]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in Q:
            row[a], row[b] = row[b], row[a]

    def add_row(target, source, factor):
        A[target] = [x + factor * y for x, y in zip(A[target], A[source])]
        P[target] = [x + factor * y for x, y in zip(P[target], P[source])]

    def add_col(target, source, factor):
        for row in A:
            row[target] += factor * row[source]
        for row in Q:
            row[target] += factor * row[source]

    for t in range(min(m, n)):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            leftovers = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            leftovers += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            if leftovers:
                _, i, j = min(leftovers)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            stray = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]),
                None,
            )
            if stray is None:
                break
            add_row(t, stray, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            P[t] = [-x for x in P[t]]
    return A, P, Q


def smith_normal_form(M: IntegerMatrix, verify: bool = True) -> SmithForm:
    diagonal = _eliminate(M)
    form = SmithForm(invariant_factors=_invariant_factors(diagonal), rank=len(diagonal))
    if verify and M.rows <= DENSE_CHECK_LIMIT and M.cols <= DENSE_CHECK_LIMIT:
        D, P, Q = dense_smith(M)
        if M.rows and M.cols:
            product = IntegerMatrix.from_dense(P) @ M @ IntegerMatrix.from_dense(Q)
            if product.to_dense() != D:
                raise InvariantViolation("Smith transforms do not reproduce the diagonal form")
        dense_factors = tuple(D[i][i] for i in range(min(M.rows, M.cols)) if D[i][i])
        if dense_factors != form.invariant_factors:
            raise InvariantViolation(
                "sparse and dense Smith forms disagree",
                (dense_factors, form.invariant_factors),
            )
    return form


def _face_estimate(K: SimplicialComplex) -> int:
    return sum(2 ** len(f) - 1 for f in K.facets)


def simplify(K: SimplicialComplex) -> SimplicialComplex:
    """Pass to nerves of maximal faces while that shrinks the complex; homotopy type is kept."""
    current, cost = K, _face_estimate(K)
    while True:
        candidate = nerve(list(current.facets))
        candidate_cost = _face_estimate(candidate)
        if candidate_cost >= cost:
            return current
        logger.debug(f"nerve reduction: face estimate {cost} -> {candidate_cost}")
        current, cost = candidate, candidate_cost


def homology(
    K: SimplicialComplex, reduced: bool = False, use_nerve: bool = True
) -> HomologySignature:
    if K.is_empty():
        return HomologySignature(groups=(), reduced=reduced)
    work = simplify(K) if use_nerve else K
    top = work.dimension
    matrices = boundary_matrices(work, top)
    forms = [smith_normal_form(d) for d in matrices]
    sizes = [d.cols for d in matrices]
    groups = []
    for k in range(top + 1):
        rank_out = (1 if reduced and sizes[0] else 0) if k == 0 else forms[k].rank
        if k + 1 <= top:
            rank_in = forms[k + 1].rank
            torsion = tuple(d for d in forms[k + 1].invariant_factors if d > 1)
        else:
            rank_in, torsion = 0, ()
        groups.append(HomologyGroup(betti=sizes[k] - rank_out - rank_in, torsion=torsion))
    while len(groups) <= K.dimension:
        groups.append(HomologyGroup())
    return HomologySignature(groups=tuple(groups[: K.dimension + 1]), reduced=reduced)


def euler_characteristic(K: SimplicialComplex) -> int:
    faces = _faces(K, max(K.dimension, 0), get_config().face_guard)
    return sum((-1) ** k * len(level) for k, level in enumerate(faces)) if K.vertices else 0


def wedge_support(signature: HomologySignature) -> WedgeSupport:
    if not signature.reduced:
        raise SignatureMismatch("wedge supports are defined for reduced homology")
    degrees = []
    for group in signature.groups:
        divisors = set()
        for d in group.torsion:
            divisors.update(prime**e for prime, e in factorint(d).items())
        degrees.append(DegreeSupport(group.betti > 0, frozenset(divisors)))
    return WedgeSupport(degrees=tuple(degrees))


def compare_wedge_supports(first: WedgeSupport, second: WedgeSupport) -> WedgeVerdict:
    if first.reduced != second.reduced or not first.reduced:
        raise SignatureMismatch("wedge supports must both come from reduced homology")
    a, b = first.normalized(), second.normalized()
    empty = DegreeSupport(False, frozenset())
    differing = tuple(
        k
        for k in range(max(len(a), len(b)))
        if (a[k] if k < len(a) else empty) != (b[k] if k < len(b) else empty)
    )
    return WedgeVerdict(DISTINGUISHED if differing else NOT_DISTINGUISHED, differing)
