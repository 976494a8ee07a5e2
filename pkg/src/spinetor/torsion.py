"""Twisted chain complexes over Z[t, t^-1] and their torsion.

The twisting follows the maximal abelian route: a homomorphism from first
homology to Z is realized by an integer cellular 1-cocycle, every boundary
incidence acquires the monomial t^(cocycle along its base-vertex path),
and preferred generator lifts are encoded by the integer offsets read off
an Euler chain.  The torsion of an acyclic complex is the alternating
product of transition determinants

    tau = prod_i det[ d(b_{i+1}) | b_i ]^((-1)^i) * t^(-sum ind(s)*offset(s))

computed exactly over Q(t) with fraction-free elimination; the result is
only defined up to sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cellular import IntegerChainComplex, PatternedComplex, absolute_complex, ind
from .laurent import LaurentPoly, RationalFunction
from .matrices import (LaurentFieldOps, RationalOps, greedy_independent_columns,
                       kernel_basis, laurent_det, laurent_rank, rational_det,
                       rational_rank, smith_normal_form, solve_integer)


class NonAcyclicError(ValueError):
    def __init__(self, ranks):
        self.ranks = ranks
        super().__init__(f"complex is not acyclic over Q(t); rank table {ranks}")


class CocycleError(ValueError):
    pass


# ----------------------------------------------------------------------
# first homology of the absolute complex, and dual cocycles
# ----------------------------------------------------------------------

@dataclass
class HomologyModel:
    """H1 of a cellularization in Smith normal form coordinates."""
    complex: PatternedComplex
    one_cells: list
    cycle_basis: list          # list of vectors over one_cells
    free_rank: int
    torsion_orders: list
    _coord_transform: list     # rows: coordinates of a cycle-basis vector

    def cycle_coordinates(self, cycle_vector):
        """(free coords, torsion coords) of a 1-cycle given as a dict."""
        vec = [cycle_vector.get(k, 0) for k in self.one_cells]
        cols = [[b[i] for b in self.cycle_basis] for i in range(len(self.one_cells))]
        coeffs = solve_integer(cols, vec)
        if coeffs is None:
            raise CocycleError("vector is not a 1-cycle")
        coords = [sum(r[j] * coeffs[j] for j in range(len(coeffs)))
                  for r in self._coord_transform]
        free = tuple(coords[:self.free_rank])
        tors = tuple(c % d for c, d in zip(coords[self.free_rank:], self.torsion_orders))
        return free, tors


def homology_model(pc: PatternedComplex) -> HomologyModel:
    cc = absolute_complex(pc)
    one_cells = cc.generators[1]
    d1 = cc.boundaries[1]
    d2 = cc.boundaries[2]
    K = kernel_basis(d1)            # rows: cycle basis vectors
    # express the boundary columns in the cycle basis
    kcols = [[K[j][i] for j in range(len(K))] for i in range(len(one_cells))]
    n2 = len(cc.generators[2])
    A = [[0] * n2 for _ in range(len(K))]
    for c in range(n2):
        col = [d2[r][c] for r in range(len(one_cells))]
        sol = solve_integer(kcols, col)
        if sol is None:
            raise CocycleError("boundary column outside the cycle lattice")
        for j in range(len(K)):
            A[j][c] = sol[j]
    if len(K) == 0:
        return HomologyModel(pc, one_cells, K, 0, [], [])
    d, u, v = smith_normal_form(A)
    diag = [d[i][i] for i in range(min(len(A), n2 or 0))] if n2 else []
    diag += [0] * (len(K) - len(diag))
    free_rows = [i for i in range(len(K)) if i >= len(diag) or diag[i] == 0]
    tors_rows = [i for i in range(len(diag)) if diag[i] not in (0, 1)]
    transform = [u[i] for i in free_rows] + [u[i] for i in tors_rows]
    return HomologyModel(pc, one_cells, K, len(free_rows),
                         [diag[i] for i in tors_rows], transform)


def h1_cocycle(pc: PatternedComplex, projection=None):
    """An integer cellular 1-cocycle realizing a projection H1 -> Z.

    With no explicit projection the first homology must be free of rank
    one, and the dual of its generator is used.  The result is a dict
    1-cell -> integer with zero coboundary, whose value on any 1-cycle is
    the projection of the cycle's class.
    """
    model = homology_model(pc)
    if projection is None:
        if model.free_rank != 1:
            raise CocycleError(
                f"automatic projection needs free rank 1, got {model.free_rank}")
        projection = (1,)
    projection = tuple(projection)
    if len(projection) != model.free_rank:
        raise CocycleError("projection length does not match free rank")
    if model.free_rank == 0 and any(projection):
        raise CocycleError("nonzero projection requested on torsion-only H1")
    # want c with c . K_j = projection(class of K_j) for all cycle basis
    # vectors; this forces c to vanish on boundaries
    values = []
    for b in model.cycle_basis:
        free, _ = model.cycle_coordinates(
            {k: b[i] for i, k in enumerate(model.one_cells)})
        values.append(sum(p * f for p, f in zip(projection, free)))
    rows = [list(b) for b in model.cycle_basis]
    sol = solve_integer(rows, values)
    if sol is None:
        raise CocycleError("no integral cocycle realizes this projection")
    cocycle = {k: sol[i] for i, k in enumerate(model.one_cells)}
    _assert_cocycle(pc, cocycle)
    return cocycle


def _assert_cocycle(pc: PatternedComplex, cocycle):
    for key in pc.cells_by_dim[2]:
        total = sum(s * cocycle[k] for k, s in pc.word2[key])
        if total != 0:
            raise CocycleError(f"coboundary does not vanish on {key}")


def path_integral(cocycle, path):
    return sum(s * cocycle[k] for k, s in path)


# ----------------------------------------------------------------------
# twisting
# ----------------------------------------------------------------------

@dataclass
class LaurentChainComplex:
    generators: list           # per dimension, list of cell keys
    boundaries: dict           # dim -> matrix over LaurentPoly
    offsets: dict              # generator -> integer lift offset
    complex: PatternedComplex | None = None
    cocycle: dict | None = None

    def dims(self):
        return tuple(len(g) for g in self.generators)

    def at_one(self):
        out = {}
        for dim, mat in self.boundaries.items():
            out[dim] = [[entry.at_one() for entry in row] for row in mat]
        return out

    def specialize(self, value):
        """Boundary matrices with t := value, as exact Fractions."""
        out = {}
        for dim, mat in self.boundaries.items():
            out[dim] = [[entry.evaluate(value) for entry in row] for row in mat]
        return out


def twist(cc: IntegerChainComplex, cocycle) -> LaurentChainComplex:
    """Lift the relative complex to the maximal abelian cover.

    Every incidence occurrence contributes sign * t^(integral of the
    cocycle along its base-vertex path); offsets start out zero.
    """
    pc = cc.complex
    boundaries = {}
    for dim in (1, 2, 3):
        rows = cc.generators[dim - 1]
        cols = cc.generators[dim]
        row_index = {k: r for r, k in enumerate(rows)}
        inc = pc.incidences(dim)
        mat = [[LaurentPoly.zero() for _ in cols] for _ in rows]
        for c, key in enumerate(cols):
            for k, s, path in inc[key]:
                if k in row_index:
                    w = path_integral(cocycle, path)
                    mat[row_index[k]][c] += LaurentPoly.monomial(w, s)
        boundaries[dim] = mat
    lcc = LaurentChainComplex(cc.generators, boundaries,
                              {k: 0 for lst in cc.generators for k in lst},
                              pc, dict(cocycle))
    _assert_twist(lcc, cc)
    return lcc


def _assert_twist(lcc: LaurentChainComplex, cc: IntegerChainComplex):
    for dim in (1, 2, 3):
        if lcc.at_one()[dim] != cc.boundaries[dim]:
            raise CocycleError(f"t=1 specialization differs from d_{dim}")
    for dim in (2, 3):
        a = lcc.boundaries[dim - 1]
        b = lcc.boundaries[dim]
        for i in range(len(a)):
            for j in range(len(b[0]) if b else 0):
                total = LaurentPoly.zero()
                for k in range(len(b)):
                    total += a[i][k] * b[k][j]
                if not total.is_zero():
                    raise CocycleError("twisted boundary of boundary is nonzero")


# ----------------------------------------------------------------------
# torsion
# ----------------------------------------------------------------------

@dataclass
class TorsionValue:
    value: RationalFunction
    mode: str
    rank_certificate: tuple

    def __repr__(self):
        return f"TorsionValue({self.value!r}, mode={self.mode})"


def _acyclicity_ranks(mats, dims, rank_fn):
    ranks = {}
    for i in (1, 2, 3):
        ranks[i] = rank_fn(mats[i]) if dims[i] and dims[i - 1] else 0
    table = []
    acyclic = True
    for i in range(4):
        r_out = ranks.get(i, 0)
        r_in = ranks.get(i + 1, 0)
        table.append((i, dims[i], r_out, r_in))
        if r_out + r_in != dims[i]:
            acyclic = False
    return acyclic, tuple(table), ranks


def _transition_matrices(mats, dims, ranks, ops):
    """The square matrices [d(b_{i+1}) | e_{b_i}] of the torsion formula."""
    chosen = {0: []}
    for i in (1, 2, 3):
        if ranks[i]:
            chosen[i] = greedy_independent_columns(mats[i], ranks[i], ops)
        else:
            chosen[i] = []
    chosen[4] = []
    out = []
    for i in range(4):
        n = dims[i]
        cols = []
        if i + 1 <= 3:
            for c in chosen[i + 1]:
                cols.append([mats[i + 1][r][c] for r in range(n)])
        for c in chosen[i]:
            col = [ops.zero] * n
            col[c] = ops.one
            cols.append(col)
        if len(cols) != n:
            raise NonAcyclicError(tuple())
        out.append([[cols[c][r] for c in range(n)] for r in range(n)])
    return out, chosen


def torsion(lcc: LaurentChainComplex, offsets=None, column_choice=None) -> TorsionValue:
    """Torsion of an acyclic twisted complex, refined by lift offsets.

    Raises NonAcyclicError (with the rank table) when the complex is not
    acyclic over the fraction field.
    """
    offsets = offsets if offsets is not None else lcc.offsets
    dims = {i: len(g) for i, g in enumerate(lcc.generators)}
    acyclic, table, ranks = _acyclicity_ranks(lcc.boundaries, dims, laurent_rank)
    if not acyclic:
        raise NonAcyclicError(table)
    ops = LaurentFieldOps()
    if column_choice is not None:
        chosen = column_choice
        mats = []
        for i in range(4):
            n = dims[i]
            cols = []
            if i + 1 <= 3:
                for c in chosen[i + 1]:
                    cols.append([lcc.boundaries[i + 1][r][c] for r in range(n)])
            for c in chosen[i]:
                col = [ops.zero] * n
                col[c] = ops.one
                cols.append(col)
            mats.append([[cols[c][r] for c in range(n)] for r in range(n)])
    else:
        mats, chosen = _transition_matrices(lcc.boundaries, dims, ranks, ops)
    num = LaurentPoly.one()
    den = LaurentPoly.one()
    for i, m in enumerate(mats):
        det = laurent_det(m)
        if det.is_zero():
            raise NonAcyclicError(table)
        if i % 2 == 0:
            num = num * det
        else:
            den = den * det
    shift = -_offset_shift(lcc.generators, offsets)
    value = RationalFunction.from_laurent_fraction(num, den).times_monomial(shift)
    mode = lcc.complex.mode if lcc.complex is not None else "synthetic"
    return TorsionValue(value, mode, table)


def _offset_shift(generators, offsets):
    return sum((-1) ** d * offsets.get(k, 0)
               for d, lst in enumerate(generators) for k in lst)


def equivariance_shift(tv: TorsionValue, projection_value: int) -> TorsionValue:
    """Multiply the torsion by t^projection_value (the equivariance action
    of a homology class with that projection)."""
    return TorsionValue(tv.value.times_monomial(projection_value),
                        tv.mode, tv.rank_certificate)


# ----------------------------------------------------------------------
# evaluation oracle: the same computation over Q after t := value
# ----------------------------------------------------------------------

def torsion_specialized(lcc: LaurentChainComplex, value, offsets=None):
    """|tau(t := value)| recomputed from scratch over Q, with its own greedy
    column choices; used as an independent consistency oracle."""
    offsets = offsets if offsets is not None else lcc.offsets
    mats = lcc.specialize(value)
    dims = {i: len(g) for i, g in enumerate(lcc.generators)}
    acyclic, table, ranks = _acyclicity_ranks(mats, dims, rational_rank)
    if not acyclic:
        raise NonAcyclicError(table)
    ops = RationalOps()
    sq, _ = _transition_matrices(mats, dims, ranks, ops)
    total = Fraction(1)
    for i, m in enumerate(sq):
        det = rational_det(m)
        if det == 0:
            raise NonAcyclicError(table)
        total = total * det if i % 2 == 0 else total / det
    shift = -_offset_shift(lcc.generators, offsets)
    return abs(total * Fraction(value) ** shift)
