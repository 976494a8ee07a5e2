"""Combinatorial Euler chains carried by a branched spine.

The chain is represented as a forest of spiders: each component has a head
cell and legs running to target cells.  A leg with coefficient k and path p
stands for the singular 1-chain k * p, where p runs from the head's base
vertex to the target's base vertex; the path is a sequence of signed
1-cells, which is enough to evaluate any cellular 1-cocycle along the leg
(and hence to select preferred lifts in the maximal abelian cover).

The defining identity, asserted exactly on construction, is that the
formal boundary of the whole chain is

    sum over relative generators s of (-1)^dim(s) * p_s.

Orbit legs realize the flow through each interior dual cell: the dual of a
spine region runs to the black end of its truncated edge, the dual of a
spine edge exits its hexagon at the midpoint of the sink-slot long edge,
and the dual of a spine vertex exits through the all-black truncation
triangle.  Star and bi-arrow corrections at black boundary cells make the
orbit chain into an Euler chain; their exact shape depends on the
subdivision mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cellular import (BLACK, ECONOMICAL, FULL_KITE, INTERIOR, TANGENCY, WHITE, X0,
                       PatternedComplex, ind)
from .spine import FACE_VERTICES, SpineError


@dataclass(frozen=True)
class Leg:
    target: tuple
    coeff: int
    path: tuple        # signed 1-cells from base(head) to base(target)
    tag: str


@dataclass
class Spider:
    head: tuple
    legs: list


@dataclass
class SpiderForest:
    complex: PatternedComplex
    components: list
    pattern: str = "convex"    # "convex": generators away from white+tangency

    def all_legs(self):
        for comp in self.components:
            for leg in comp.legs:
                yield comp, leg

    def component_of_target(self, target):
        for comp in self.components:
            for leg in comp.legs:
                if leg.target == target:
                    return comp
        raise KeyError(target)

    def as_chain(self):
        """The underlying 1-chain as a vector over 1-cells."""
        chain = {}
        for comp, leg in self.all_legs():
            for cell, sign in leg.path:
                chain[cell] = chain.get(cell, 0) + leg.coeff * sign
        return {k: v for k, v in chain.items() if v != 0}


def _generators(pc: PatternedComplex, pattern):
    if pattern == "convex":
        allowed = (INTERIOR, BLACK)
    else:
        allowed = (INTERIOR, BLACK, TANGENCY)
    return {k for k, c in pc.cells.items() if c.color in allowed}


def check_boundary_identity(forest: SpiderForest):
    """Assert formal boundary == sum of ind(s) * p_s over generators."""
    pc = forest.complex
    gens = _generators(pc, forest.pattern)
    covered = {}
    for comp in forest.components:
        total = ind(pc.cells[comp.head].dim)
        covered[comp.head] = covered.get(comp.head, 0) + 1
        for leg in comp.legs:
            expected = ind(pc.cells[leg.target].dim)
            if leg.coeff != expected:
                raise SpineError(f"leg to {leg.target} has coefficient {leg.coeff}, "
                                 f"expected {expected}")
            covered[leg.target] = covered.get(leg.target, 0) + 1
            total += leg.coeff
        if total != 0:
            raise SpineError(f"component at {comp.head}: index sum {total} != 0")
    missing = gens - set(covered)
    extra = set(covered) - gens
    double = {k for k, n in covered.items() if n != 1}
    if missing or extra or double:
        raise SpineError(f"boundary identity fails: missing={sorted(missing)} "
                         f"extra={sorted(extra)} double={sorted(double)}")


# ----------------------------------------------------------------------
# paths
# ----------------------------------------------------------------------

def word_walk(pc: PatternedComplex, cell2, goal_vertex):
    """Path along the boundary word of a 2-cell from its base vertex to the
    first visit of goal_vertex."""
    pos = pc.base[cell2]
    path = []
    if pos == goal_vertex:
        return ()
    for k, s in pc.word2[cell2]:
        path.append((k, s))
        t, h = pc.word1[k]
        pos = h if s == 1 else t
        if pos == goal_vertex:
            return tuple(path)
    raise SpineError(f"vertex {goal_vertex} not on boundary of {cell2}")


def tet_path_classes(pc: PatternedComplex, tet, start_class, goal_class):
    """Path between two 0-cells inside one truncated tetrahedron."""
    edges = []
    for cls, t_loc, h_loc in pc._tet_graph[tet]:
        if cls in pc.collapsed:
            continue
        edges.append((cls, pc.vclass(t_loc), pc.vclass(h_loc)))
    adj = {}
    for cls, t, h in sorted(edges):
        adj.setdefault(t, []).append((cls, 1, h))
        adj.setdefault(h, []).append((cls, -1, t))
    if start_class == goal_class:
        return ()
    prev = {start_class: None}
    frontier = [start_class]
    while frontier and goal_class not in prev:
        nxt = []
        for node in frontier:
            for cls, sgn, other in adj.get(node, []):
                if other not in prev:
                    prev[other] = (node, cls, sgn)
                    nxt.append(other)
        frontier = nxt
    if goal_class not in prev:
        raise SpineError("truncated tetrahedron skeleton is disconnected")
    path = []
    node = goal_class
    while prev[node] is not None:
        back, cls, sgn = prev[node]
        path.append((cls, sgn))
        node = back
    path.reverse()
    return tuple(path)


def reverse_path(path):
    return tuple((k, -s) for k, s in reversed(path))


# ----------------------------------------------------------------------
# orbit legs
# ----------------------------------------------------------------------

def _survives(pc, key):
    return key in pc.cells


def orbit_legs(pc: PatternedComplex):
    """One (head, Leg) pair per interior dual cell, following the flow."""
    tri = pc.tri
    out = []

    # duals of spine regions: second half of the truncated edge to its head
    for eclass in range(len(tri.edge_classes)):
        target = ("rhat", eclass)
        head = ("tv", eclass, 1)
        if not _survives(pc, head):
            head = X0
        path = ((target, -1),)
        out.append((head, Leg(target, -1, path, "orbit_region")))

    # duals of spine edges: exit the hexagon at the sink-slot midpoint
    for fclass in range(len(tri.face_classes)):
        target = ("ehat", fclass)
        mid = ("mid", fclass, 2)
        if _survives(pc, mid):
            head = mid
            walk = word_walk(pc, target, mid)
        else:
            head = X0
            walk = word_walk(pc, target, X0)
        out.append((head, Leg(target, 1, reverse_path(walk), "orbit_edge")))

    # duals of spine vertices: exit through the all-black triangle
    for i in range(tri.tet_count):
        target = ("vhat", i)
        if pc.mode == ECONOMICAL:
            endpoint = ("tri", i, 3)
        else:
            endpoint = ("ctr", i, 3)
        if _survives(pc, endpoint):
            head = endpoint
            walk = tet_path_classes(pc, i, pc.base[head], pc.base[target])
        else:
            head = X0
            walk = tet_path_classes(pc, i, X0, pc.base[target])
        out.append((head, Leg(target, -1, walk, "orbit_vertex")))
    return out


def orbit_chain(pc: PatternedComplex) -> SpiderForest:
    """The plain orbit chain (no corrections); one leg per spine cell."""
    grouped = {}
    for head, leg in orbit_legs(pc):
        grouped.setdefault(head, []).append(leg)
    comps = [Spider(head, legs) for head, legs in sorted(grouped.items())]
    return SpiderForest(pc, comps)


# ----------------------------------------------------------------------
# star / bi-arrow corrections
# ----------------------------------------------------------------------

def _chord_mid_matching(pc: PatternedComplex):
    """Around each tangency circle, match every chord to one of its two
    endpoint midpoints, bijectively (economical mode): each chord takes the
    midpoint it leaves through when the circle is traversed once."""
    matching = {}
    for circle in pc.tangency_circles():
        if not all(k[0] == "chord" for k in circle):
            continue
        cur = pc.word1[circle[0]][1]
        matching[circle[0]] = cur
        for chord in circle[1:]:
            t, h = pc.word1[chord]
            cur = h if t == cur else t
            matching[chord] = cur
    return matching


def _star_and_biarrow_legs(pc: PatternedComplex):
    """Correction legs, grouped by head cell."""
    grouped = {}

    def add(head, leg):
        grouped.setdefault(head, []).append(leg)

    tri = pc.tri
    if pc.mode == ECONOMICAL:
        # bi-arrows at the surviving sink-slot midpoints point down the two
        # halves of the black long edge the flow lands on
        for fclass in range(len(tri.face_classes)):
            mid = ("mid", fclass, 2)
            if not _survives(pc, mid):
                continue
            for half in (("lhalf", fclass, 2, 0), ("lhalf", fclass, 2, 1)):
                # path runs from the midpoint to base(half) = its tail vertex
                path = ((half, -1),) if pc.word1[half][1] == mid else ()
                add(mid, Leg(half, -1, path, "bi_arrow"))
        matching = _chord_mid_matching(pc)
        for chord, mid in matching.items():
            i, p = chord[1], chord[2]
            piece = ("piece", i, p, "b")
            # the star sits at the black end of the matched midpoint's side
            fclass, slot = mid[1], mid[2]
            black_half = ("lhalf", fclass, slot, 0)
            tv = pc.word1[black_half][0]
            if pc.cells[tv].color != BLACK:
                raise SpineError("correction star must sit at a black vertex")
            add(tv, Leg(piece, 1, word_walk(pc, piece, tv), "star"))
        # black halves of colour-mixed long edges, fixed at their black end
        for key, cell in pc.cells.items():
            if key[0] == "lhalf" and key[2] == 1 and key[3] == 0 and cell.color == BLACK:
                tv = pc.word1[key][0]
                add(tv, Leg(key, -1, (), "star"))
    else:
        # full-kite stars at every surviving black truncation vertex
        for i in range(tri.tet_count):
            for p in range(4):
                others = sorted(v for v in range(4) if v != p)
                for q in others:
                    kite = ("kite", i, p, q)
                    if not _survives(pc, kite) or pc.cells[kite].color != BLACK:
                        continue
                    pair = (min(p, q), max(p, q))
                    tv = ("tv", tri.edge_class_of[(i, pair)], 1 if p == pair[1] else 0)
                    add(tv, Leg(kite, 1, word_walk(pc, kite, tv), "star"))
        for key, cell in pc.cells.items():
            if key[0] != "lhalf" or cell.color != BLACK:
                continue
            t, h = pc.word1[key]
            for v, path in ((t, ()), (h, ((key, -1),))):
                if _survives(pc, v) and pc.cells[v].color == BLACK and v[0] == "tv":
                    add(v, Leg(key, -1, path, "star"))
        # shorts of sink-slot sides hang from the bi-arrow midpoints
        for i in range(tri.tet_count):
            for p in range(4):
                for f in range(4):
                    if f == p:
                        continue
                    short = ("short", i, p, f)
                    if not _survives(pc, short) or pc.cells[short].color != BLACK:
                        continue
                    mid_v = pc.word1[short][0]
                    if mid_v[2] == 2:
                        add(mid_v, Leg(short, -1, (), "bi_arrow"))
                    else:
                        raise SpineError("black short edge away from a sink slot")
    return grouped


def euler_chain_s_prime(pc: PatternedComplex) -> SpiderForest:
    """The Euler chain for the convexified pattern: orbits plus stars and
    bi-arrows, grouped into spiders and checked against the boundary
    identity."""
    grouped = {}
    for head, leg in orbit_legs(pc):
        grouped.setdefault(head, []).append(leg)
    for head, legs in _star_and_biarrow_legs(pc).items():
        grouped.setdefault(head, []).extend(legs)
    comps = [Spider(head, legs) for head, legs in sorted(grouped.items())]
    forest = SpiderForest(pc, comps)
    check_boundary_identity(forest)
    return forest


# ----------------------------------------------------------------------
# concave pattern: add / remove tangency halves
# ----------------------------------------------------------------------

def _tangency_orientation(pc: PatternedComplex):
    """Direction of each tangency 1-cell as part of the boundary of the
    black region (+1: stored orientation agrees)."""
    # outward sign of each boundary 2-cell: its unique appearance in a
    # 3-cell boundary
    outward = {}
    for key3, occs in pc.bnd3.items():
        for k, s, _ in occs:
            if pc.cells[k].dim == 2 and pc.cells[k].color != INTERIOR:
                outward[k] = outward.get(k, 0) + s
    orient = {}
    for key in pc.cells_by_dim[1]:
        if pc.cells[key].color != TANGENCY:
            continue
        flanks = []
        for key2 in pc.cells_by_dim[2]:
            if pc.cells[key2].color != BLACK:
                continue
            coeff = sum(s for k, s in pc.word2.get(key2, ()) if k == key)
            if coeff:
                flanks.append((key2, coeff))
        if len(flanks) != 1:
            raise SpineError("tangency edge without a unique black flank")
        key2, coeff = flanks[0]
        orient[key] = outward[key2] * coeff
    return orient


def theta_deconvexify(forest: SpiderForest, pc: PatternedComplex) -> SpiderForest:
    """Add the oriented second halves of the tangency 1-cells, turning an
    Euler chain for the convexified pattern into one for the concave
    pattern."""
    if forest.pattern != "convex":
        raise SpineError("theta_deconvexify expects a convex-pattern chain")
    orient = _tangency_orientation(pc)
    comps = [Spider(c.head, list(c.legs)) for c in forest.components]
    for key in sorted(orient):
        t, h = pc.word1[key]
        if orient[key] == 1:
            target, path = h, ((key, 1),)
        else:
            target, path = t, ()
        comps.append(Spider(key, [Leg(target, 1, path, "tangency_half")]))
    out = SpiderForest(pc, comps, pattern="concave")
    check_boundary_identity(out)
    return out


def theta_convexify(forest: SpiderForest, pc: PatternedComplex) -> SpiderForest:
    """Inverse of theta_deconvexify: drop the tangency-half components."""
    if forest.pattern != "concave":
        raise SpineError("theta_convexify expects a concave-pattern chain")
    comps = [Spider(c.head, list(c.legs)) for c in forest.components
             if not (c.legs and all(l.tag == "tangency_half" for l in c.legs))]
    out = SpiderForest(pc, comps, pattern="convex")
    check_boundary_identity(out)
    return out


# ----------------------------------------------------------------------
# difference classes, offsets, rerouting
# ----------------------------------------------------------------------

def chain_vector(forest: SpiderForest):
    return forest.as_chain()


def difference_cycle(z1: SpiderForest, z2: SpiderForest):
    """The 1-cycle z1 - z2 as a vector over 1-cells."""
    if z1.pattern != z2.pattern:
        raise SpineError("mismatched patterns")
    chain = z1.as_chain()
    for k, v in z2.as_chain().items():
        chain[k] = chain.get(k, 0) - v
    return {k: v for k, v in chain.items() if v != 0}


def lift_offsets(forest: SpiderForest, cocycle):
    """Integer lift offset of every generator: the cocycle integrated along
    its leg; heads get offset 0."""
    offsets = {}
    for comp in forest.components:
        offsets[comp.head] = 0
        for leg in comp.legs:
            value = 0
            for cell, sign in leg.path:
                if cell not in cocycle:
                    raise SpineError(f"cocycle undefined on {cell}")
                value += sign * cocycle[cell]
            offsets[leg.target] = value
    return offsets


def reroute_leg(forest: SpiderForest, target, loop):
    """A new forest in which the leg to `target` is composed with the given
    closed loop (signed 1-cells based at the target's base vertex)."""
    comps = []
    found = False
    for comp in forest.components:
        legs = []
        for leg in comp.legs:
            if leg.target == target and not found:
                legs.append(Leg(leg.target, leg.coeff, leg.path + tuple(loop), leg.tag))
                found = True
            else:
                legs.append(leg)
        comps.append(Spider(comp.head, legs))
    if not found:
        raise KeyError(target)
    return SpiderForest(forest.complex, comps, forest.pattern)
