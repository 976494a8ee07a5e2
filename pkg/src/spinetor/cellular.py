"""Cellularization of the capped manifold described by a branched spine.

Truncating every tetrahedron of the dual ideal triangulation yields a cell
structure whose 2-cells are hexagons (truncated faces) and boundary
triangles; the trivial sphere boundary component is collapsed to a single
interior point x0.  Boundary triangles are coloured by the field data:
the triangle at vertex p has p black corners (corner (p,q) is black iff
q < p), and the tangency curve crosses exactly the colour-mixed cells.

Two subdivision modes are supported:

* ``economical`` - colour-mixed triangles are cut by a single chord
  through the midpoints of their two mixed sides; sink-slot (pure black)
  long edges also carry their midpoint, which is where the flow through
  the adjacent hexagon exits.
* ``full-kite`` - every boundary triangle is cut into three kites by its
  centre and the three side midpoints.

All boundary/attaching data is kept per occurrence, together with a path
of signed 1-cells from base vertex to base vertex: that is exactly the
data needed later to lift the complex to the maximal abelian cover.
"""

from __future__ import annotations

from dataclasses import dataclass

from .spine import (FACE_VERTICES, GERM_PAIRS, TET_EDGES, BranchedTriangulation,
                    SpineError, boundary_components, derive_spine, single_s2_triv)

ECONOMICAL = "economical"
FULL_KITE = "full-kite"
X0 = ("x0",)

INTERIOR = "interior"
BLACK = "black"
WHITE = "white"
TANGENCY = "tangency"


@dataclass(frozen=True)
class Cell:
    key: tuple
    dim: int
    color: str
    provenance: str
    component: int | None = None


def ind(cell_dim):
    return (-1) ** cell_dim


class PatternedComplex:
    """The cellularization of the capped manifold, coloured and collapsed."""

    def __init__(self, tri: BranchedTriangulation, mode=ECONOMICAL):
        if mode not in (ECONOMICAL, FULL_KITE):
            raise ValueError(f"unknown subdivision mode {mode!r}")
        self.tri = tri
        self.mode = mode
        self.spine = derive_spine(tri)
        self.components = boundary_components(tri)
        self.sphere = single_s2_triv(self.components).index
        self._build()
        self._assert_dd0()
        self._check_tangency_circles()

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _build(self):
        tri = self.tri
        self.cells = {}
        self.word1 = {}
        self.word2 = {}
        self.bnd3 = {}
        self.base = {X0: X0}
        self._local_class = {}   # local cell id -> class key
        self._local_verts = {}   # local vertex id -> 0-cell class key (pre-collapse)
        self._tet_graph = {}     # tet -> list of (1-cell class, tail local, head local)
        self._cell_base_local = {}  # tet-local 2-cells: class key -> local base vertex

        self._collect_boundary_structure()
        self._make_cells()
        self._collapse()
        self._finalize()

    # -- naming helpers --------------------------------------------------

    def tv_key(self, tet, pair, end_vertex):
        eclass = self.tri.edge_class_of[(tet, pair)]
        end = 1 if end_vertex == pair[1] else 0
        return ("tv", eclass, end)

    def corner_local(self, tet, p, q):
        """Local id of the truncation vertex at the p-end of edge (p,q)."""
        pair = (min(p, q), max(p, q))
        return ("c", tet, pair, p)

    def long_class(self, tet, face, slot):
        return ("long", self.tri.face_class_of[(tet, face)], slot)

    def side_of(self, tet, p, u, v):
        """(face, slot) of the long edge cutting corner p inside face {p,u,v}."""
        face = next(f for f in range(4) if f not in (p, u, v))
        fv = FACE_VERTICES[face]
        return face, fv.index(p)

    # -- boundary structure ----------------------------------------------

    def _collect_boundary_structure(self):
        tri = self.tri
        # component of each ideal corner
        self.corner_component = {(i, p): tri.ideal_class_of[(i, p)]
                                 for i in range(tri.tet_count) for p in range(4)}
        # long edge classes: ('long', F, slot); their corner colours
        self.long_info = {}
        for fclass, (slot_a, _) in enumerate(tri.face_classes):
            i, f = slot_a
            fv = FACE_VERTICES[f]
            for slot in range(3):
                p = fv[slot]
                x, y = [v for v in fv if v != p]
                colors = (x < p, y < p)   # black flags of tail/head corners
                self.long_info[("long", fclass, slot)] = {
                    "slot_rep": (i, f, slot),
                    "component": tri.ideal_class_of[(i, p)],
                    "tail_black": colors[0],
                    "head_black": colors[1],
                }
        # which long classes get midpoints
        self.split_slots = {}
        for key, info in self.long_info.items():
            mixed = info["tail_black"] != info["head_black"]
            pure_black = info["tail_black"] and info["head_black"]
            if self.mode == FULL_KITE:
                self.split_slots[key] = True
            else:
                self.split_slots[key] = mixed or pure_black
        # sanity: slot semantics
        for key, info in self.long_info.items():
            slot = key[2]
            mixed = info["tail_black"] != info["head_black"]
            assert mixed == (slot == 1)
            assert (info["tail_black"] and info["head_black"]) == (slot == 2)

    def _add_cell(self, key, dim, color, provenance, component=None):
        self.cells[key] = Cell(key, dim, color, provenance, component)

    def _long_pieces(self, tet, face, slot, reverse=False):
        """The signed 1-cell letters of one long edge, in traversal order."""
        key = self.long_class(tet, face, slot)
        if self.split_slots[key]:
            letters = [(("lhalf",) + key[1:] + (0,), 1), (("lhalf",) + key[1:] + (1,), 1)]
        else:
            letters = [(key, 1)]
        if reverse:
            letters = [(k, -s) for k, s in reversed(letters)]
        return letters

    def _long_local_vertices(self, tet, face, slot):
        """(tail local vertex, head local vertex, [mid local vertex]) of a
        long edge within this tetrahedron."""
        fv = FACE_VERTICES[face]
        p = fv[slot]
        x, y = [v for v in fv if v != p]
        tail = self.corner_local(tet, p, x)
        head = self.corner_local(tet, p, y)
        key = self.long_class(tet, face, slot)
        mid = ("m", tet, face, slot) if self.split_slots[key] else None
        return tail, head, mid

    def _make_cells(self):
        tri = self.tri
        spine = self.spine

        # 0-cells: truncation vertices
        for eclass in range(len(tri.edge_classes)):
            for end in (0, 1):
                color = BLACK if end == 1 else WHITE
                i, pair = tri.edge_classes[eclass][0]
                comp = tri.ideal_class_of[(i, pair[end])]
                self._add_cell(("tv", eclass, end), 0, color, "boundary", comp)
        # 0-cells: midpoints
        for key, split in self.split_slots.items():
            if not split:
                continue
            info = self.long_info[key]
            slot = key[2]
            color = TANGENCY if slot == 1 else (BLACK if slot == 2 else WHITE)
            self._add_cell(("mid",) + key[1:], 0, color, "subdivision", info["component"])
        # 1-cells: truncated triangulation edges (duals of spine regions)
        for eclass in range(len(tri.edge_classes)):
            key = ("rhat", eclass)
            self._add_cell(key, 1, INTERIOR, "dual_region")
            self.word1[key] = (("tv", eclass, 0), ("tv", eclass, 1))
        # 1-cells: long edges / halves
        for key, split in self.split_slots.items():
            info = self.long_info[key]
            comp = info["component"]
            if split:
                c0 = BLACK if info["tail_black"] else WHITE
                c1 = BLACK if info["head_black"] else WHITE
                h0 = ("lhalf",) + key[1:] + (0,)
                h1 = ("lhalf",) + key[1:] + (1,)
                self._add_cell(h0, 1, c0, "boundary", comp)
                self._add_cell(h1, 1, c1, "boundary", comp)
            else:
                c = BLACK if info["tail_black"] else WHITE
                self._add_cell(key, 1, c, "boundary", comp)
        # word1 for long pieces needs local tail/head; fill via slot_rep
        for key, info in self.long_info.items():
            i, f, slot = info["slot_rep"]
            tail, head, mid = self._long_local_vertices(i, f, slot)
            tail_c = self._vertex_class(tail)
            head_c = self._vertex_class(head)
            if self.split_slots[key]:
                mid_c = ("mid",) + key[1:]
                self.word1[("lhalf",) + key[1:] + (0,)] = (tail_c, mid_c)
                self.word1[("lhalf",) + key[1:] + (1,)] = (mid_c, head_c)
            else:
                self.word1[key] = (tail_c, head_c)

        # per-tet boundary triangles (with subdivision)
        for i in range(tri.tet_count):
            for p in range(4):
                self._make_triangle(i, p)

        # hexagons
        for fclass, (slot_a, _) in enumerate(tri.face_classes):
            i, f = slot_a
            fv = FACE_VERTICES[f]
            a, b, c = fv
            key = ("ehat", fclass)
            self._add_cell(key, 2, INTERIOR, "dual_edge")
            word = []
            word.append((("rhat", tri.edge_class_of[(i, (a, b))]), 1))
            word.extend(self._long_pieces(i, f, 1))
            word.append((("rhat", tri.edge_class_of[(i, (b, c))]), 1))
            word.extend(self._long_pieces(i, f, 2, reverse=True))
            word.append((("rhat", tri.edge_class_of[(i, (a, c))]), -1))
            word.extend(self._long_pieces(i, f, 0, reverse=True))
            self.word2[key] = tuple(word)

        # 3-cells
        for i in range(tri.tet_count):
            self._make_tet_cell(i)

        # local vertex graph per tet (for cover paths)
        for i in range(tri.tet_count):
            self._tet_graph[i] = self._build_tet_graph(i)

    def _vertex_class(self, local):
        kind = local[0]
        if kind == "c":
            _, tet, pair, p = local
            return self.tv_key(tet, pair, p)
        if kind == "m":
            _, tet, face, slot = local
            return ("mid", self.tri.face_class_of[(tet, face)], slot)
        if kind == "t":
            _, tet, p = local
            return ("ctr", tet, p)
        raise KeyError(local)

    def _make_triangle(self, i, p):
        comp = self.corner_component[(i, p)]
        others = sorted(v for v in range(4) if v != p)
        x, y, z = others
        sides = {}
        for (u, v) in ((x, y), (y, z), (x, z)):
            face, slot = self.side_of(i, p, u, v)
            sides[(u, v)] = (face, slot)

        def side_letters(u, v, reverse=False):
            face, slot = sides[(u, v)]
            return self._long_pieces(i, face, slot, reverse=reverse)

        n_black = p  # corners (p,q) with q < p
        if self.mode == ECONOMICAL:
            if n_black in (0, 3):
                key = ("tri", i, p)
                color = BLACK if n_black == 3 else WHITE
                self._add_cell(key, 2, color, "boundary", comp)
                word = (side_letters(x, y) + side_letters(y, z)
                        + side_letters(x, z, reverse=True))
                self.word2[key] = tuple(word)
                self._cell_base_local[key] = self.corner_local(i, p, x)
            else:
                self._make_pieces(i, p, x, y, z, sides, comp)
        else:
            self._make_kites(i, p, x, y, z, sides, comp)

    def _make_pieces(self, i, p, x, y, z, sides, comp):
        """Cut a colour-mixed triangle by the chord through its two mixed
        side midpoints (economical mode)."""
        mixed = [(u, v) for (u, v) in sides
                 if self.long_info[self.long_class(i, *sides[(u, v)])]["tail_black"]
                 != self.long_info[self.long_class(i, *sides[(u, v)])]["head_black"]]
        assert len(mixed) == 2
        # chord oriented from the mid on the smaller face index to the larger
        m_sides = sorted(mixed, key=lambda uv: sides[uv][0])
        chord = ("chord", i, p)
        self._add_cell(chord, 1, TANGENCY, "subdivision", comp)
        mid_of = {uv: ("m", i) + sides[uv] for uv in mixed}
        self.word1[chord] = (self._vertex_class(mid_of[m_sides[0]]),
                             self._vertex_class(mid_of[m_sides[1]]))

        def half(uv, which, reverse=False):
            face, slot = sides[uv]
            letter = (("lhalf", self.tri.face_class_of[(i, face)], slot, which), 1)
            return [(letter[0], -1)] if reverse else [letter]

        def chord_letter(frm_uv):
            # traverse the chord starting at the mid of side frm_uv
            return [(chord, 1)] if frm_uv == m_sides[0] else [(chord, -1)]

        if p == 1:
            # black corner (1,0); mixed sides (x,y)=(0,2) and (x,z)=(0,3)
            s1, s2 = (x, y), (x, z)
            black_word = (half(s1, 0) + chord_letter(s1) + half(s2, 0, reverse=True))
            white_word = (half(s1, 1) + self._long_pieces(i, *sides[(y, z)])
                          + half(s2, 1, reverse=True) + chord_letter(s2))
            base_b = self.corner_local(i, p, x)
            base_w = ("m", i) + sides[s1]
        else:
            # p == 2: black corners (2,0), (2,1); mixed sides (y,z)=(1,3), (x,z)=(0,3)
            s1, s2 = (y, z), (x, z)
            black_word = (self._long_pieces(i, *sides[(x, y)]) + half(s1, 0)
                          + chord_letter(s1) + half(s2, 0, reverse=True))
            white_word = (half(s1, 1) + half(s2, 1, reverse=True) + chord_letter(s2))
            base_b = self.corner_local(i, p, x)
            base_w = ("m", i) + sides[s1]
        for color, word, base in ((BLACK, black_word, base_b), (WHITE, white_word, base_w)):
            key = ("piece", i, p, "b" if color == BLACK else "w")
            self._add_cell(key, 2, color, "boundary", comp)
            self.word2[key] = tuple(word)
            self._cell_base_local[key] = base

    def _make_kites(self, i, p, x, y, z, sides, comp):
        """Full subdivision of one boundary triangle into three kites."""
        n_black = p
        ctr = ("ctr", i, p)
        ctr_color = TANGENCY if n_black in (1, 2) else (BLACK if n_black == 3 else WHITE)
        self._add_cell(ctr, 0, ctr_color, "subdivision", comp)
        # shorts: one per side
        for (u, v) in sides:
            face, slot = sides[(u, v)]
            info = self.long_info[self.long_class(i, face, slot)]
            if info["tail_black"] != info["head_black"]:
                color = TANGENCY
            else:
                color = BLACK if info["tail_black"] else WHITE
            key = ("short", i, p, face)
            self._add_cell(key, 1, color, "subdivision", comp)
            self.word1[key] = (self._vertex_class(("m", i, face, slot)), ctr)
        # cyclic triangle word: corners x -> y -> z -> x
        cyc = [((x, y), 1), ((y, z), 1), ((x, z), -1)]

        def corner_color(q):
            return BLACK if q < p else WHITE

        for idx, q in enumerate((x, y, z)):
            entering = cyc[(idx - 1) % 3]
            leaving = cyc[idx]
            # halves adjacent to corner q, traversed in word direction
            def adj_half(entry, at_end):
                (u, v), sgn = entry
                face, slot = sides[(u, v)]
                fc = self.tri.face_class_of[(i, face)]
                # oriented tail=corner(p,u), head=corner(p,v); with sign sgn
                # the word passes tail..head or head..tail
                if sgn == 1:
                    first, second = (("lhalf", fc, slot, 0), 1), (("lhalf", fc, slot, 1), 1)
                else:
                    first, second = (("lhalf", fc, slot, 1), -1), (("lhalf", fc, slot, 0), -1)
                return second if at_end == "arrive" else first
            kite = ("kite", i, p, q)
            self._add_cell(kite, 2, corner_color(q), "boundary", comp)
            ent_face = sides[entering[0]][0]
            lev_face = sides[leaving[0]][0]
            word = (adj_half(entering, "arrive"), adj_half(leaving, "depart"),
                    (("short", i, p, lev_face), 1), (("short", i, p, ent_face), -1))
            self.word2[kite] = tuple(word)
            # base: the word starts at the mid of the entering side
            self._cell_base_local[kite] = ("m", i) + sides[entering[0]]

    def _make_tet_cell(self, i):
        tri = self.tri
        eps = tri.tet_signs[i]
        key = ("vhat", i)
        self._add_cell(key, 3, INTERIOR, "dual_vertex")
        occurrences = []
        for f in range(4):
            fclass = tri.face_class_of[(i, f)]
            occurrences.append((("ehat", fclass), eps * (-1) ** f, ("hex", i, f)))
        hex_coeff = {0: -1, 1: 1, 2: -1}  # long-letter sign by slot in a hexagon word
        for p in range(4):
            others = sorted(v for v in range(4) if v != p)
            x, y, z = others
            # solve the sign of the triangle complex from one shared side
            face, slot = self.side_of(i, p, x, y)
            h_sign = eps * (-1) ** face
            tri_coeff = 1  # side (x,y) has coefficient +1 in the triangle word
            s_tri = -h_sign * hex_coeff[slot] // tri_coeff
            # consistency over the other two sides
            for (u, v), coeff in (((y, z), 1), ((x, z), -1)):
                fc, sl = self.side_of(i, p, u, v)
                assert eps * (-1) ** fc * hex_coeff[sl] + s_tri * coeff == 0
            for sub in self._triangle_subcells(i, p):
                occurrences.append((sub, s_tri, ("tri", i, p)))
        self.bnd3[key] = occurrences

    def _triangle_subcells(self, i, p):
        if self.mode == ECONOMICAL:
            if p in (0, 3):
                return [("tri", i, p)]
            return [("piece", i, p, "b"), ("piece", i, p, "w")]
        others = sorted(v for v in range(4) if v != p)
        return [("kite", i, p, q) for q in others]

    def _build_tet_graph(self, i):
        edges = []
        # truncated triangulation edges
        for (a, b) in TET_EDGES:
            eclass = self.tri.edge_class_of[(i, (a, b))]
            edges.append((("rhat", eclass), ("c", i, (a, b), a), ("c", i, (a, b), b)))
        # long edges or halves
        for f in range(4):
            for slot in range(3):
                tail, head, mid = self._long_local_vertices(i, f, slot)
                key = self.long_class(i, f, slot)
                if mid is not None:
                    edges.append((("lhalf",) + key[1:] + (0,), tail, mid))
                    edges.append((("lhalf",) + key[1:] + (1,), mid, head))
                else:
                    edges.append((key, tail, head))
        # chords and shorts
        for p in range(4):
            if self.mode == ECONOMICAL:
                if p in (1, 2):
                    chord = ("chord", i, p)
                    others = sorted(v for v in range(4) if v != p)
                    x, y, z = others
                    mixed = [(x, y), (x, z)] if p == 1 else [(y, z), (x, z)]
                    locs = {}
                    for uv in mixed:
                        face, slot = self.side_of(i, p, *uv)
                        locs[face] = ("m", i, face, slot)
                    f_small, f_big = sorted(locs)
                    edges.append((chord, locs[f_small], locs[f_big]))
            else:
                for f in range(4):
                    if f == p:
                        continue
                    fv = FACE_VERTICES[f]
                    slot = fv.index(p)
                    edges.append((("short", i, p, f), ("m", i, f, slot), ("t", i, p)))
        return edges

    # ------------------------------------------------------------------
    # collapse of the trivial sphere and final assembly
    # ------------------------------------------------------------------

    def _collapse(self):
        self.collapsed = {key for key, cell in self.cells.items()
                          if cell.component == self.sphere}
        self._add_cell(X0, 0, INTERIOR, "base_point")

        def v_map(vkey):
            return X0 if vkey in self.collapsed else vkey

        surviving = {}
        word1 = {}
        word2 = {}
        for key, cell in self.cells.items():
            if key in self.collapsed:
                continue
            surviving[key] = cell
            if cell.dim == 1:
                t, h = self.word1[key]
                word1[key] = (v_map(t), v_map(h))
            elif cell.dim == 2:
                word2[key] = tuple((k, s) for k, s in self.word2[key]
                                   if k not in self.collapsed)
        bnd3 = {}
        for key, occs in self.bnd3.items():
            bnd3[key] = [(k, s, loc) for k, s, loc in occs if k not in self.collapsed]
        self.cells = surviving
        self.word1 = word1
        self.word2 = word2
        self.bnd3 = bnd3

    def vclass(self, local):
        """0-cell class of a local vertex, after collapse."""
        key = self._vertex_class(local)
        return X0 if key in self.collapsed else key

    def _finalize(self):
        self.cells_by_dim = [[], [], [], []]
        for key, cell in self.cells.items():
            self.cells_by_dim[cell.dim].append(key)
        for lst in self.cells_by_dim:
            lst.sort()
        # base vertices
        for key, cell in self.cells.items():
            if cell.dim == 0:
                self.base[key] = key
            elif cell.dim == 1:
                self.base[key] = self.word1[key][0]
            elif cell.dim == 2:
                word = self.word2[key]
                if word:
                    k0, s0 = word[0]
                    self.base[key] = self.word1[k0][0 if s0 == 1 else 1]
                else:
                    self.base[key] = X0
            else:
                tet = key[1]
                nodes = sorted({self.vclass(t) for _, t, h in self._tet_graph[tet]}
                               | {self.vclass(h) for _, t, h in self._tet_graph[tet]})
                self.base[key] = nodes[0]
        # resolve 3-cell occurrence paths
        resolved = {}
        for key, occs in self.bnd3.items():
            tet = key[1]
            out = []
            for k, s, loc in occs:
                target_local = self._occurrence_base_local(k, loc)
                path = self._tet_path(tet, self.base[key], target_local)
                out.append((k, s, path))
            resolved[key] = out
        self.bnd3 = resolved

    def _occurrence_base_local(self, cell_key, loc):
        """Local vertex (of the tetrahedron in `loc`) mapping to the base
        vertex of `cell_key`, as attached at this occurrence."""
        kind = loc[0]
        if kind == "tri":
            return self._cell_base_local[cell_key]
        _, i, f = loc
        fclass = self.tri.face_class_of[(i, f)]
        slot_a, slot_b = self.tri.face_classes[fclass]
        # class word starts at the first R-hat letter's tail corner of slot_a
        ia, fa = slot_a
        fva = FACE_VERTICES[fa]
        a0, b0 = fva[0], fva[1]
        if (i, f) == slot_a:
            return ("c", ia, (a0, b0), a0)
        vm = self.tri.vertex_map(slot_a)
        a1, b1 = vm[a0], vm[b0]
        return ("c", i, (min(a1, b1), max(a1, b1)), a1)

    def _tet_path(self, tet, start_class, goal_local):
        """Deterministic path of signed 1-cells inside one truncated
        tetrahedron from a 0-cell class to a local vertex."""
        goal_class = self.vclass(goal_local)
        edges = []
        for cls, t_loc, h_loc in self._tet_graph[tet]:
            if cls in self.collapsed:
                continue
            edges.append((cls, self.vclass(t_loc), self.vclass(h_loc)))
        adj = {}
        for cls, t, h in sorted(edges):
            adj.setdefault(t, []).append((cls, 1, h))
            adj.setdefault(h, []).append((cls, -1, t))
        if start_class == goal_class:
            return ()
        frontier = [start_class]
        prev = {start_class: None}
        while frontier:
            nxt = []
            for node in frontier:
                for cls, sgn, other in adj.get(node, []):
                    if other not in prev:
                        prev[other] = (node, cls, sgn)
                        nxt.append(other)
            if goal_class in prev:
                break
            frontier = nxt
        if goal_class not in prev:
            raise SpineError("disconnected truncated-tetrahedron skeleton")
        path = []
        node = goal_class
        while prev[node] is not None:
            back, cls, sgn = prev[node]
            path.append((cls, sgn))
            node = back
        path.reverse()
        return tuple(path)

    # ------------------------------------------------------------------
    # chain complex data
    # ------------------------------------------------------------------

    def incidences(self, dim):
        """For each dim-cell: list of (face key, sign, path), path running
        from the cell's base vertex to the face's base vertex."""
        out = {}
        if dim == 1:
            for key in self.cells_by_dim[1]:
                t, h = self.word1[key]
                out[key] = [(t, -1, ()), (h, 1, ((key, 1),))]
        elif dim == 2:
            for key in self.cells_by_dim[2]:
                occ = []
                prefix = []
                for k, s in self.word2[key]:
                    if s == 1:
                        occ.append((k, 1, tuple(prefix)))
                    else:
                        occ.append((k, -1, tuple(prefix + [(k, -1)])))
                    prefix.append((k, s))
                out[key] = occ
        elif dim == 3:
            for key in self.cells_by_dim[3]:
                out[key] = list(self.bnd3[key])
        else:
            raise ValueError(dim)
        return out

    def boundary_matrix(self, dim, rows=None, cols=None):
        rows = rows if rows is not None else self.cells_by_dim[dim - 1]
        cols = cols if cols is not None else self.cells_by_dim[dim]
        row_index = {k: r for r, k in enumerate(rows)}
        inc = self.incidences(dim)
        mat = [[0] * len(cols) for _ in rows]
        for c, key in enumerate(cols):
            for k, s, _ in inc[key]:
                if k in row_index:
                    mat[row_index[k]][c] += s
        return mat

    def _assert_dd0(self):
        from .matrices import mat_mul, mat_is_zero
        d1 = self.boundary_matrix(1)
        d2 = self.boundary_matrix(2)
        d3 = self.boundary_matrix(3)
        if not mat_is_zero(mat_mul(d1, d2)) or not mat_is_zero(mat_mul(d2, d3)):
            raise SpineError("boundary of boundary is nonzero")

    def _check_tangency_circles(self):
        deg = {}
        for key in self.cells_by_dim[1]:
            if self.cells[key].color != TANGENCY:
                continue
            t, h = self.word1[key]
            for v in (t, h):
                if self.cells[v].color != TANGENCY:
                    raise SpineError("tangency edge with non-tangency endpoint")
                deg[v] = deg.get(v, 0) + 1
        for v in self.cells_by_dim[0]:
            if self.cells[v].color == TANGENCY and deg.get(v, 0) != 2:
                raise SpineError("tangency cells do not form circles")

    # ------------------------------------------------------------------
    # reports
    # ------------------------------------------------------------------

    def color_census(self):
        census = {}
        for key, cell in self.cells.items():
            census.setdefault((cell.dim, cell.color), 0)
            census[(cell.dim, cell.color)] += 1
        return census

    def chi_total(self):
        return sum(ind(c.dim) for c in self.cells.values())

    def chi_white_closure(self):
        return sum(ind(c.dim) for c in self.cells.values()
                   if c.color in (WHITE, TANGENCY))

    def chi_tangency(self):
        return sum(ind(c.dim) for c in self.cells.values() if c.color == TANGENCY)

    def relative_keys(self):
        return [[k for k in lst if self.cells[k].color in (INTERIOR, BLACK)]
                for lst in self.cells_by_dim]

    def tangency_circles(self):
        """Tangency 1-cells grouped into circles (lists of 1-cell keys)."""
        edges = [k for k in self.cells_by_dim[1] if self.cells[k].color == TANGENCY]
        adj = {}
        for k in edges:
            t, h = self.word1[k]
            adj.setdefault(t, []).append(k)
            adj.setdefault(h, []).append(k)
        seen = set()
        circles = []
        for k in edges:
            if k in seen:
                continue
            circle = [k]
            seen.add(k)
            node = self.word1[k][1]
            while True:
                nxt = [e for e in adj[node] if e not in seen]
                if not nxt:
                    break
                e = nxt[0]
                seen.add(e)
                circle.append(e)
                t, h = self.word1[e]
                node = h if t == node else t
            circles.append(circle)
        return circles


@dataclass
class IntegerChainComplex:
    """Ordered generators and integer boundary matrices, with a record of
    which PatternedComplex cells the generators came from."""
    generators: list           # per dimension, list of cell keys
    boundaries: dict           # dim -> matrix of d_dim
    complex: PatternedComplex

    def dims(self):
        return tuple(len(g) for g in self.generators)


def build_complex(tri: BranchedTriangulation, mode=ECONOMICAL) -> PatternedComplex:
    return PatternedComplex(tri, mode)


def relative_complex(pc: PatternedComplex) -> IntegerChainComplex:
    gens = pc.relative_keys()
    boundaries = {}
    for d in (1, 2, 3):
        boundaries[d] = pc.boundary_matrix(d, rows=gens[d - 1], cols=gens[d])
    return IntegerChainComplex(gens, boundaries, pc)


def absolute_complex(pc: PatternedComplex) -> IntegerChainComplex:
    gens = [list(lst) for lst in pc.cells_by_dim]
    boundaries = {}
    for d in (1, 2, 3):
        boundaries[d] = pc.boundary_matrix(d, rows=gens[d - 1], cols=gens[d])
    return IntegerChainComplex(gens, boundaries, pc)


def pattern_euler_check(pc: PatternedComplex):
    """chi(capped manifold) - (chi(closed white part) - chi(tangency)) == 0."""
    chi_m = pc.chi_total()
    chi_w = pc.chi_white_closure()
    chi_c = pc.chi_tangency()
    ok = chi_m - (chi_w - chi_c) == 0
    report = {"chi_manifold": chi_m, "chi_white_closure": chi_w, "chi_tangency": chi_c}
    return ok, report
