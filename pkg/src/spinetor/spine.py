"""Branched ideal triangulations and their dual branched standard spines.

A branched triangulation is a set of tetrahedra, each with the implicit
vertex order 0 < 1 < 2 < 3 (all six edges oriented increasingly, vertex 0
the source and vertex 3 the sink), together with a fixed-point-free
involution on the 4n face slots.  Each face identification is the unique
order-preserving bijection between the two faces' vertex triples, so the
pairing is the entire gluing datum.

Duality dictionary used throughout:

    tetrahedron        <->  spine vertex
    face class         <->  spine edge
    edge class         <->  spine region
    ideal vertex class <->  boundary component

The three region germs at a spine edge are indexed 0, 1, 2 by the vertex
pairs (0,1), (0,2), (1,2) of the ordered face; germ 1 is always the one
inducing the minority orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class SpineError(ValueError):
    """Invalid spine / triangulation data."""


# face f is opposite vertex f; vertices listed in increasing order
FACE_VERTICES = {f: tuple(v for v in range(4) if v != f) for f in range(4)}
# germ index g of a face corresponds to this vertex-position pair
GERM_PAIRS = ((0, 1), (0, 2), (1, 2))
TET_EDGES = tuple((a, b) for a in range(4) for b in range(a + 1, 4))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self):
        groups = {}
        for x in list(self.parent):
            groups.setdefault(self.find(x), []).append(x)
        return {root: sorted(members) for root, members in groups.items()}


class BranchedTriangulation:
    """Validated gluing data; immutable after construction."""

    def __init__(self, tet_count, gluing):
        self.tet_count = tet_count
        self.gluing = dict(gluing)
        self._validate_pairing()
        self.tet_signs = self._orientation_signs()
        self.face_classes, self.face_class_of = self._face_classes()
        self.edge_class_of, self.edge_classes = self._edge_classes()
        self.ideal_class_of, self.ideal_classes = self._ideal_classes()

    # -- validation ----------------------------------------------------

    def _validate_pairing(self):
        if self.tet_count < 1:
            raise SpineError("tetrahedra count must be positive")
        slots = [(i, f) for i in range(self.tet_count) for f in range(4)]
        for s in slots:
            if s not in self.gluing:
                raise SpineError(f"face slot {s} is unglued")
        for s, t in self.gluing.items():
            if s == t:
                raise SpineError(f"fixed-point gluing at slot {s}")
            if t not in self.gluing or self.gluing[t] != s:
                raise SpineError(f"gluing is not an involution at slot {s}")
            if not (0 <= t[0] < self.tet_count and 0 <= t[1] < 4):
                raise SpineError(f"slot {t} out of range")
        if len(self.gluing) != 4 * self.tet_count:
            raise SpineError("every face slot must appear exactly once")

    def _orientation_signs(self):
        # signs must satisfy sign(i) * sign(j) == (-1)^(f+g+1) per gluing
        signs = [0] * self.tet_count
        for start in range(self.tet_count):
            if signs[start]:
                continue
            signs[start] = 1
            stack = [start]
            while stack:
                i = stack.pop()
                for f in range(4):
                    j, g = self.gluing[(i, f)]
                    need = signs[i] * (-1) ** (f + g + 1)
                    if signs[j] == 0:
                        signs[j] = need
                        stack.append(j)
                    elif signs[j] != need:
                        raise SpineError("non-orientable")
        return signs

    # -- cell classes ----------------------------------------------------

    def _face_classes(self):
        pairs = sorted({tuple(sorted((s, t))) for s, t in self.gluing.items()})
        class_of = {}
        for idx, (s, t) in enumerate(pairs):
            class_of[s] = idx
            class_of[t] = idx
        return pairs, class_of

    def vertex_map(self, slot):
        """Vertex bijection of the gluing from `slot` to its partner."""
        i, f = slot
        j, g = self.gluing[slot]
        return dict(zip(FACE_VERTICES[f], FACE_VERTICES[g]))

    def _edge_classes(self):
        uf = _UnionFind()
        for i in range(self.tet_count):
            for e in TET_EDGES:
                uf.find((i, e))
        for (i, f), (j, g) in self.gluing.items():
            vm = self.vertex_map((i, f))
            fv = FACE_VERTICES[f]
            for a, b in ((fv[0], fv[1]), (fv[0], fv[2]), (fv[1], fv[2])):
                a2, b2 = vm[a], vm[b]
                uf.union((i, (a, b)), (j, (min(a2, b2), max(a2, b2))))
        groups = uf.classes()
        roots = sorted(groups)
        class_of = {}
        for idx, root in enumerate(roots):
            for member in groups[root]:
                class_of[member] = idx
        return class_of, [groups[r] for r in roots]

    def _ideal_classes(self):
        uf = _UnionFind()
        for i in range(self.tet_count):
            for v in range(4):
                uf.find((i, v))
        for (i, f), (j, g) in self.gluing.items():
            vm = self.vertex_map((i, f))
            for v, w in vm.items():
                uf.union((i, v), (j, w))
        groups = uf.classes()
        roots = sorted(groups)
        class_of = {}
        for idx, root in enumerate(roots):
            for member in groups[root]:
                class_of[member] = idx
        return class_of, [groups[r] for r in roots]

    # -- derived conveniences -------------------------------------------

    def spine_edge_out_slot(self, face_class):
        """The slot at which the dual spine edge leaves its tetrahedron.

        The natural orientation of the spine edge dual to a face leaves the
        tetrahedron whose sign times (-1)^face is +1.
        """
        s, t = self.face_classes[face_class]
        if self.tet_signs[s[0]] * (-1) ** s[1] == 1:
            return s
        return t

    def serialize(self):
        lines = [f"tetrahedra {self.tet_count}"]
        for s, t in self.face_classes:
            lines.append(f"glue {s[0]} {s[1]} {t[0]} {t[1]}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"BranchedTriangulation({self.tet_count} tet, {len(self.face_classes)} face pairs)"


def parse_triangulation(text) -> BranchedTriangulation:
    """Parse .btri file contents (see the file-format notes in the README)."""
    tet_count = None
    gluing = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "tetrahedra":
            if tet_count is not None:
                raise SpineError(f"line {lineno}: duplicate header")
            try:
                tet_count = int(fields[1])
            except (IndexError, ValueError):
                raise SpineError(f"line {lineno}: malformed header") from None
        elif fields[0] == "glue":
            if tet_count is None:
                raise SpineError(f"line {lineno}: glue before header")
            try:
                i, f, j, g = (int(x) for x in fields[1:5])
            except ValueError:
                raise SpineError(f"line {lineno}: malformed glue line") from None
            if len(fields) != 5:
                raise SpineError(f"line {lineno}: malformed glue line")
            for tet, face in ((i, f), (j, g)):
                if not (0 <= tet < tet_count and 0 <= face < 4):
                    raise SpineError(f"line {lineno}: slot ({tet},{face}) out of range")
            if (i, f) == (j, g):
                raise SpineError(f"line {lineno}: fixed-point gluing")
            for slot in ((i, f), (j, g)):
                if slot in gluing:
                    raise SpineError(f"line {lineno}: slot {slot} glued twice")
            gluing[(i, f)] = (j, g)
            gluing[(j, g)] = (i, f)
        else:
            raise SpineError(f"line {lineno}: unknown directive {fields[0]!r}")
    if tet_count is None:
        raise SpineError("missing 'tetrahedra' header")
    return BranchedTriangulation(tet_count, gluing)


@dataclass(frozen=True)
class WordStep:
    """One boundary-word entry: the region's boundary runs once along
    `edge` (a spine-edge id) on germ side `germ`, in `direction` relative
    to the edge's natural orientation.  `corner` is the tetrahedron-edge
    incidence (tet, (a, b)) at which this step starts."""
    edge: int
    germ: int
    direction: int
    corner: tuple


@dataclass
class SpineRegion:
    index: int
    edge_class: list
    word: list = field(default_factory=list)


class SpineView:
    """Combinatorics of the dual branched standard spine."""

    def __init__(self, tri: BranchedTriangulation):
        self.tri = tri
        self.vertex_count = tri.tet_count
        self.edge_count = len(tri.face_classes)
        self.regions = [SpineRegion(i, members) for i, members in enumerate(tri.edge_classes)]
        self.region_count = len(self.regions)
        self.germs = self._germ_tables()
        for region in self.regions:
            region.word = self._boundary_word(region)
        self._check_germ_orientations()

    def counts(self):
        return (self.vertex_count, self.edge_count, self.region_count)

    def euler_characteristic(self):
        return self.vertex_count - self.edge_count + self.region_count

    def _germ_tables(self):
        """For each spine edge: three (region, minority flag) germs, indexed
        by the vertex pairs (0,1), (0,2), (1,2) of the canonical face slot."""
        tables = []
        for idx, (slot, _) in enumerate(self.tri.face_classes):
            i, f = slot
            fv = FACE_VERTICES[f]
            germs = []
            for g, (pa, pb) in enumerate(GERM_PAIRS):
                pair = (fv[pa], fv[pb])
                region = self.tri.edge_class_of[(i, pair)]
                germs.append({"region": region, "minority": g == 1})
            tables.append(germs)
        return tables

    def germ_index(self, face_slot, pair):
        """Germ index of tetrahedron edge `pair` within the face at `face_slot`."""
        fv = FACE_VERTICES[face_slot[1]]
        positions = (fv.index(pair[0]), fv.index(pair[1]))
        return GERM_PAIRS.index(positions)

    def _positive_exit(self, tet, pair, enter_face=None):
        """Exit face continuing the positive rotation around the oriented
        tetrahedron edge (right-hand rule in the tetrahedron orientation).

        For the edge (p, q) with complement {r < s}, the rotation in a
        positively oriented tetrahedron enters through the face opposite s
        and leaves through the face opposite r when the permutation
        (p, q, r, s) of (0, 1, 2, 3) is even, and the other way round when
        it is odd.
        """
        p, q = pair
        r, s = sorted(v for v in range(4) if v not in pair)
        perm = (p, q, r, s)
        parity = 1
        for a in range(4):
            for b in range(a + 1, 4):
                if perm[a] > perm[b]:
                    parity = -parity
        if parity * self.tri.tet_signs[tet] == 1:
            pos_enter, pos_exit = s, r
        else:
            pos_enter, pos_exit = r, s
        if enter_face is None:
            return pos_exit
        if enter_face != pos_enter:
            raise SpineError("fan walk lost the rotation direction")
        return pos_exit

    def _boundary_word(self, region: SpineRegion):
        """Walk the fan of tetrahedron-edge incidences around the dual
        triangulation edge, in the rotation direction induced by the
        region's orientation; each transit through a face contributes one
        word step."""
        tri = self.tri
        incidences = set(region.edge_class)
        start = min(incidences)
        word = []
        i, pair = start
        exit_face = self._positive_exit(i, pair)
        first_exit = exit_face
        while True:
            corner = (i, pair)
            slot = (i, exit_face)
            face_class = tri.face_class_of[slot]
            germ = self.germ_index(slot, pair)
            out_slot = tri.spine_edge_out_slot(face_class)
            direction = 1 if out_slot == slot else -1
            word.append(WordStep(face_class, germ, direction, corner))
            j, g = tri.gluing[slot]
            vm = tri.vertex_map(slot)
            a2, b2 = vm[pair[0]], vm[pair[1]]
            pair2 = (min(a2, b2), max(a2, b2))
            i, pair = j, pair2
            exit_face = self._positive_exit(i, pair, enter_face=g)
            if (i, pair) == start and exit_face == first_exit:
                break
            if len(word) > 3 * len(tri.face_classes):
                raise SpineError("region boundary walk failed to close")
        return word

    def _check_germ_orientations(self):
        """At each spine edge the germ multiset must be {+,+,-} or {-,-,+}.

        With order-preserving gluings this is automatic (germ 1 is the
        minority), but we assert the word data is consistent: each (edge,
        germ) pair is traversed exactly once over all regions.
        """
        seen = {}
        for region in self.regions:
            for step in region.word:
                key = (step.edge, step.germ)
                seen[key] = seen.get(key, 0) + 1
        for e in range(self.edge_count):
            for g in range(3):
                if seen.get((e, g), 0) != 1:
                    raise SpineError(f"edge {e} germ {g} traversed {seen.get((e, g), 0)} times")


def derive_spine(tri: BranchedTriangulation) -> SpineView:
    return SpineView(tri)


def region_boundary_word(spine: SpineView, region_id):
    if not (0 <= region_id < spine.region_count):
        raise SpineError(f"unknown region id {region_id}")
    return [(s.edge, s.germ, occ) for occ, s in enumerate(spine.regions[region_id].word)]


# -- boundary components ------------------------------------------------

@dataclass
class BoundaryComponent:
    index: int
    ideal_class: list          # (tet, vertex) incidences
    triangle_count: int
    euler_characteristic: int
    tangency_circles: int
    is_s2_triv: bool


def _mixed_long_slot(face):
    """Corner-slot index (position in the sorted face) of the one long edge
    of this face with endpoints of both colours: always the middle vertex."""
    return 1


def boundary_components(tri: BranchedTriangulation):
    """Enumerate boundary components with their tangency-curve summary.

    The truncation triangle at vertex p of a tetrahedron has p black
    corners (corner (p,q) is black iff q < p, i.e. the edge flows into p),
    giving the colour counts (0,3), (1,2), (2,1), (3,0) at p = 0..3.  The
    tangency line crosses exactly the colour-mixed long edges, and every
    face class carries exactly one of those (its middle corner slot).
    """
    # vertices of the link surface = ends of triangulation-edge classes
    tv_uf = _UnionFind()
    for i in range(tri.tet_count):
        for (a, b) in TET_EDGES:
            tv_uf.find((i, (a, b), a))
            tv_uf.find((i, (a, b), b))
    for (i, f), (j, g) in tri.gluing.items():
        vm = tri.vertex_map((i, f))
        fv = FACE_VERTICES[f]
        for pa, pb in GERM_PAIRS:
            a, b = fv[pa], fv[pb]
            a2, b2 = vm[a], vm[b]
            lo2, hi2 = min(a2, b2), max(a2, b2)
            tv_uf.union((i, (a, b), a), (j, (lo2, hi2), a2))
            tv_uf.union((i, (a, b), b), (j, (lo2, hi2), b2))
    tv_classes = tv_uf.classes()

    components = []
    for idx, members in enumerate(tri.ideal_classes):
        triangles = len(members)
        member_set = set(members)
        # a truncation vertex (i, (a,b), end) lies in the link of ideal vertex `end`
        verts = set()
        for root, mems in tv_classes.items():
            i, pair, end = mems[0]
            if tri.ideal_class_of[(i, end)] == idx:
                verts.add(root)
        long_edges = 3 * triangles // 2
        chi = len(verts) - long_edges + triangles
        circles = _tangency_circles(tri, member_set)
        is_triv = (chi == 2) and (circles == 1)
        components.append(BoundaryComponent(idx, members, triangles, chi, circles, is_triv))
    return components


def _tangency_circles(tri: BranchedTriangulation, ideal_members):
    """Count tangency circles on one boundary component.

    Chords (one per mixed truncation triangle on the component) join the
    colour-mixed long edges of the adjacent faces; circles are the cycles
    of that 2-regular graph.
    """
    # mixed triangles on this component: (i, p) with p in {1, 2}
    mixed_sides = {1: (2, 3), 2: (0, 1)}  # faces carrying the mixed sides
    edges = []
    for (i, p) in ideal_members:
        if p in (1, 2):
            f1, f2 = mixed_sides[p]
            edges.append((tri.face_class_of[(i, f1)], tri.face_class_of[(i, f2)]))
    # ports: each chord has two endpoints; each node must see exactly two
    ports_at = {}
    for k, (u, v) in enumerate(edges):
        ports_at.setdefault(u, []).append((k, 0))
        ports_at.setdefault(v, []).append((k, 1))
    through = {}
    for node, ports in ports_at.items():
        if len(ports) != 2:
            raise SpineError("tangency segments do not close into circles")
        through[ports[0]] = ports[1]
        through[ports[1]] = ports[0]
    seen = set()
    circles = 0
    for start in through:
        if start in seen:
            continue
        circles += 1
        port = start
        while True:
            seen.add(port)
            k, side = through[port]     # pass through the node
            seen.add((k, side))
            port = (k, 1 - side)        # traverse the chord
            if port == start:
                break
    return circles


def single_s2_triv(components):
    """The unique trivial-sphere component, or raise."""
    trivs = [c for c in components if c.is_s2_triv]
    if not trivs:
        raise SpineError("no S2_triv component")
    if len(trivs) > 1:
        raise SpineError("multiple S2_triv components")
    return trivs[0]
