"""Homotopy of ringed finite spaces.

Homotopy between morphisms is witnessed by fences: chains of one-step
comparisons in the morphism preorder (pointwise order plus commuting
comorphism triangles).  Beat points generalize the topological ones: an
upward beat additionally needs the restriction to its witness to be a
ring isomorphism.  Removing beat points yields the core, and two spaces
are homotopy equivalent exactly when their cores are isomorphic.
"""

from dataclasses import dataclass

from .errors import (InvalidParameter, MismatchedSpaces, NotABeatPoint,
                     NotT0, PreconditionViolated, SearchCapExceeded)
from .finalg import RingHom, find_ring_homs, find_ring_isos, is_ring_iso
from .finposet import (DEFAULT_MAP_CAP, MonotoneMap, enumerate_monotone_maps,
                       is_t0, poset_isomorphisms, t0_quotient)
from .rspace import (RingedSpace, SpaceMorphism, check_morphism,
                     induced_subspace)


@dataclass(frozen=True)
class Fence:
    """A chain of morphisms with direction tags between neighbours.

    tags[i] is "<=" when steps[i] <= steps[i+1] in the morphism preorder
    and ">=" for the opposite comparison; a single step needs no tags.
    """

    steps: tuple[SpaceMorphism, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.steps) == 0 or len(self.tags) != len(self.steps) - 1:
            raise InvalidParameter("fence needs n steps and n-1 tags")

    def __len__(self):
        return len(self.tags)

    def check(self) -> bool:
        for i, tag in enumerate(self.tags):
            a, b = self.steps[i], self.steps[i + 1]
            if tag == "<=":
                if not morphism_leq(a, b):
                    return False
            elif tag == ">=":
                if not morphism_leq(b, a):
                    return False
            else:
                return False
        return True


def morphism_leq(f: SpaceMorphism, g: SpaceMorphism) -> bool:
    """Pointwise order plus the comorphism triangle at every point."""
    if f.source != g.source or f.target != g.target:
        raise MismatchedSpaces("morphisms must share source and target")
    Y = f.target
    for p in f.source.poset.points:
        if not Y.poset.le(f(p), g(p)):
            return False
    for p in f.source.poset.points:
        via = Y.res_at(f(p), g(p)).then(g.comorph_at(p))
        if via.images != f.comorph_at(p).images:
            return False
    return True


def morphism_equal_check(f: SpaceMorphism, g: SpaceMorphism) -> bool:
    """Same point map and same comorphism at every point."""
    if f.source != g.source or f.target != g.target:
        return False
    return f.point_map.images == g.point_map.images and \
        all(a.images == b.images for a, b in zip(f.comorphs, g.comorphs))


def enumerate_morphisms(X: RingedSpace, Y: RingedSpace,
                        cap: int = DEFAULT_MAP_CAP):
    """Hom(X, Y): monotone maps paired with every comorphism family that
    makes all squares commute; deterministic order, capped."""
    out = []
    for f in enumerate_monotone_maps(X.poset, Y.poset, cap):
        pts = X.poset.points
        cands = [find_ring_homs(Y.ring_at(f(p)), X.ring_at(p)) for p in pts]
        if any(not c for c in cands):
            continue
        assign = [None] * len(pts)

        def square_ok(i, j):
            p, q = pts[i], pts[j]
            for a, b, ia, ib in ((p, q, assign[i], assign[j]),
                                 (q, p, assign[j], assign[i])):
                if X.poset.le(a, b) and a != b:
                    lhs = Y.res_at(f(a), f(b)).then(ib)
                    rhs = ia.then(X.res_at(a, b))
                    if lhs.images != rhs.images:
                        return False
            return True

        def backtrack(i):
            if i == len(pts):
                out.append(SpaceMorphism(X, Y, f, tuple(assign)))
                if len(out) > cap:
                    raise SearchCapExceeded(f"more than {cap} morphisms")
                return
            for h in cands[i]:
                assign[i] = h
                if all(square_ok(i, j) for j in range(i)):
                    backtrack(i + 1)
            assign[i] = None

        backtrack(0)
    return out


def are_homotopic(f: SpaceMorphism, g: SpaceMorphism,
                  cap: int = DEFAULT_MAP_CAP):
    """Breadth-first fence search through the full morphism set, or None."""
    if f.source != g.source or f.target != g.target:
        raise MismatchedSpaces("morphisms must share source and target")
    if morphism_equal_check(f, g):
        return Fence((f,), ())
    homs = enumerate_morphisms(f.source, f.target, cap)
    keyed = {(m.point_map.images, tuple(h.images for h in m.comorphs)): i
             for i, m in enumerate(homs)}

    def key(m):
        return (m.point_map.images, tuple(h.images for h in m.comorphs))

    try:
        start, goal = keyed[key(f)], keyed[key(g)]
    except KeyError:
        raise InvalidParameter("morphism is not valid for its spaces")
    prev = {start: None}
    frontier = [start]
    while frontier and goal not in prev:
        nxt = []
        for i in frontier:
            for j in range(len(homs)):
                if j in prev:
                    continue
                if morphism_leq(homs[i], homs[j]):
                    tag = "<="
                elif morphism_leq(homs[j], homs[i]):
                    tag = ">="
                else:
                    continue
                prev[j] = (i, tag)
                nxt.append(j)
        frontier = nxt
    if goal not in prev:
        return None
    steps, tags = [goal], []
    while prev[steps[-1]] is not None:
        i, tag = prev[steps[-1]]
        tags.append(tag)
        steps.append(i)
    steps.reverse()
    tags.reverse()
    return Fence(tuple(homs[i] for i in steps), tuple(tags))


# -- beat points and cores --

def find_beat_points(X: RingedSpace):
    """(point, kind, witness) triples, sorted by (point, down-before-up).

    Down beat: the strict down-set has a maximum.  Up beat: the strict
    up-set has a minimum AND the restriction to it is a ring isomorphism.
    """
    if not is_t0(X.poset):
        raise NotT0("beat points are defined on T0 spaces")
    P = X.poset
    out = []
    for p in sorted(P.points):
        down = [q for q in P.points if P.le(q, p) and q != p]
        for w in down:
            if all(P.le(q, w) for q in down):
                out.append((p, "down", w))
                break
        ups = [q for q in P.points if P.le(p, q) and q != p]
        for w in sorted(ups):
            if all(P.le(w, q) for q in ups):
                if is_ring_iso(X.res_at(p, w)):
                    out.append((p, "up", w))
                break
    return out


def _inclusion_morphism(X: RingedSpace, sub: RingedSpace) -> SpaceMorphism:
    return SpaceMorphism.build(
        sub, X, {p: p for p in sub.poset.points},
        {p: RingHom.identity(sub.ring_at(p)) for p in sub.poset.points})


def remove_beat_point(X: RingedSpace, p: str):
    """(subspace, retraction, inclusion) for one beat-point removal.

    The retraction sends p to its witness; on an up beat the comorphism at
    p is the inverse of the (verified) restriction isomorphism.  The
    round trip is checked to be one fence step from the identity.
    """
    beats = [b for b in find_beat_points(X) if b[0] == p]
    if not beats:
        raise NotABeatPoint(f"{p!r} is not a beat point")
    _, kind, w = beats[0]
    rest = [q for q in X.poset.points if q != p]
    sub = induced_subspace(X, rest)
    comorphs = {}
    for q in rest:
        comorphs[q] = RingHom.identity(X.ring_at(q))
    if kind == "down":
        comorphs[p] = X.res_at(w, p)
    else:
        iso = X.res_at(p, w)
        inv = [0] * len(iso.images)
        for i, v in enumerate(iso.images):
            inv[v] = i
        comorphs[p] = RingHom(X.ring_at(w), X.ring_at(p), tuple(inv))
    mapping = {q: q for q in rest}
    mapping[p] = w
    retraction = SpaceMorphism.build(X, sub, mapping, comorphs)
    inclusion = _inclusion_morphism(X, sub)
    if check_morphism(retraction) or check_morphism(inclusion):
        raise NotABeatPoint(f"removal of {p!r} does not retract")
    round_trip = retraction.then(inclusion)
    ident = SpaceMorphism.identity(X)
    if not (morphism_leq(round_trip, ident) or morphism_leq(ident, round_trip)):
        raise NotABeatPoint(f"removal of {p!r} is not one fence step")
    return sub, retraction, inclusion


def _ringed_t0(X: RingedSpace):
    """T0 quotient as a ringed space with quotient morphism and a section.

    Mutually comparable points carry mutually inverse restrictions, so the
    class representative's ring stands for the class.
    """
    Q, pi_map = t0_quotient(X.poset)
    rings = {r: X.ring_at(r) for r in Q.points}
    res = {(a, b): X.res_at(a, b) for a, b in Q.pairs if a != b}
    X0 = RingedSpace.build(Q, rings, res)
    pi = SpaceMorphism(X, X0, pi_map,
                       tuple(X.res_at(pi_map(p), p)
                             for p in X.poset.points))
    section = SpaceMorphism.build(
        X0, X, {r: r for r in Q.points},
        {r: RingHom.identity(X.ring_at(r)) for r in Q.points})
    return X0, pi, section


@dataclass(frozen=True)
class CoreReport:
    """Core plus the trace that produced it.

    removal_trace lists (point, kind, witness) in removal order; the
    composed retraction/inclusion witness the deformation both ways.
    """

    core: RingedSpace
    removal_trace: tuple
    t0_trace: SpaceMorphism
    retraction: SpaceMorphism
    inclusion: SpaceMorphism


def core(X: RingedSpace, cap: int = DEFAULT_MAP_CAP) -> CoreReport:
    """T0-quotient, then remove the least beat point until none remain."""
    cur, pi, section = _ringed_t0(X)
    retraction, inclusion = pi, section
    trace = []
    while True:
        beats = find_beat_points(cur)
        if not beats:
            break
        p, kind, w = beats[0]
        sub, r, i = remove_beat_point(cur, p)
        trace.append((p, kind, w))
        retraction = retraction.then(r)
        inclusion = i.then(inclusion)
        cur = sub
    return CoreReport(cur, tuple(trace), pi, retraction, inclusion)


def is_minimal(X: RingedSpace) -> bool:
    """T0 with no beat points at all."""
    return is_t0(X.poset) and not find_beat_points(X)


def space_isomorphisms(X: RingedSpace, Y: RingedSpace,
                       cap: int = DEFAULT_MAP_CAP):
    """All isomorphisms of ringed spaces X -> Y.

    Each is a poset isomorphism h plus a per-point family of ring
    isomorphisms commuting with the restrictions; returned as
    (MonotoneMap, {point: RingHom}) in deterministic order.
    """
    out = []
    for h in poset_isomorphisms(X.poset, Y.poset, cap):
        pts = X.poset.points
        cands = [find_ring_isos(X.ring_at(p), Y.ring_at(h(p))) for p in pts]
        if any(not c for c in cands):
            continue
        assign = [None] * len(pts)

        def square_ok(i, j):
            p, q = pts[i], pts[j]
            for a, b, ia, ib in ((p, q, assign[i], assign[j]),
                                 (q, p, assign[j], assign[i])):
                if X.poset.le(a, b) and a != b:
                    lhs = ia.then(Y.res_at(h(a), h(b)))
                    rhs = X.res_at(a, b).then(ib)
                    if lhs.images != rhs.images:
                        return False
            return True

        def backtrack(i):
            if i == len(pts):
                out.append((h, {p: assign[k] for k, p in enumerate(pts)}))
                if len(out) > cap:
                    raise SearchCapExceeded(f"more than {cap} isomorphisms")
                return
            for iso in cands[i]:
                assign[i] = iso
                if all(square_ok(i, j) for j in range(i)):
                    backtrack(i + 1)
            assign[i] = None

        backtrack(0)
    return out


@dataclass(frozen=True)
class HeqResult:
    equivalent: bool
    core_x: CoreReport
    core_y: CoreReport
    iso: tuple | None  # (MonotoneMap, {point: RingHom}) between the cores


def homotopy_equivalent(X: RingedSpace, Y: RingedSpace,
                        cap: int = DEFAULT_MAP_CAP) -> HeqResult:
    """Equivalent iff the cores are isomorphic as ringed spaces."""
    cx, cy = core(X, cap), core(Y, cap)
    isos = space_isomorphisms(cx.core, cy.core, cap)
    return HeqResult(bool(isos), cx, cy, isos[0] if isos else None)


def verify_sdr(X: RingedSpace, S, r: SpaceMorphism,
               cap: int = DEFAULT_MAP_CAP) -> bool:
    """Is inclusion-after-r fence-connected to the identity relative to S?

    Relative means: every morphism along the fence fixes S pointwise with
    identity comorphisms there.  r must already restrict to the identity
    on S.
    """
    S = set(S)
    sub = induced_subspace(X, S)
    if r.source != X or r.target != sub:
        raise PreconditionViolated("retraction endpoints do not match")
    for s in sub.poset.points:
        if r(s) != s or r.comorph_at(s).images != \
                tuple(range(len(X.ring_at(s)))):
            raise PreconditionViolated("retraction does not fix S")
    ident = SpaceMorphism.identity(X)
    target = r.then(_inclusion_morphism(X, sub))

    def fixes_s(m):
        return all(m(s) == s and m.comorph_at(s).images ==
                   tuple(range(len(X.ring_at(s)))) for s in S)

    homs = [m for m in enumerate_morphisms(X, X, cap) if fixes_s(m)]
    index = {(m.point_map.images, tuple(h.images for h in m.comorphs)): i
             for i, m in enumerate(homs)}

    def key(m):
        return (m.point_map.images, tuple(h.images for h in m.comorphs))

    if key(ident) not in index or key(target) not in index:
        return False
    start, goal = index[key(ident)], index[key(target)]
    seen = {start}
    frontier = [start]
    while frontier:
        if goal in seen:
            return True
        nxt = []
        for i in frontier:
            for j in range(len(homs)):
                if j not in seen and (morphism_leq(homs[i], homs[j]) or
                                      morphism_leq(homs[j], homs[i])):
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return goal in seen


def minimal_rigidity_check(X: RingedSpace, cap: int = DEFAULT_MAP_CAP) -> bool:
    """On a minimal space the homotopy class of the identity is trivial;
    returns False only if that fails (which would be a bug)."""
    if not is_minimal(X):
        raise PreconditionViolated("space is not minimal")
    homs = enumerate_morphisms(X, X, cap)
    ident = SpaceMorphism.identity(X)
    component = set()
    ids = [i for i, m in enumerate(homs) if morphism_equal_check(m, ident)]
    if not ids:
        return False
    frontier = [ids[0]]
    component.add(ids[0])
    while frontier:
        nxt = []
        for i in frontier:
            for j in range(len(homs)):
                if j not in component and (morphism_leq(homs[i], homs[j]) or
                                           morphism_leq(homs[j], homs[i])):
                    component.add(j)
                    nxt.append(j)
        frontier = nxt
    return all(morphism_equal_check(homs[i], ident) for i in component)
