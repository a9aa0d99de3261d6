"""Quotient of a ringed finite space by a finite open cover.

Points that lie in exactly the same cover members collapse to one class;
classes are ordered by reverse inclusion of the member intersections, and
the quotient point carries the sections ring of the base over that
intersection.  The projection is a morphism of ringed spaces, and maps of
bases with compatible covers descend to the quotients.
"""

from dataclasses import dataclass

from .errors import (InvalidParameter, NonCommutingDiagram,
                     NotOpenCoverMember, NotThinner)
from .finalg import DEFAULT_TUPLE_CAP, RingHom
from .finposet import FinPoset, is_open, up_set
from .rspace import RingedSpace, SpaceMorphism, _sections_ring_data


@dataclass(frozen=True)
class CoverSpec:
    """A ringed base plus named open (up-closed) subsets covering it."""

    base: RingedSpace
    members: tuple  # (name, frozenset of points) pairs

    def __post_init__(self):
        names = [n for n, _ in self.members]
        if len(set(names)) != len(names):
            raise InvalidParameter("duplicate cover member names")
        covered = set()
        for name, pts in self.members:
            if not is_open(self.base.poset, pts):
                raise NotOpenCoverMember(f"cover member {name!r} is not open")
            covered |= set(pts)
        if covered != set(self.base.poset.points):
            raise InvalidParameter("cover members do not cover the base")

    @classmethod
    def build(cls, base, members_by_name):
        return cls(base, tuple((n, frozenset(members_by_name[n]))
                               for n in members_by_name))

    def neighbourhood(self, s) -> frozenset:
        """Intersection of all members containing the point s."""
        out = None
        for _, pts in self.members:
            if s in pts:
                out = pts if out is None else out & pts
        return frozenset(out)


def cover_quotient(C: CoverSpec, cap: int = DEFAULT_TUPLE_CAP):
    """(quotient ringed space, projection morphism).

    Two points collapse when the cover does not distinguish them; the
    class of s sits below the class of t iff the neighbourhood of s
    contains that of t.  Quotient rings are sections rings of the base
    over the neighbourhoods, and the projection evaluates families.
    """
    base = C.base
    nbhd = {s: C.neighbourhood(s) for s in base.poset.points}
    rep_of, reps = {}, []
    for s in base.poset.points:
        for r in reps:
            if nbhd[r] == nbhd[s]:
                rep_of[s] = r
                break
        else:
            rep_of[s] = s
            reps.append(s)
    # representative = lexicographically least member of the class
    for r in list(reps):
        members = [s for s in base.poset.points if rep_of[s] == r]
        least = min(members)
        if least != r:
            reps[reps.index(r)] = least
            for s in members:
                rep_of[s] = least
    leq = frozenset((a, b) for a in reps for b in reps
                    if nbhd[a] >= nbhd[b])
    Q = FinPoset(tuple(reps), leq)
    ringdata = {r: _sections_ring_data(base, nbhd[r], cap) for r in reps}
    rings = {r: ringdata[r][0] for r in reps}
    res = {}
    for a, b in Q.pairs:
        if a == b:
            continue
        ring_a, tuples_a, _, sub_a = ringdata[a]
        ring_b, tuples_b, _, sub_b = ringdata[b]
        lookup = {t: k for k, t in enumerate(tuples_b)}
        posn = {p: i for i, p in enumerate(sub_a.points)}
        images = tuple(lookup[tuple(t[posn[p]] for p in sub_b.points)]
                       for t in tuples_a)
        res[(a, b)] = RingHom(ring_a, ring_b, images)
    X = RingedSpace.build(Q, rings, res)
    comorphs = {}
    for s in base.poset.points:
        r = rep_of[s]
        _, _, projections, sub = ringdata[r]
        comorphs[s] = projections[sub.index[s]]
    pi = SpaceMorphism.build(base, X, rep_of, comorphs)
    return X, pi


def pi_preimage_has_min(pi: SpaceMorphism, x: str):
    """Minimum point of the preimage of U_x under the projection, if any."""
    base, X = pi.source, pi.target
    ux = up_set(X.poset, x)
    fiber = [s for s in base.poset.points if pi(s) in ux]
    for m in sorted(fiber):
        if all(base.poset.le(m, t) for t in fiber):
            return m
    return None


def cover_functoriality(f: SpaceMorphism, C_src: CoverSpec, C_tgt: CoverSpec,
                        cap: int = DEFAULT_TUPLE_CAP) -> SpaceMorphism:
    """Descend f to the cover quotients.

    Requires the source cover to be thinner than the pullback of the
    target cover: the neighbourhood of every source point must map into
    the neighbourhood of its image.  The commuting square with both
    projections is verified.
    """
    if C_src.base != f.source or C_tgt.base != f.target:
        raise InvalidParameter("covers do not sit on the morphism endpoints")
    for s in f.source.poset.points:
        tgt_nbhd = C_tgt.neighbourhood(f(s))
        if any(f(t) not in tgt_nbhd for t in C_src.neighbourhood(s)):
            raise NotThinner(f"cover is not thinner at point {s!r}")
    Xs, pi_s = cover_quotient(C_src, cap)
    Xt, pi_t = cover_quotient(C_tgt, cap)
    mapping = {xs: pi_t(f(xs)) for xs in Xs.poset.points}
    nb_src = {r: C_src.neighbourhood(r) for r in Xs.poset.points}
    data_t = {xt: _sections_ring_data(C_tgt.base, C_tgt.neighbourhood(xt), cap)
              for xt in Xt.poset.points}
    data_s = {xs: _sections_ring_data(C_src.base, nb_src[xs], cap)
              for xs in Xs.poset.points}
    comorphs = {}
    for xs in Xs.poset.points:
        xt = mapping[xs]
        ring_t, tuples_t, _, sub_t = data_t[xt]
        ring_s, tuples_s, _, sub_s = data_s[xs]
        lookup = {t: k for k, t in enumerate(tuples_s)}
        pos_t = {p: i for i, p in enumerate(sub_t.points)}
        images = []
        for fam in tuples_t:
            out = []
            for u in sub_s.points:
                comp = fam[pos_t[f(u)]]
                out.append(f.comorph_at(u).images[comp])
            images.append(lookup[tuple(out)])
        comorphs[xs] = RingHom(ring_t, ring_s, tuple(images))
    g = SpaceMorphism.build(Xs, Xt, mapping, comorphs)
    lhs = f.then(pi_t)
    rhs = pi_s.then(g)
    if lhs.point_map.images != rhs.point_map.images or \
            any(a.images != b.images
                for a, b in zip(lhs.comorphs, rhs.comorphs)):
        raise NonCommutingDiagram("projection square does not commute")
    return g
