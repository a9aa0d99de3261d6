"""Finite preordered sets viewed as finite topological spaces.

A finite topology is the same thing as a reflexive-transitive relation on
its points: the minimal open set around p is the up-set of p, the closure
of p is its down-set, and continuous maps are exactly the monotone ones.
Everything here is immutable and every search is deterministic.
"""

import re
from dataclasses import dataclass
from functools import cached_property

from . import _kernels
from .errors import InvalidParameter, NotT0, SearchCapExceeded, UnknownPoint

DEFAULT_MAP_CAP = 100_000

_ID_RE = re.compile(r"^[A-Za-z0-9_]{1,32}$")


def _check_point_id(p):
    if not isinstance(p, str) or not _ID_RE.match(p):
        raise InvalidParameter(f"bad point id {p!r}")


@dataclass(frozen=True)
class FinPoset:
    """Finite preorder: ordered point tuple plus the full leq relation.

    ``leq`` must already be reflexive and transitive; use ``from_pairs`` to
    build one from generator (cover) pairs.
    """

    points: tuple[str, ...]
    leq: frozenset

    def __post_init__(self):
        seen = set()
        for p in self.points:
            _check_point_id(p)
            if p in seen:
                raise InvalidParameter(f"duplicate point {p!r}")
            seen.add(p)
        for p, q in self.leq:
            if p not in seen or q not in seen:
                raise InvalidParameter(f"leq pair ({p!r},{q!r}) outside points")
        for p in self.points:
            if (p, p) not in self.leq:
                raise InvalidParameter(f"missing reflexive pair ({p!r},{p!r})")
        for p, q in self.leq:
            for r in self.points:
                if (q, r) in self.leq and (p, r) not in self.leq:
                    raise InvalidParameter(
                        f"relation not transitive: {p!r}<={q!r}<={r!r}")

    @classmethod
    def from_pairs(cls, points, pairs):
        """Build from generator pairs; the closure is computed for you."""
        points = tuple(points)
        for p in points:
            _check_point_id(p)
        index = {p: i for i, p in enumerate(points)}
        try:
            ipairs = [(index[p], index[q]) for p, q in pairs]
        except KeyError as exc:
            raise UnknownPoint(f"order generator uses unknown point {exc}")
        closed = _kernels.transitive_closure(len(points), ipairs)
        leq = frozenset((points[i], points[j]) for i, j in closed)
        return cls(points, leq)

    @cached_property
    def index(self):
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def leq_matrix(self):
        n = len(self.points)
        m = [[False] * n for _ in range(n)]
        for p, q in self.leq:
            m[self.index[p]][self.index[q]] = True
        return tuple(tuple(row) for row in m)

    @cached_property
    def pairs(self):
        """All comparable pairs (p, q), p <= q, in point order."""
        return tuple((p, q) for p in self.points for q in self.points
                     if (p, q) in self.leq)

    def le(self, p, q):
        return (p, q) in self.leq

    def __len__(self):
        return len(self.points)


def up_set(X: FinPoset, p: str) -> frozenset:
    """Minimal open set around p: every q with p <= q."""
    if p not in X.index:
        raise UnknownPoint(f"unknown point {p!r}")
    return frozenset(q for q in X.points if X.le(p, q))


def closure(X: FinPoset, p: str) -> frozenset:
    """Closure of the point p: every q with q <= p."""
    if p not in X.index:
        raise UnknownPoint(f"unknown point {p!r}")
    return frozenset(q for q in X.points if X.le(q, p))


def is_open(X: FinPoset, pts) -> bool:
    """Open means up-closed."""
    pts = set(pts)
    for p in pts:
        if p not in X.index:
            raise UnknownPoint(f"unknown point {p!r}")
    return all(q in pts for p in pts for q in X.points if X.le(p, q))


def is_t0(X: FinPoset) -> bool:
    """True iff leq is antisymmetric (a genuine partial order)."""
    return all(not (X.le(p, q) and X.le(q, p))
               for p in X.points for q in X.points if p != q)


def equiv_classes(X: FinPoset, subset=None):
    """Classes of mutual comparability, each sorted, keyed by least member.

    Returned as a list of (rep, members) in X.points order of first
    appearance, with rep the lexicographically least member.
    """
    pts = list(X.points) if subset is None else [p for p in X.points if p in set(subset)]
    out = []
    seen = set()
    for p in pts:
        if p in seen:
            continue
        members = [q for q in pts if X.le(p, q) and X.le(q, p)]
        seen.update(members)
        out.append((min(members), tuple(sorted(members))))
    return out


def minimal_reps(X: FinPoset, subset=None):
    """Lex-least representative of each minimal mutual-comparability class."""
    pts = list(X.points) if subset is None else [p for p in X.points if p in set(subset)]
    pset = set(pts)
    reps = []
    for rep, members in equiv_classes(X, pset):
        if not any(X.le(r, rep) and not X.le(rep, r) for r in pset):
            reps.append(rep)
    return reps


def generating_edges(X: FinPoset):
    """A small edge set whose reflexive-transitive closure is all of leq.

    On a partial order these are exactly the cover (Hasse) edges.  On a
    general preorder each mutual-comparability class contributes a cycle
    through its members and the condensation contributes its cover edges
    between class representatives.
    """
    classes = equiv_classes(X)
    rep_of = {}
    for rep, members in classes:
        for m in members:
            rep_of[m] = rep
    edges = []
    for rep, members in classes:
        if len(members) > 1:
            for a, b in zip(members, members[1:]):
                edges.append((a, b))
            edges.append((members[-1], members[0]))
    reps = [rep for rep, _ in classes]
    for a in reps:
        for b in reps:
            if a == b or not X.le(a, b):
                continue
            if any(r not in (a, b) and X.le(a, r) and X.le(r, b)
                   and not X.le(r, a) and not X.le(b, r) for r in reps):
                continue
            edges.append((a, b))
    return tuple(edges)


@dataclass(frozen=True)
class MonotoneMap:
    """A point map between posets, stored as images along source.points."""

    source: FinPoset
    target: FinPoset
    images: tuple[str, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source.points):
            raise InvalidParameter("image tuple length != number of points")

    @classmethod
    def from_dict(cls, source, target, mapping):
        try:
            images = tuple(mapping[p] for p in source.points)
        except KeyError as exc:
            raise UnknownPoint(f"map not total: missing {exc}")
        return cls(source, target, images)

    @classmethod
    def identity(cls, X):
        return cls(X, X, X.points)

    def __call__(self, p):
        try:
            return self.images[self.source.index[p]]
        except KeyError:
            raise UnknownPoint(f"unknown point {p!r}")

    def as_dict(self):
        return dict(zip(self.source.points, self.images))

    def after(self, other: "MonotoneMap") -> "MonotoneMap":
        """self o other."""
        if other.target is not self.source and other.target != self.source:
            raise InvalidParameter("composition spaces do not match")
        return MonotoneMap(other.source, self.target,
                           tuple(self(q) for q in other.images))


def check_monotone(f: MonotoneMap) -> bool:
    """True iff p <= q always implies f(p) <= f(q)."""
    tindex = f.target.index
    for q in f.images:
        if q not in tindex:
            raise UnknownPoint(f"image {q!r} not in target")
    for p, q in f.source.pairs:
        if not f.target.le(f(p), f(q)):
            return False
    return True


def t0_quotient(X: FinPoset):
    """Collapse mutual comparabilities; returns (quotient, quotient map).

    Class representatives are the lexicographically least members; the
    quotient order is the induced partial order.
    """
    classes = equiv_classes(X)
    rep_of = {}
    for rep, members in classes:
        for m in members:
            rep_of[m] = rep
    reps = tuple(p for p in X.points if rep_of[p] == p)
    leq = frozenset((a, b) for a in reps for b in reps if X.le(a, b))
    Q = FinPoset(reps, leq)
    pi = MonotoneMap(X, Q, tuple(rep_of[p] for p in X.points))
    return Q, pi


def enumerate_monotone_maps(X: FinPoset, Y: FinPoset, cap: int = DEFAULT_MAP_CAP):
    """All monotone maps X -> Y in lexicographic image order."""
    if cap < 1:
        raise InvalidParameter("cap must be positive")
    x_pairs = tuple((X.index[p], X.index[q]) for p, q in X.pairs if p != q)
    found = _kernels.enumerate_monotone(
        len(X.points), len(Y.points), x_pairs, Y.leq_matrix, cap)
    if found is None:
        raise SearchCapExceeded(f"more than {cap} monotone maps")
    return [MonotoneMap(X, Y, tuple(Y.points[i] for i in images))
            for images in found]


def _iso_profile(X, p):
    ups = sum(1 for q in X.points if X.le(p, q))
    downs = sum(1 for q in X.points if X.le(q, p))
    return (ups, downs)


def poset_isomorphisms(X: FinPoset, Y: FinPoset, cap: int = DEFAULT_MAP_CAP):
    """All order-isomorphisms X -> Y, found by profile-pruned backtracking."""
    if not is_t0(X) or not is_t0(Y):
        raise NotT0("isomorphism search expects T0 posets")
    if len(X.points) != len(Y.points):
        return []
    xprof = {p: _iso_profile(X, p) for p in X.points}
    yprof = {q: _iso_profile(Y, q) for q in Y.points}
    if sorted(xprof.values()) != sorted(yprof.values()):
        return []
    candidates = [[q for q in Y.points if yprof[q] == xprof[p]] for p in X.points]
    n = len(X.points)
    results = []
    assign = [None] * n
    used = set()

    def backtrack(k):
        if k == n:
            results.append(tuple(assign))
            if len(results) > cap:
                raise SearchCapExceeded(f"more than {cap} isomorphisms")
            return
        p = X.points[k]
        for q in candidates[k]:
            if q in used:
                continue
            ok = True
            for j in range(k):
                pj = X.points[j]
                if X.le(pj, p) != Y.le(assign[j], q) or \
                   X.le(p, pj) != Y.le(q, assign[j]):
                    ok = False
                    break
            if ok:
                assign[k] = q
                used.add(q)
                backtrack(k + 1)
                used.discard(q)

    backtrack(0)
    return [MonotoneMap(X, Y, images) for images in results]
