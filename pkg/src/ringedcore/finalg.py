"""Exact finite commutative algebra on explicit operation tables.

Rings and modules carry their full carriers and addition/multiplication/
action tables, so every structural question (hom? iso? tensor? limit?) is
decided by finite enumeration.  All carriers are index-based internally;
element ids are strings and only translated at the API surface.

Construction is strict: every ring and module is run through its complete
axiom suite before it exists.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import _kernels
from .errors import (AxiomError, InvalidParameter, NonCommutingDiagram,
                     NotAHom, SearchCapExceeded)
from .finposet import FinPoset, minimal_reps

DEFAULT_TUPLE_CAP = 1_000_000
_HARD_SEARCH_CAP = 1_000_000


@dataclass(frozen=True)
class FiniteRing:
    """Commutative unital ring on an explicit carrier.

    ``add`` and ``mul`` are index tables; ``zero``/``one`` are indices.
    The zero ring (one element, zero == one) is allowed.
    """

    elems: tuple[str, ...]
    add: tuple[tuple[int, ...], ...]
    mul: tuple[tuple[int, ...], ...]
    zero: int
    one: int
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.elems)
        if n == 0:
            raise InvalidParameter("ring carrier is empty")
        if len(set(self.elems)) != n:
            raise InvalidParameter("duplicate element ids")
        for t, w in ((self.add, "add"), (self.mul, "mul")):
            if len(t) != n or any(len(r) != n for r in t):
                raise InvalidParameter(f"{w} table shape must be {n}x{n}")
            if any(not (0 <= v < n) for r in t for v in r):
                raise InvalidParameter(f"{w} table entry out of range")
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise InvalidParameter("zero/one index out of range")
        if self.zero == self.one and n > 1:
            raise AxiomError("zero equals one in a ring with >1 elements")
        bad = _kernels.ring_axiom_violation(n, self.add, self.mul,
                                            self.zero, self.one)
        if bad is not None:
            raise AxiomError(f"ring axiom failed: {bad[0]} at "
                             f"{tuple(self.elems[i] for i in bad[1:])}")

    @cached_property
    def index(self):
        return {e: i for i, e in enumerate(self.elems)}

    @property
    def is_zero(self):
        return len(self.elems) == 1

    def idx(self, e):
        try:
            return self.index[e]
        except KeyError:
            raise InvalidParameter(f"unknown ring element {e!r}")

    def add_of(self, a, b):
        return self.elems[self.add[self.idx(a)][self.idx(b)]]

    def mul_of(self, a, b):
        return self.elems[self.mul[self.idx(a)][self.idx(b)]]

    def additive_order(self, i):
        k, cur = 1, i
        while cur != self.zero:
            cur = self.add[cur][i]
            k += 1
        return k

    def __len__(self):
        return len(self.elems)

    def __repr__(self):
        return f"FiniteRing({self.name or f'{len(self.elems)} elems'})"


def ring_zmod(n: int) -> FiniteRing:
    """Integers mod n with element ids "0".."n-1"; n = 1 is the zero ring."""
    if n < 1:
        raise InvalidParameter("modulus must be >= 1")
    elems = tuple(str(i) for i in range(n))
    add = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    mul = tuple(tuple((i * j) % n for j in range(n)) for i in range(n))
    return FiniteRing(elems, add, mul, 0, 1 % n, name=f"Z/{n}")


def ring_product(A: FiniteRing, B: FiniteRing) -> FiniteRing:
    """Componentwise ring on pairs, ids "(a,b)"."""
    pairs = [(i, j) for i in range(len(A)) for j in range(len(B))]
    pos = {p: k for k, p in enumerate(pairs)}
    elems = tuple(f"({A.elems[i]},{B.elems[j]})" for i, j in pairs)
    add = tuple(tuple(pos[(A.add[i1][i2], B.add[j1][j2])] for i2, j2 in pairs)
                for i1, j1 in pairs)
    mul = tuple(tuple(pos[(A.mul[i1][i2], B.mul[j1][j2])] for i2, j2 in pairs)
                for i1, j1 in pairs)
    name = f"{A.name or '?'}x{B.name or '?'}"
    return FiniteRing(elems, add, mul, pos[(A.zero, B.zero)],
                      pos[(A.one, B.one)], name=name)


def ring_from_tables(elems, add_ids, mul_ids, zero_id, one_id, name=None):
    """Construct from id-level tables (the file-format path)."""
    elems = tuple(elems)
    index = {e: i for i, e in enumerate(elems)}
    try:
        add = tuple(tuple(index[v] for v in row) for row in add_ids)
        mul = tuple(tuple(index[v] for v in row) for row in mul_ids)
        return FiniteRing(elems, add, mul, index[zero_id], index[one_id],
                          name=name)
    except KeyError as exc:
        raise InvalidParameter(f"table references unknown element {exc}")


@dataclass(frozen=True)
class RingHom:
    """Total map between ring carriers, stored as image indices."""

    source: FiniteRing
    target: FiniteRing
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise InvalidParameter("hom must be total on the source")
        if any(not (0 <= v < len(self.target)) for v in self.images):
            raise InvalidParameter("hom image out of range")

    @classmethod
    def from_dict(cls, source, target, mapping):
        try:
            images = tuple(target.idx(mapping[e]) for e in source.elems)
        except KeyError as exc:
            raise InvalidParameter(f"hom not total: missing {exc}")
        return cls(source, target, images)

    @classmethod
    def identity(cls, R):
        return cls(R, R, tuple(range(len(R))))

    def __call__(self, e):
        return self.target.elems[self.images[self.source.idx(e)]]

    def as_dict(self):
        return {e: self.target.elems[self.images[i]]
                for i, e in enumerate(self.source.elems)}

    def then(self, other: "RingHom") -> "RingHom":
        """other o self."""
        if other.source != self.target:
            raise InvalidParameter("hom composition rings do not match")
        return RingHom(self.source, other.target,
                       tuple(other.images[i] for i in self.images))


def check_hom(h: RingHom) -> bool:
    """True iff h preserves add, mul and one."""
    return _kernels.hom_violation(
        len(h.source), h.images, h.source.add, h.source.mul,
        h.target.add, h.target.mul, h.target.one, h.source.one) is None


def is_ring_iso(h: RingHom) -> bool:
    if not check_hom(h):
        raise NotAHom("map is not a ring homomorphism")
    return len(h.source) == len(h.target) and \
        len(set(h.images)) == len(h.target)


# -- additive-map backtracking engine (shared by ring and module homs) --

def _extend_subgroup(span, g, add):
    if g in span:
        return span
    span = set(span)
    shifts = []
    cur = g
    while cur not in span:
        shifts.append(cur)
        cur = add[cur][g]
    base = list(span)
    for s in shifts:
        for x in base:
            span.add(add[x][s])
    return span


def _additive_generators(n, add, zero):
    gens, span = [], {zero}
    for i in range(n):
        if i not in span:
            gens.append(i)
            span = _extend_subgroup(span, i, add)
    return gens


def _additive_order(i, add, zero):
    k, cur = 1, i
    while cur != zero:
        cur = add[cur][i]
        k += 1
    return k


def _additive_maps(n_src, add_src, zero_src, n_tgt, add_tgt, zero_tgt,
                   candidates_for, leaf_cap):
    """All additive maps, as image tuples, built generator by generator."""
    gens = _additive_generators(n_src, add_src, zero_src)
    results = []
    leaves = 0

    def extend(hmap, g, h):
        # least d with d*g already mapped decides well-definedness
        d, cur = 1, g
        while cur not in hmap:
            cur = add_src[cur][g]
            d += 1
        img, want = zero_tgt, hmap[cur]
        for _ in range(d):
            img = add_tgt[img][h]
        if img != want:
            return None
        new = dict(hmap)
        dom = list(hmap)
        shift_s, shift_t = g, h
        for _ in range(d - 1):
            for x in dom:
                new[add_src[x][shift_s]] = add_tgt[new[x]][shift_t]
            shift_s = add_src[shift_s][g]
            shift_t = add_tgt[shift_t][h]
        return new

    def rec(k, hmap):
        nonlocal leaves
        if k == len(gens):
            leaves += 1
            if leaves > leaf_cap:
                raise SearchCapExceeded("additive-map search exceeded cap")
            results.append(tuple(hmap[i] for i in range(n_src)))
            return
        g = gens[k]
        for h in candidates_for(g):
            ext = extend(hmap, g, h)
            if ext is not None:
                rec(k + 1, ext)

    rec(0, {zero_src: zero_tgt})
    return results


@lru_cache(maxsize=None)
def _ring_elem_profile(R: FiniteRing):
    """Iso-invariant per-element fingerprint used to prune iso search."""
    out = []
    for i in range(len(R)):
        principal = len({R.mul[i][j] for j in range(len(R))})
        idem = R.mul[i][i] == i
        unit = any(R.mul[i][j] == R.one for j in range(len(R)))
        out.append((R.additive_order(i), idem, unit, principal))
    return tuple(out)


@lru_cache(maxsize=None)
def _ring_maps_cached(A: FiniteRing, B: FiniteRing, iso_only: bool):
    ordB = [_additive_order(i, B.add, B.zero) for i in range(len(B))]
    ordA = {g: _additive_order(g, A.add, A.zero) for g in range(len(A))}
    profA = _ring_elem_profile(A) if iso_only else None
    profB = _ring_elem_profile(B) if iso_only else None

    def candidates_for(g):
        if iso_only:
            return [h for h in range(len(B)) if profB[h] == profA[g]]
        return [h for h in range(len(B)) if ordA[g] % ordB[h] == 0]

    if iso_only and (len(A) != len(B) or
                     sorted(profA) != sorted(profB)):
        return ()
    images = _additive_maps(len(A), A.add, A.zero, len(B), B.add, B.zero,
                            candidates_for, _HARD_SEARCH_CAP)
    keep = []
    for im in images:
        if _kernels.hom_violation(len(A), im, A.add, A.mul, B.add, B.mul,
                                  B.one, A.one) is not None:
            continue
        if iso_only and len(set(im)) != len(B):
            continue
        keep.append(im)
    return tuple(sorted(keep))


def find_ring_homs(A: FiniteRing, B: FiniteRing, cap: int = _HARD_SEARCH_CAP):
    """All unital ring homomorphisms A -> B, sorted by image tuple."""
    images = _ring_maps_cached(A, B, False)
    if len(images) > cap:
        raise SearchCapExceeded(f"more than {cap} ring homs")
    return [RingHom(A, B, im) for im in images]


def find_ring_isos(A: FiniteRing, B: FiniteRing, cap: int = _HARD_SEARCH_CAP):
    """All ring isomorphisms A -> B, additively backtracked, profile-pruned."""
    images = _ring_maps_cached(A, B, True)
    if len(images) > cap:
        raise SearchCapExceeded(f"more than {cap} ring isos")
    return [RingHom(A, B, im) for im in images]


@dataclass(frozen=True)
class FiniteModule:
    """Module over a FiniteRing with explicit carrier and action table."""

    ring: FiniteRing
    elems: tuple[str, ...]
    add: tuple[tuple[int, ...], ...]
    zero: int
    act: tuple[tuple[int, ...], ...]  # act[ring_idx][mod_idx]

    def __post_init__(self):
        n = len(self.elems)
        if n == 0:
            raise InvalidParameter("module carrier is empty")
        if len(set(self.elems)) != n:
            raise InvalidParameter("duplicate element ids")
        if len(self.add) != n or any(len(r) != n for r in self.add):
            raise InvalidParameter(f"add table shape must be {n}x{n}")
        if len(self.act) != len(self.ring) or any(len(r) != n for r in self.act):
            raise InvalidParameter("act table shape must be |R| x |M|")
        if any(not (0 <= v < n) for r in self.add for v in r) or \
           any(not (0 <= v < n) for r in self.act for v in r):
            raise InvalidParameter("table entry out of range")
        if not (0 <= self.zero < n):
            raise InvalidParameter("zero index out of range")
        bad = _kernels.module_axiom_violation(
            len(self.ring), n, self.ring.add, self.ring.mul, self.ring.one,
            self.add, self.zero, self.act)
        if bad is not None:
            raise AxiomError(f"module axiom failed: {bad[0]} at {bad[1:]}")

    @cached_property
    def index(self):
        return {e: i for i, e in enumerate(self.elems)}

    def idx(self, e):
        try:
            return self.index[e]
        except KeyError:
            raise InvalidParameter(f"unknown module element {e!r}")

    def add_of(self, a, b):
        return self.elems[self.add[self.idx(a)][self.idx(b)]]

    def act_of(self, r, m):
        return self.elems[self.act[self.ring.idx(r)][self.idx(m)]]

    @property
    def is_zero(self):
        return len(self.elems) == 1

    def __len__(self):
        return len(self.elems)

    def __repr__(self):
        return f"FiniteModule({len(self.elems)} elems over {self.ring!r})"


def module_from_ring(R: FiniteRing) -> FiniteModule:
    """R as a module over itself; the stalk type of the structure sheaf."""
    return FiniteModule(R, R.elems, R.add, R.zero, R.mul)


def module_zero(R: FiniteRing) -> FiniteModule:
    return FiniteModule(R, ("0",), ((0,),), 0, tuple((0,) for _ in range(len(R))))


def module_product(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    """Componentwise module on pairs over the shared ring."""
    if M.ring != N.ring:
        raise InvalidParameter("module product needs a shared ring")
    pairs = [(i, j) for i in range(len(M)) for j in range(len(N))]
    pos = {p: k for k, p in enumerate(pairs)}
    elems = tuple(f"({M.elems[i]},{N.elems[j]})" for i, j in pairs)
    add = tuple(tuple(pos[(M.add[i1][i2], N.add[j1][j2])] for i2, j2 in pairs)
                for i1, j1 in pairs)
    act = tuple(tuple(pos[(M.act[r][i], N.act[r][j])] for i, j in pairs)
                for r in range(len(M.ring)))
    return FiniteModule(M.ring, elems, add, pos[(M.zero, N.zero)], act)


def module_from_tables(ring, elems, add_ids, zero_id, act_ids):
    """Construct from id-level tables; act_ids maps are ring_id -> row."""
    elems = tuple(elems)
    index = {e: i for i, e in enumerate(elems)}
    try:
        add = tuple(tuple(index[v] for v in row) for row in add_ids)
        act = tuple(tuple(index[v] for v in act_ids[r]) for r in ring.elems)
        return FiniteModule(ring, elems, add, index[zero_id], act)
    except KeyError as exc:
        raise InvalidParameter(f"table references unknown element {exc}")


@dataclass(frozen=True)
class ModuleHom:
    """Additive, action-equivariant map between modules.

    When source and target live over different rings the scalars transport
    along ``ring_map``; ``None`` means both modules share one ring.
    """

    source: FiniteModule
    target: FiniteModule
    images: tuple[int, ...]
    ring_map: RingHom | None = None

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise InvalidParameter("module hom must be total")
        if any(not (0 <= v < len(self.target)) for v in self.images):
            raise InvalidParameter("module hom image out of range")
        if self.ring_map is None:
            if self.source.ring != self.target.ring:
                raise InvalidParameter("different rings need a ring_map")
        elif self.ring_map.source != self.source.ring or \
                self.ring_map.target != self.target.ring:
            raise InvalidParameter("ring_map endpoints do not match modules")

    @classmethod
    def from_dict(cls, source, target, mapping, ring_map=None):
        try:
            images = tuple(target.idx(mapping[e]) for e in source.elems)
        except KeyError as exc:
            raise InvalidParameter(f"module hom not total: missing {exc}")
        return cls(source, target, images, ring_map)

    @classmethod
    def identity(cls, M):
        return cls(M, M, tuple(range(len(M))))

    @classmethod
    def zero_map(cls, source, target, ring_map=None):
        return cls(source, target, tuple(target.zero for _ in source.elems),
                   ring_map)

    def __call__(self, e):
        return self.target.elems[self.images[self.source.idx(e)]]

    def as_dict(self):
        return {e: self.target.elems[self.images[i]]
                for i, e in enumerate(self.source.elems)}

    @property
    def scalar_map(self) -> RingHom:
        return self.ring_map or RingHom.identity(self.source.ring)

    def then(self, other: "ModuleHom") -> "ModuleHom":
        """other o self; scalar maps compose."""
        if other.source != self.target:
            raise InvalidParameter("module hom composition does not match")
        images = tuple(other.images[i] for i in self.images)
        if self.ring_map is None and other.ring_map is None:
            rm = None
        else:
            rm = self.scalar_map.then(other.scalar_map)
        return ModuleHom(self.source, other.target, images, rm)

    def is_bijective(self):
        return len(self.source) == len(self.target) and \
            len(set(self.images)) == len(self.target)


def check_module_hom(h: ModuleHom) -> bool:
    """True iff additive and equivariant along the scalar map."""
    M, N = h.source, h.target
    phi = h.scalar_map
    for a in range(len(M)):
        for b in range(len(M)):
            if h.images[M.add[a][b]] != N.add[h.images[a]][h.images[b]]:
                return False
    for r in range(len(M.ring)):
        pr = phi.images[r]
        for a in range(len(M)):
            if h.images[M.act[r][a]] != N.act[pr][h.images[a]]:
                return False
    return True


@lru_cache(maxsize=None)
def _module_maps_cached(M: FiniteModule, N: FiniteModule,
                        ring_map: RingHom | None):
    ordN = [_additive_order(i, N.add, N.zero) for i in range(len(N))]
    ordM = {g: _additive_order(g, M.add, M.zero) for g in range(len(M))}

    def candidates_for(g):
        return [h for h in range(len(N)) if ordM[g] % ordN[h] == 0]

    images = _additive_maps(len(M), M.add, M.zero, len(N), N.add, N.zero,
                            candidates_for, _HARD_SEARCH_CAP)
    phi = ring_map or RingHom.identity(M.ring)
    keep = []
    for im in images:
        ok = True
        for r in range(len(M.ring)):
            pr = phi.images[r]
            for a in range(len(M)):
                if im[M.act[r][a]] != N.act[pr][im[a]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            keep.append(im)
    return tuple(sorted(keep))


def find_module_homs(M, N, ring_map=None, cap: int = _HARD_SEARCH_CAP):
    """All module homs M -> N (along ring_map if given), sorted."""
    if ring_map is None and M.ring != N.ring:
        raise InvalidParameter("different rings need a ring_map")
    images = _module_maps_cached(M, N, ring_map)
    if len(images) > cap:
        raise SearchCapExceeded(f"more than {cap} module homs")
    return [ModuleHom(M, N, im, ring_map) for im in images]


def find_module_isos(M, N, ring_map=None, cap: int = _HARD_SEARCH_CAP):
    return [h for h in find_module_homs(M, N, ring_map, cap)
            if h.is_bijective()]


@dataclass(frozen=True)
class ModulePresentation:
    """Cokernel data: ring^gens modulo the rows of ``rels``.

    Rows hold ring element indices; use ``from_ids`` for id-level input.
    """

    ring: FiniteRing
    gens: int
    rels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.gens < 0:
            raise InvalidParameter("generator count must be >= 0")
        n = len(self.ring)
        for row in self.rels:
            if len(row) != self.gens:
                raise InvalidParameter("relation row length != gens")
            if any(not (0 <= v < n) for v in row):
                raise InvalidParameter("relation entry out of range")

    @classmethod
    def from_ids(cls, ring, gens, rows):
        return cls(ring, gens,
                   tuple(tuple(ring.idx(v) for v in row) for row in rows))


def _presented_module(P: ModulePresentation, cap):
    """Quotient of ring^gens by the relation submodule.

    Returns (module, coset_of, reps): coset_of maps every encoded tuple to
    its element index, reps are the canonical (lex-least) encoded tuples.
    """
    R, g, n = P.ring, P.gens, len(P.ring)
    if n ** g > cap:
        raise SearchCapExceeded(f"|R|^gens = {n ** g} exceeds cap {cap}")
    scaled = []
    for row in P.rels:
        for s in range(n):
            scaled.append(_kernels.encode_tuple(
                tuple(R.mul[s][v] for v in row), n))
    zero_enc = _kernels.encode_tuple((R.zero,) * g, n)
    sub = _kernels.subgroup_span(g, n, R.add, scaled, zero_enc, cap)
    if sub is None:
        raise SearchCapExceeded("relation submodule exceeds cap")
    part = _kernels.coset_partition(g, n, R.add, sub, cap)
    if part is None:
        raise SearchCapExceeded("coset enumeration exceeds cap")
    reps, coset_of = part
    rep_tuples = [_kernels.decode_tuple(e, n, g) for e in reps]
    elems = tuple("(" + ",".join(R.elems[d] for d in t) + ")"
                  for t in rep_tuples)
    add = []
    for t in rep_tuples:
        enc_rows = []
        for u in rep_tuples:
            enc_rows.append(coset_of[_kernels.encode_tuple(
                tuple(R.add[a][b] for a, b in zip(t, u)), n)])
        add.append(tuple(enc_rows))
    act = []
    for r in range(n):
        act.append(tuple(coset_of[_kernels.encode_tuple(
            tuple(R.mul[r][d] for d in t), n)] for t in rep_tuples))
    module = FiniteModule(R, elems, tuple(add), coset_of[zero_enc], tuple(act))
    return module, coset_of, tuple(rep_tuples)


def module_from_presentation(P: ModulePresentation,
                             cap: int = DEFAULT_TUPLE_CAP) -> FiniteModule:
    """Explicit carrier for a presented module, canonical coset reps."""
    return _presented_module(P, cap)[0]


def _generating_set_with_coords(M: FiniteModule):
    """Greedy minimal generators of M plus coordinates for every element.

    Generators are chosen as the least element not yet in the span; coords
    map each element index to a tuple of ring indices over the generators.
    """
    R = M.ring
    gens = []
    span = {M.zero}
    for i in range(len(M)):
        if i in span:
            continue
        gens.append(i)
        scaled = [M.act[r][i] for r in range(len(R))]
        for s in scaled:
            span = _extend_subgroup(span, s, M.add)
    g = len(gens)
    coords = {M.zero: (R.zero,) * g}
    frontier = [M.zero]
    while frontier:
        nxt = []
        for m in frontier:
            base = coords[m]
            for k, gen in enumerate(gens):
                for r in range(len(R)):
                    m2 = M.add[m][M.act[r][gen]]
                    if m2 not in coords:
                        c = list(base)
                        c[k] = R.add[c[k]][r]
                        coords[m2] = tuple(c)
                        nxt.append(m2)
        frontier = nxt
    return gens, coords


@dataclass(frozen=True)
class BaseChange:
    """Result of tensoring M over R with S along a ring hom R -> S.

    ``module`` is the S-module, ``canonical`` the map m -> m (x) 1,
    ``generators`` the chosen generating elements of M, ``rep_tuples``
    the S-coordinate vector of every carrier element of ``module``.
    """

    module: FiniteModule
    canonical: ModuleHom
    generators: tuple[str, ...]
    phi: RingHom
    source: FiniteModule
    rep_tuples: tuple[tuple[int, ...], ...]


def base_change(M: FiniteModule, phi: RingHom,
                cap: int = DEFAULT_TUPLE_CAP) -> BaseChange:
    """Compute M (x)_R S along phi: R -> S with the canonical map.

    The relation submodule is the kernel of the free cover R^g -> M on a
    greedy generating set, pushed through phi and quotiented out of S^g.
    """
    R, S = M.ring, phi.target
    if phi.source != R:
        raise InvalidParameter("phi must start at the module's ring")
    if not check_hom(phi):
        raise NotAHom("base change needs a ring homomorphism")
    gens, coords = _generating_set_with_coords(M)
    g = len(gens)
    if len(R) ** g > cap or len(S) ** g > cap:
        raise SearchCapExceeded("base change enumeration exceeds cap")
    gen_mult = [[M.act[r][gen] for r in range(len(R))] for gen in gens]
    rows = _kernels.kernel_rows(g, len(R), gen_mult, M.add, M.zero, cap)
    if rows is None:
        raise SearchCapExceeded("free-cover kernel enumeration exceeds cap")
    pushed = [tuple(phi.images[d] for d in _kernels.decode_tuple(e, len(R), g))
              for e in rows]
    pres = ModulePresentation(S, g, tuple(pushed))
    module, coset_of, rep_tuples = _presented_module(pres, cap)
    images = tuple(
        coset_of[_kernels.encode_tuple(
            tuple(phi.images[d] for d in coords[m]), len(S))]
        for m in range(len(M)))
    canonical = ModuleHom(M, module, images, ring_map=phi)
    return BaseChange(module, canonical,
                      tuple(M.elems[i] for i in gens), phi, M, rep_tuples)


def induced_hom(bc: BaseChange, target: FiniteModule, gen_images,
                along: RingHom | None = None) -> ModuleHom:
    """Map out of a base change, fixed by images of the chosen generators.

    gen_images maps generator ids of bc.source to element ids of target;
    the carrier tuple (s_1..s_g) goes to sum_i along(s_i).gen_images[i].
    The caller owns checking the result is a genuine module hom.
    """
    S = bc.module.ring
    psi = along or RingHom.identity(S)
    if psi.source != S or psi.target != target.ring:
        raise InvalidParameter("scalar map endpoints do not match")
    t_idx = [target.idx(gen_images[gid]) for gid in bc.generators]
    out = []
    for rep in bc.rep_tuples:
        acc = target.zero
        for s, t in zip(rep, t_idx):
            acc = target.add[acc][target.act[psi.images[s]][t]]
        out.append(acc)
    return ModuleHom(bc.module, target, tuple(out),
                     ring_map=None if along is None and S == target.ring else psi)


# -- limits over poset shapes (matching families) --

@dataclass(frozen=True)
class ModuleDiagram:
    """Modules over one ring indexed by a poset shape, with comparison maps
    for every non-reflexive comparable pair."""

    shape: FinPoset
    modules: tuple[FiniteModule, ...]
    maps: tuple  # ((p, q), ModuleHom) pairs

    @classmethod
    def build(cls, shape, modules_by_point, maps_by_pair):
        modules = tuple(modules_by_point[p] for p in shape.points)
        maps = tuple(((p, q), maps_by_pair[(p, q)])
                     for p, q in shape.pairs if p != q)
        return cls(shape, modules, maps)

    @cached_property
    def map_of(self):
        return dict(self.maps)


@dataclass(frozen=True)
class RingDiagram:
    shape: FinPoset
    rings: tuple[FiniteRing, ...]
    maps: tuple  # ((p, q), RingHom) pairs

    @classmethod
    def build(cls, shape, rings_by_point, maps_by_pair):
        rings = tuple(rings_by_point[p] for p in shape.points)
        maps = tuple(((p, q), maps_by_pair[(p, q)])
                     for p, q in shape.pairs if p != q)
        return cls(shape, rings, maps)

    @cached_property
    def map_of(self):
        return dict(self.maps)


def _limit_value_tuples(shape, sizes, arr_for, cap):
    """Shared matching-family enumeration over a poset shape."""
    mins = minimal_reps(shape)
    slot = {m: k for k, m in enumerate(mins)}
    min_sizes = [sizes[shape.index[m]] for m in mins]
    per_point = []
    for x in shape.points:
        cons = []
        for m in mins:
            if shape.le(m, x):
                if m == x:
                    cons.append((slot[m], tuple(range(sizes[shape.index[x]]))))
                else:
                    cons.append((slot[m], arr_for(m, x)))
        per_point.append(cons)
    res = _kernels.matching_tuples(min_sizes, per_point, cap)
    if res is None:
        raise SearchCapExceeded("matching-family enumeration exceeds cap")
    return res


def _check_module_diagram(D: ModuleDiagram):
    at = {p: D.modules[i] for i, p in enumerate(D.shape.points)}
    for (p, q), h in D.maps:
        if h.source != at[p] or h.target != at[q]:
            raise NonCommutingDiagram(f"map at ({p},{q}) has wrong endpoints")
        if h.ring_map is not None:
            raise NonCommutingDiagram("diagram maps must stay over one ring")
        if not check_module_hom(h):
            raise NonCommutingDiagram(f"map at ({p},{q}) is not a module hom")
    for p, q in D.shape.pairs:
        for r in D.shape.points:
            if p != q and q != r and D.shape.le(q, r):
                lhs = D.map_of[(p, q)].then(D.map_of[(q, r)])
                rhs = ModuleHom.identity(at[p]) if p == r else D.map_of[(p, r)]
                if lhs.images != rhs.images:
                    raise NonCommutingDiagram(
                        f"diagram does not commute along {p}<={q}<={r}")


def limit_of_diagram(D: ModuleDiagram, cap: int = DEFAULT_TUPLE_CAP) -> FiniteModule:
    """Module of matching families of a commuting diagram of modules."""
    if not D.modules:
        raise InvalidParameter("empty diagram has no ring to live over")
    ring = D.modules[0].ring
    if any(M.ring != ring for M in D.modules):
        raise InvalidParameter("diagram modules must share one ring")
    _check_module_diagram(D)
    sizes = [len(M) for M in D.modules]
    arr_for = lambda m, x: D.map_of[(m, x)].images
    tuples = _limit_value_tuples(D.shape, sizes, arr_for, cap)
    pos = {t: k for k, t in enumerate(tuples)}
    elems = tuple("(" + ",".join(D.modules[i].elems[v]
                                 for i, v in enumerate(t)) + ")"
                  for t in tuples)
    add = tuple(tuple(pos[tuple(D.modules[i].add[a][b]
                                for i, (a, b) in enumerate(zip(t, u)))]
                      for u in tuples) for t in tuples)
    zero = pos[tuple(M.zero for M in D.modules)]
    act = tuple(tuple(pos[tuple(D.modules[i].act[r][v]
                                for i, v in enumerate(t))]
                      for t in tuples) for r in range(len(ring)))
    return FiniteModule(ring, elems, add, zero, act)


def limit_of_ring_diagram(D: RingDiagram, cap: int = DEFAULT_TUPLE_CAP) -> FiniteRing:
    """Ring of matching families of a commuting diagram of rings."""
    at = {p: D.rings[i] for i, p in enumerate(D.shape.points)}
    for (p, q), h in D.maps:
        if h.source != at[p] or h.target != at[q]:
            raise NonCommutingDiagram(f"map at ({p},{q}) has wrong endpoints")
        if not check_hom(h):
            raise NonCommutingDiagram(f"map at ({p},{q}) is not a ring hom")
    for p, q in D.shape.pairs:
        for r in D.shape.points:
            if p != q and q != r and D.shape.le(q, r):
                lhs = D.map_of[(p, q)].then(D.map_of[(q, r)])
                rhs = RingHom.identity(at[p]) if p == r else D.map_of[(p, r)]
                if lhs.images != rhs.images:
                    raise NonCommutingDiagram(
                        f"diagram does not commute along {p}<={q}<={r}")
    sizes = [len(R) for R in D.rings]
    arr_for = lambda m, x: D.map_of[(m, x)].images
    tuples = _limit_value_tuples(D.shape, sizes, arr_for, cap)
    pos = {t: k for k, t in enumerate(tuples)}
    elems = tuple("(" + ",".join(D.rings[i].elems[v]
                                 for i, v in enumerate(t)) + ")"
                  for t in tuples)
    add = tuple(tuple(pos[tuple(D.rings[i].add[a][b]
                                for i, (a, b) in enumerate(zip(t, u)))]
                      for u in tuples) for t in tuples)
    mul = tuple(tuple(pos[tuple(D.rings[i].mul[a][b]
                                for i, (a, b) in enumerate(zip(t, u)))]
                      for u in tuples) for t in tuples)
    zero = pos[tuple(R.zero for R in D.rings)]
    one = pos[tuple(R.one for R in D.rings)]
    return FiniteRing(elems, add, mul, zero, one)
