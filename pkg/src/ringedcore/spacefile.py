"""JSON interchange format for ringed spaces, sheaves, morphisms, covers.

A space file gives points, order generators, a ring literal per point and
restriction maps on the generator pairs; composites are synthesized and
path-inconsistency surfaces as a validation violation, never silently.
Maps may be given as full element dicts, as [src, tgt] generator pairs
(completed additively), or the shorthands "id" and "zero".
"""

import json
import re

from .cover import CoverSpec
from .errors import ParseError, UnknownSheaf
from .finalg import (FiniteModule, FiniteRing, ModuleHom, ModulePresentation,
                     RingHom, module_from_presentation, module_from_ring,
                     module_from_tables, module_zero, ring_from_tables,
                     ring_product, ring_zmod)
from .finposet import FinPoset, generating_edges
from .rspace import ModuleSheaf, RingedSpace, SpaceMorphism

_ZMOD_RE = re.compile(r"^Z/(\d+)$")


def _parse_ring_literal(lit, where):
    if isinstance(lit, str):
        m = _ZMOD_RE.match(lit)
        if not m:
            raise ParseError(f"{where}: unknown ring literal {lit!r}")
        return ring_zmod(int(m.group(1)))
    if isinstance(lit, dict) and "product" in lit:
        factors = [_parse_ring_literal(f, where) for f in lit["product"]]
        if not factors:
            raise ParseError(f"{where}: empty ring product")
        out = factors[0]
        for f in factors[1:]:
            out = ring_product(out, f)
        return out
    if isinstance(lit, dict) and {"elems", "add", "mul"} <= set(lit):
        try:
            return ring_from_tables(lit["elems"], lit["add"], lit["mul"],
                                    lit["zero"], lit["one"],
                                    name=lit.get("label"))
        except KeyError as exc:
            raise ParseError(f"{where}: ring literal missing {exc}")
    raise ParseError(f"{where}: unintelligible ring literal")


def _complete_additive(src_elems, src_add, src_zero, src_index,
                       tgt_elems, tgt_add, tgt_zero, tgt_index,
                       pairs, where):
    """Extend (src, tgt) id pairs to a total additive map, or fail."""
    known = {src_zero: tgt_zero}
    for a, b in pairs:
        try:
            ia, ib = src_index[a], tgt_index[b]
        except KeyError as exc:
            raise ParseError(f"{where}: unknown element {exc}")
        if known.get(ia, ib) != ib:
            raise ParseError(f"{where}: conflicting images for {a!r}")
        known[ia] = ib
    changed = True
    while changed:
        changed = False
        for a1, b1 in list(known.items()):
            for a2, b2 in list(known.items()):
                a3 = src_add[a1][a2]
                b3 = tgt_add[b1][b2]
                if a3 not in known:
                    known[a3] = b3
                    changed = True
                elif known[a3] != b3:
                    raise ParseError(
                        f"{where}: generator images are additively "
                        f"inconsistent at {src_elems[a3]!r}")
    if len(known) != len(src_elems):
        missing = [e for i, e in enumerate(src_elems) if i not in known]
        raise ParseError(f"{where}: map does not determine {missing}")
    return tuple(known[i] for i in range(len(src_elems)))


def _parse_map_images(lit, src_elems, src_add, src_zero,
                      tgt_elems, tgt_add, tgt_zero, where):
    src_index = {e: i for i, e in enumerate(src_elems)}
    tgt_index = {e: i for i, e in enumerate(tgt_elems)}
    if lit == "id":
        try:
            return tuple(tgt_index[e] for e in src_elems)
        except KeyError as exc:
            raise ParseError(f"{where}: 'id' needs matching carriers ({exc})")
    if lit == "zero":
        return tuple(tgt_zero for _ in src_elems)
    if isinstance(lit, dict):
        pairs = list(lit.items())
    elif isinstance(lit, list):
        pairs = [tuple(p) for p in lit]
    else:
        raise ParseError(f"{where}: unintelligible map literal")
    return _complete_additive(src_elems, src_add, src_zero, src_index,
                              tgt_elems, tgt_add, tgt_zero, tgt_index,
                              pairs, where)


def _synthesize(provided, where):
    """Close a keyed family of homs under composition (first write wins)."""
    derived = dict(provided)
    changed = True
    while changed:
        changed = False
        for (p, q) in sorted(provided):
            for (a, b) in sorted(derived):
                if b == p and a != q and (a, q) not in derived:
                    derived[(a, q)] = derived[(a, b)].then(provided[(p, q)])
                    changed = True
    return derived


def _split_pair_key(key, where):
    if key.count("<") != 1:
        raise ParseError(f"{where}: pair key {key!r} is not 'p<q'")
    p, q = key.split("<")
    return p, q


def _build_space(obj, where):
    try:
        points = obj["points"]
        order = obj["order"]
        rings_lit = obj["rings"]
    except KeyError as exc:
        raise ParseError(f"{where}: missing section {exc}")
    except TypeError:
        raise ParseError(f"{where}: space description must be an object")
    try:
        poset = FinPoset.from_pairs(points, [tuple(p) for p in order])
    except Exception as exc:
        raise ParseError(f"{where}: bad points/order: {exc}")
    rings = {}
    for p in poset.points:
        if p not in rings_lit:
            raise ParseError(f"{where}: no ring given for point {p!r}")
        rings[p] = _parse_ring_literal(rings_lit[p], f"{where}/rings/{p}")
    provided = {}
    for key, lit in obj.get("restrictions", {}).items():
        p, q = _split_pair_key(key, where)
        if p not in poset.index or q not in poset.index:
            raise ParseError(f"{where}: restriction {key!r} names unknown points")
        if not poset.le(p, q) or p == q:
            raise ParseError(f"{where}: restriction {key!r} is not a strict "
                             "comparable pair")
        A, B = rings[p], rings[q]
        images = _parse_map_images(lit, A.elems, A.add, A.zero,
                                   B.elems, B.add, B.zero,
                                   f"{where}/restrictions/{key}")
        provided[(p, q)] = RingHom(A, B, images)
    derived = _synthesize(provided, where)
    res = tuple(((p, q), h) for (p, q), h in sorted(derived.items())
                if poset.le(p, q) and p != q)
    return RingedSpace(poset, tuple(rings[p] for p in poset.points), res)


def _parse_module_literal(lit, ring, where):
    if lit == "structure":
        return module_from_ring(ring)
    if lit == "zero":
        return module_zero(ring)
    if isinstance(lit, dict) and "zmod" in lit:
        m = lit["zmod"]
        zm = _ZMOD_RE.match(ring.name or "")
        if not zm or int(zm.group(1)) % m != 0:
            raise ParseError(f"{where}: zmod stalk needs a Z/n ring with "
                             f"{m} dividing n")
        elems = tuple(str(i) for i in range(m))
        add = tuple(tuple((i + j) % m for j in range(m)) for i in range(m))
        act = tuple(tuple((int(ring.elems[r]) * j) % m for j in range(m))
                    for r in range(len(ring)))
        return FiniteModule(ring, elems, add, 0, act)
    if isinstance(lit, dict) and "presentation" in lit:
        pres = lit["presentation"]
        try:
            P = ModulePresentation.from_ids(ring, pres["gens"],
                                            [tuple(r) for r in pres.get("rels", [])])
        except KeyError as exc:
            raise ParseError(f"{where}: presentation missing {exc}")
        return module_from_presentation(P)
    if isinstance(lit, dict) and {"elems", "add", "act"} <= set(lit):
        try:
            return module_from_tables(ring, lit["elems"], lit["add"],
                                      lit["zero"], lit["act"])
        except KeyError as exc:
            raise ParseError(f"{where}: module literal missing {exc}")
    raise ParseError(f"{where}: unintelligible module literal")


def _build_sheaf(obj, space, where):
    stalks = {}
    stalk_lits = obj.get("stalks", {})
    for p in space.poset.points:
        if p not in stalk_lits:
            raise ParseError(f"{where}: no stalk given for point {p!r}")
        stalks[p] = _parse_module_literal(stalk_lits[p], space.ring_at(p),
                                          f"{where}/stalks/{p}")
    provided = {}
    for key, lit in obj.get("comaps", {}).items():
        p, q = _split_pair_key(key, where)
        if not space.poset.le(p, q) or p == q:
            raise ParseError(f"{where}: comap {key!r} is not a strict "
                             "comparable pair")
        M, N = stalks[p], stalks[q]
        images = _parse_map_images(lit, M.elems, M.add, M.zero,
                                   N.elems, N.add, N.zero,
                                   f"{where}/comaps/{key}")
        provided[(p, q)] = ModuleHom(M, N, images,
                                     ring_map=space.res_at(p, q))
    derived = _synthesize(provided, where)
    comaps = tuple(((p, q), h) for (p, q), h in sorted(derived.items())
                   if space.poset.le(p, q) and p != q)
    return ModuleSheaf(space, tuple(stalks[p] for p in space.poset.points),
                       comaps)


class ParsedFile:
    """Everything a space file describes, fully constructed."""

    def __init__(self, main, spaces, sheaves, morphisms, morphism_spaces,
                 covers):
        self.main = main
        self.spaces = spaces            # name -> RingedSpace (incl. "main")
        self.sheaves = sheaves          # space name -> {sheaf name -> sheaf}
        self.morphisms = morphisms      # name -> SpaceMorphism
        self.morphism_spaces = morphism_spaces  # name -> (src name, tgt name)
        self.covers = covers            # name -> CoverSpec (on main)

    def sheaf_on(self, space_name, sheaf_name):
        try:
            return self.sheaves[space_name][sheaf_name]
        except KeyError:
            raise UnknownSheaf(
                f"no sheaf {sheaf_name!r} on space {space_name!r}")


def parse_obj(obj, where="input"):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: top level must be an object")
    main = _build_space(obj, where)
    spaces = {"main": main}
    sheaves = {"main": {}}
    for name, sub in obj.get("spaces", {}).items():
        spaces[name] = _build_space(sub, f"{where}/spaces/{name}")
        sheaves[name] = {}
        for sname, slit in sub.get("sheaves", {}).items():
            sheaves[name][sname] = _build_sheaf(
                slit, spaces[name], f"{where}/spaces/{name}/sheaves/{sname}")
    for sname, slit in obj.get("sheaves", {}).items():
        sheaves["main"][sname] = _build_sheaf(slit, main,
                                              f"{where}/sheaves/{sname}")
    morphisms = {}
    morphism_spaces = {}
    for name, mlit in obj.get("morphisms", {}).items():
        w = f"{where}/morphisms/{name}"
        src_name = mlit.get("source", "main")
        tgt_name = mlit.get("target", "main")
        if src_name not in spaces or tgt_name not in spaces:
            raise ParseError(f"{w}: unknown source/target space")
        src, tgt = spaces[src_name], spaces[tgt_name]
        morphism_spaces[name] = (src_name, tgt_name)
        mapping = mlit.get("map")
        if not isinstance(mapping, dict):
            raise ParseError(f"{w}: missing point map")
        comorphs = {}
        for p in src.poset.points:
            if p not in mapping:
                raise ParseError(f"{w}: point map misses {p!r}")
            fp = mapping[p]
            if fp not in tgt.poset.index:
                raise ParseError(f"{w}: image {fp!r} not in target")
            lit = mlit.get("comorphisms", {}).get(p, "id")
            A = tgt.ring_at(fp)
            B = src.ring_at(p)
            images = _parse_map_images(lit, A.elems, A.add, A.zero,
                                       B.elems, B.add, B.zero,
                                       f"{w}/comorphisms/{p}")
            comorphs[p] = RingHom(A, B, images)
        morphisms[name] = SpaceMorphism.build(src, tgt, mapping, comorphs)
    covers = {}
    for name, clit in obj.get("covers", {}).items():
        w = f"{where}/covers/{name}"
        if not isinstance(clit, dict) or not clit:
            raise ParseError(f"{w}: cover must map member names to point lists")
        for member, pts in clit.items():
            for p in pts:
                if p not in main.poset.index:
                    raise ParseError(f"{w}: member {member!r} names unknown "
                                     f"point {p!r}")
        covers[name] = CoverSpec.build(main, {m: tuple(v)
                                              for m, v in clit.items()})
    return ParsedFile(main, spaces, sheaves, morphisms, morphism_spaces,
                      covers)


def parse_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: "
                         f"{exc.msg}")
    return parse_obj(obj, where=str(path))


# -- serialization --

def ring_to_json(R: FiniteRing):
    out = {
        "elems": list(R.elems),
        "add": [[R.elems[v] for v in row] for row in R.add],
        "mul": [[R.elems[v] for v in row] for row in R.mul],
        "zero": R.elems[R.zero],
        "one": R.elems[R.one],
    }
    if R.name:
        out["label"] = R.name
    return out


def module_to_json(M: FiniteModule):
    return {
        "elems": list(M.elems),
        "add": [[M.elems[v] for v in row] for row in M.add],
        "zero": M.elems[M.zero],
        "act": {r: [M.elems[v] for v in M.act[i]]
                for i, r in enumerate(M.ring.elems)},
    }


def space_to_json(X: RingedSpace):
    edges = generating_edges(X.poset)
    return {
        "points": list(X.poset.points),
        "order": [[p, q] for p, q in edges],
        "rings": {p: ring_to_json(X.ring_at(p)) for p in X.poset.points},
        "restrictions": {f"{p}<{q}": X.res_at(p, q).as_dict()
                         for p, q in edges},
    }


def sheaf_to_json(M: ModuleSheaf):
    edges = generating_edges(M.space.poset)
    return {
        "stalks": {p: module_to_json(M.stalk(p))
                   for p in M.space.poset.points},
        "comaps": {f"{p}<{q}": M.comap_at(p, q).as_dict() for p, q in edges},
    }


def morphism_to_json(phi: SpaceMorphism):
    return {
        "map": phi.point_map.as_dict(),
        "comorphisms": {p: phi.comorph_at(p).as_dict()
                        for p in phi.source.poset.points},
    }
