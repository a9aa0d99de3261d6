"""Pure-Python enumeration kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and the same deterministic output order.  All kernels work on
int-indexed tables; id <-> index translation stays in the calling modules.

Convention: kernels that enumerate return ``None`` when the work or result
size would exceed ``cap``; callers translate that into SearchCapExceeded.

Tuples over a carrier of size ``n`` are encoded big-endian as integers
(first component most significant) so that integer order equals
lexicographic order on tuples.
"""

from itertools import product

BACKEND = "pure"


def encode_tuple(t, n):
    e = 0
    for d in t:
        e = e * n + d
    return e


def decode_tuple(e, n, g):
    out = [0] * g
    for i in range(g - 1, -1, -1):
        out[i] = e % n
        e //= n
    return tuple(out)


def transitive_closure(n, pairs):
    """Reflexive-transitive closure of a relation on range(n).

    Returns a set of (i, j) index pairs.  Plain Warshall; poset sizes here
    are two digits at most.
    """
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for i, j in pairs:
        reach[i][j] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return {(i, j) for i in range(n) for j in range(n) if reach[i][j]}


def ring_axiom_violation(n, add, mul, zero, one):
    """First broken commutative-unital-ring axiom, or None.

    Returns (code, *indices); codes: 'add-comm', 'add-assoc', 'add-zero',
    'add-inverse', 'mul-comm', 'mul-assoc', 'mul-one', 'distrib'.
    """
    rng = range(n)
    for a in rng:
        if add[zero][a] != a:
            return ("add-zero", a)
        if mul[one][a] != a:
            return ("mul-one", a)
        if all(add[a][b] != zero for b in rng):
            return ("add-inverse", a)
    for a in rng:
        for b in rng:
            if add[a][b] != add[b][a]:
                return ("add-comm", a, b)
            if mul[a][b] != mul[b][a]:
                return ("mul-comm", a, b)
    for a in rng:
        for b in rng:
            for c in rng:
                if add[add[a][b]][c] != add[a][add[b][c]]:
                    return ("add-assoc", a, b, c)
                if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    return ("mul-assoc", a, b, c)
                if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                    return ("distrib", a, b, c)
    return None


def module_axiom_violation(nr, nm, radd, rmul, rone, madd, mzero, act):
    """First broken module axiom, or None.

    act[r][m] is the index of r.m; the abelian-group laws of (madd, mzero)
    are checked too.
    """
    rngr = range(nr)
    rngm = range(nm)
    for a in rngm:
        if madd[mzero][a] != a:
            return ("add-zero", a)
        if all(madd[a][b] != mzero for b in rngm):
            return ("add-inverse", a)
        if act[rone][a] != a:
            return ("act-one", a)
    for a in rngm:
        for b in rngm:
            if madd[a][b] != madd[b][a]:
                return ("add-comm", a, b)
    for a in rngm:
        for b in rngm:
            for c in rngm:
                if madd[madd[a][b]][c] != madd[a][madd[b][c]]:
                    return ("add-assoc", a, b, c)
    for r in rngr:
        for a in rngm:
            for b in rngm:
                if act[r][madd[a][b]] != madd[act[r][a]][act[r][b]]:
                    return ("act-distrib-module", r, a, b)
    for r in rngr:
        for s in rngr:
            for a in rngm:
                if act[radd[r][s]][a] != madd[act[r][a]][act[s][a]]:
                    return ("act-distrib-ring", r, s, a)
                if act[rmul[r][s]][a] != act[r][act[s][a]]:
                    return ("act-assoc", r, s, a)
    return None


def hom_violation(n_src, hmap, sadd, smul, tadd, tmul, t_one, s_one):
    """First failure of a map to be a unital ring hom, or None."""
    if hmap[s_one] != t_one:
        return ("one",)
    rng = range(n_src)
    for a in rng:
        for b in rng:
            if hmap[sadd[a][b]] != tadd[hmap[a]][hmap[b]]:
                return ("add", a, b)
            if hmap[smul[a][b]] != tmul[hmap[a]][hmap[b]]:
                return ("mul", a, b)
    return None


def enumerate_monotone(nx, ny, x_pairs, y_leq, cap):
    """All order-preserving maps range(nx) -> range(ny), lexicographic.

    x_pairs lists the non-reflexive comparabilities (i, j) with i <= j in
    the source; y_leq is the target's full boolean matrix.  Returns a list
    of image tuples, or None once more than cap maps are found.
    """
    earlier = [[] for _ in range(nx)]  # (pos, forward) constraints vs assigned
    for i, j in x_pairs:
        if i == j:
            continue
        if j < i:
            earlier[i].append((j, False))  # x_j <= x_i with j assigned first
        else:
            earlier[j].append((i, True))   # x_i <= x_j
    results = []
    assign = [0] * nx

    def backtrack(k):
        if k == nx:
            results.append(tuple(assign))
            return len(results) <= cap
        for img in range(ny):
            ok = True
            for pos, forward in earlier[k]:
                other = assign[pos]
                if forward:
                    if not y_leq[other][img]:
                        ok = False
                        break
                elif not y_leq[img][other]:
                    ok = False
                    break
            if ok:
                assign[k] = img
                if not backtrack(k + 1):
                    return False
        return True

    if nx == 0:
        return [()]
    if not backtrack(0):
        return None
    return results


def subgroup_span(g, n, add, gens, zero_enc, cap):
    """Additive closure of encoded g-tuples under a component add table.

    Returns a sorted list of encoded elements, or None when the span
    exceeds cap.  Generators are added one at a time; each extends the
    current subgroup by whole cosets, so every element is produced once.
    """
    def add_enc(a, b):
        e = 0
        for i in range(g - 1, -1, -1):
            e += add[a % n][b % n] * n ** (g - 1 - i)
            a //= n
            b //= n
        return e

    span = {zero_enc}
    for gen in gens:
        if gen in span:
            continue
        shifts = []
        cur = gen
        while cur not in span:
            shifts.append(cur)
            cur = add_enc(cur, gen)
        base = list(span)
        for s in shifts:
            for x in base:
                span.add(add_enc(x, s))
        if len(span) > cap:
            return None
    return sorted(span)


def coset_partition(g, n, add, subgroup, cap):
    """Partition all encoded g-tuples into cosets of an encoded subgroup.

    Returns (reps, coset_of): reps[i] is the lexicographically least member
    of coset i, coset_of[enc] the coset index of every tuple.  None when
    n**g exceeds cap.
    """
    size = n ** g
    if size > cap:
        return None

    def add_enc(a, b):
        e = 0
        for i in range(g - 1, -1, -1):
            e += add[a % n][b % n] * n ** (g - 1 - i)
            a //= n
            b //= n
        return e

    coset_of = [-1] * size
    reps = []
    for enc in range(size):
        if coset_of[enc] >= 0:
            continue
        idx = len(reps)
        reps.append(enc)
        for s in subgroup:
            coset_of[add_enc(enc, s)] = idx
    return reps, coset_of


def kernel_rows(g, n_ring, gen_mult, madd, mzero, cap):
    """Encoded ring tuples (r_0..r_{g-1}) with sum_i r_i.m_i = 0.

    gen_mult[i][r] is the module index of r.m_i.  Enumerates all n_ring**g
    tuples (None above cap); output is ascending = lexicographic.
    """
    if n_ring ** g > cap:
        return None
    rows = []
    t = [0] * g

    def rec(i, acc, enc):
        if i == g:
            if acc == mzero:
                rows.append(enc)
            return
        gm = gen_mult[i]
        for r in range(n_ring):
            rec(i + 1, madd[acc][gm[r]], enc * n_ring + r)

    rec(0, mzero, 0)
    return rows


def matching_tuples(min_sizes, per_point, cap):
    """Tuples over all points consistent with propagation from minimal ones.

    per_point[j] is a nonempty list of (slot, arr) pairs: candidate value
    of point j is arr[assignment[slot]] and all pairs must agree.  Returns
    accepted full value tuples in lexicographic assignment order, or None
    when the assignment space exceeds cap.
    """
    total = 1
    for s in min_sizes:
        total *= s
    if total > cap:
        return None
    results = []
    for assign in product(*[range(s) for s in min_sizes]):
        vals = []
        ok = True
        for constraints in per_point:
            slot0, arr0 = constraints[0]
            v = arr0[assign[slot0]]
            for slot, arr in constraints[1:]:
                if arr[assign[slot]] != v:
                    ok = False
                    break
            if not ok:
                break
            vals.append(v)
        if ok:
            results.append(tuple(vals))
    return results
