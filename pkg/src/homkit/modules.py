"""Finitely presented modules over Z or Z/n and their homomorphisms.

A module is stored in canonical invariant-factor form: a tuple of factors
d1 | d2 | ... with di > 1 (or di == 0 for a free Z summand), the module being
the direct sum of R/(di).  Maps are matrices on the canonical generators,
column j giving the image of source generator j.  Kernels, images, cokernels,
pushouts, Hom and Ext groups, and injective hulls over Z/n are all computed
through exact integer normal forms, so every answer is certified rather than
approximate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterator, Optional, Sequence

from .exactalg import (
    CongruenceSystem,
    IntMatrix,
    RingSpec,
    _snf_full,
    integer_kernel,
)


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class FpModule:
    """A finitely presented module in canonical invariant-factor form."""

    ring: RingSpec
    factors: tuple

    def __post_init__(self) -> None:
        n = self.ring.modulus
        prev = None
        for d in self.factors:
            if d == 1 or d < 0:
                raise ModuleError(f"invalid invariant factor {d}")
            if n:
                if d == 0 or n % d != 0:
                    raise ModuleError(f"factor {d} does not divide the modulus {n}")
            if prev is not None:
                if prev == 0 and d != 0:
                    raise ModuleError("zero factors must come last")
                if prev != 0 and d != 0 and d % prev != 0:
                    raise ModuleError(f"divisibility chain broken: {prev} does not divide {d}")
            prev = d

    @staticmethod
    def zero(ring: RingSpec) -> "FpModule":
        return FpModule(ring, ())

    @staticmethod
    def free(ring: RingSpec, rank: int) -> "FpModule":
        f = ring.modulus if ring.is_modular else 0
        return FpModule(ring, tuple(f for _ in range(rank)))

    @staticmethod
    def cyclic(ring: RingSpec, d: int) -> "FpModule":
        return FpModule(ring, (d,)) if d != 1 else FpModule(ring, ())

    @property
    def ngens(self) -> int:
        return len(self.factors)

    def is_zero(self) -> bool:
        return not self.factors

    def is_free(self) -> bool:
        unit = self.ring.modulus if self.ring.is_modular else 0
        return all(d == unit for d in self.factors)

    def size(self) -> Optional[int]:
        """Number of elements, or None for an infinite module over Z."""
        total = 1
        for d in self.factors:
            if d == 0:
                return None
            total *= d
        return total

    def elements(self) -> Iterator[tuple]:
        if self.size() is None:
            raise ModuleError("cannot enumerate an infinite module")
        yield from iproduct(*(range(d) for d in self.factors))

    def reduce_element(self, vec: Sequence[int]) -> tuple:
        return tuple(x % d if d else x for x, d in zip(vec, self.factors))

    def relation_lattice(self) -> IntMatrix:
        """Columns generating the defining relation lattice in Z^ngens."""
        cols = []
        for i, d in enumerate(self.factors):
            if d != 0:
                cols.append([d if i == j else 0 for j in range(self.ngens)])
        return IntMatrix.from_columns(cols, rows=self.ngens)

    def describe(self) -> str:
        if not self.factors:
            return "0"
        parts = []
        for d in self.factors:
            parts.append("Z" if d == 0 else f"Z/{d}")
        return " + ".join(parts)


@dataclass(frozen=True)
class ModuleMap:
    """Homomorphism between canonical modules, as a matrix on generators.

    Column j holds the image of source generator j in target coordinates.
    Well-definedness (dj * column_j dies in the target) is checked on
    construction and entries are reduced mod the target factors, so equal
    maps compare equal structurally.
    """

    source: FpModule
    target: FpModule
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if self.source.ring != self.target.ring:
            raise ModuleError("source and target live over different rings")
        if (self.matrix.rows, self.matrix.cols) != (self.target.ngens, self.source.ngens):
            raise ModuleError(
                f"matrix shape {self.matrix.rows}x{self.matrix.cols} does not match "
                f"{self.target.ngens}x{self.source.ngens}")
        reduced = []
        for i, di in enumerate(self.target.factors):
            row = self.matrix.entries[i]
            reduced.append(tuple(x % di if di else x for x in row))
        red = IntMatrix(self.matrix.rows, self.matrix.cols, tuple(reduced))
        for j, dj in enumerate(self.source.factors):
            for i, di in enumerate(self.target.factors):
                v = dj * red.entries[i][j]
                if (v % di if di else v) != 0:
                    raise ModuleError(
                        f"not well defined: factor {dj} times column {j} survives in the target")
        object.__setattr__(self, "matrix", red)

    @staticmethod
    def identity(m: FpModule) -> "ModuleMap":
        return ModuleMap(m, m, IntMatrix.identity(m.ngens))

    @staticmethod
    def zero(source: FpModule, target: FpModule) -> "ModuleMap":
        return ModuleMap(source, target, IntMatrix.zero(target.ngens, source.ngens))

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.target != self.source:
            raise ModuleError("composition mismatch")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        if (self.source, self.target) != (other.source, other.target):
            raise ModuleError("cannot add maps with different endpoints")
        return ModuleMap(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return self + (-other)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix)

    def apply(self, vec: Sequence[int]) -> tuple:
        out = [sum(self.matrix.entries[i][j] * vec[j] for j in range(self.source.ngens))
               for i in range(self.target.ngens)]
        return self.target.reduce_element(out)

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def is_mono(self) -> bool:
        if self.source.size() is not None and self.source.size() <= 4096:
            zero = self.target.reduce_element([0] * self.target.ngens)
            return sum(1 for x in self.source.elements() if self.apply(x) == zero) == 1
        return kernel(self).sub.is_zero()

    def is_epi(self) -> bool:
        return cokernel(self)[0].is_zero()


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """Canonicalized presentation: module plus change-of-basis matrices.

    ``to_canonical`` maps old generator coordinates to canonical ones,
    ``from_canonical`` lifts canonical generators back; the two compose to
    the identity up to the defining relations.
    """

    module: FpModule
    to_canonical: IntMatrix
    from_canonical: IntMatrix


def normalize_presentation(ring: RingSpec, ngens: int, relations: IntMatrix) -> Presentation:
    """Canonical invariant-factor form of Z^ngens (or (Z/n)^ngens) modulo
    the column span of ``relations``."""
    if relations.rows != ngens:
        raise ModuleError("relation matrix must have one row per generator")
    rel = relations
    if ring.is_modular:
        rel = rel.hstack(IntMatrix.identity(ngens).scale(ring.modulus))
    u, d, v, ui, vi = _snf_full(rel)
    diag = [d.entries[i][i] if i < min(d.rows, d.cols) else 0 for i in range(ngens)]
    keep = [i for i, x in enumerate(diag) if x != 1]
    factors = tuple(diag[i] for i in keep)
    module = FpModule(ring, factors)
    to_can = IntMatrix.from_rows([u.entries[i] for i in keep], cols=ngens)
    from_can = IntMatrix.from_columns([ui.col(i) for i in keep], rows=ngens)
    if ring.is_modular:
        to_can = to_can.reduce_mod(ring.modulus)
        from_can = from_can.reduce_mod(ring.modulus)
    return Presentation(module, to_can, from_can)


def _solve_in_module(target: FpModule, mat: IntMatrix, rhs: IntMatrix):
    """Solve mat @ x = rhs where each row i is a congruence mod target factor i.

    Returns a particular solution matrix (columns aligned with rhs) or None.
    """
    ring = target.ring
    cols_out = []
    for jc in range(rhs.cols):
        sys = CongruenceSystem(ring, mat.cols)
        for i, di in enumerate(target.factors):
            modulus = di if di else (ring.modulus if ring.is_modular else 0)
            coeffs = {j: mat.entries[i][j] for j in range(mat.cols) if mat.entries[i][j]}
            sys.add(coeffs, rhs.entries[i][jc], modulus)
        part, _ = sys.solve()
        if part is None:
            return None
        cols_out.append(part)
    return IntMatrix.from_columns(cols_out, rows=mat.cols)


@dataclass(frozen=True)
class SubquotientWitness:
    """A submodule presented inside an ambient module, with exactness data."""

    ambient: FpModule
    sub: FpModule
    inclusion: ModuleMap      # sub -> ambient, mono
    quotient: FpModule
    quotient_map: ModuleMap   # ambient -> quotient, epi


def _sublattice_module(ambient: FpModule, gen_cols: IntMatrix) -> tuple:
    """Canonical form of the submodule of ``ambient`` generated by the given
    generator columns; returns (module, inclusion matrix)."""
    g = ambient.ngens
    lam = ambient.relation_lattice()
    combined = gen_cols.hstack(lam)
    rel_y = []
    if gen_cols.cols:
        for col in integer_kernel(combined):
            rel_y.append(list(col[: gen_cols.cols]))
    rels = IntMatrix.from_columns(rel_y, rows=gen_cols.cols)
    pres = normalize_presentation(ambient.ring, gen_cols.cols, rels)
    incl = gen_cols @ pres.from_canonical
    return pres.module, incl


def submodule_witness(ambient: FpModule, gen_cols: IntMatrix) -> SubquotientWitness:
    sub, incl_mat = _sublattice_module(ambient, gen_cols)
    inclusion = ModuleMap(sub, ambient, incl_mat)
    quot, qmap = cokernel(inclusion)
    return SubquotientWitness(ambient, sub, inclusion, quot, qmap)


def kernel(f: ModuleMap) -> SubquotientWitness:
    """Kernel of f as a certified submodule of the source."""
    lam_t = f.target.relation_lattice()
    combined = f.matrix.hstack(lam_t)
    gens = [list(col[: f.source.ngens]) for col in integer_kernel(combined)]
    gen_cols = IntMatrix.from_columns(gens, rows=f.source.ngens)
    return submodule_witness(f.source, gen_cols)


def image(f: ModuleMap) -> SubquotientWitness:
    """Image of f as a certified submodule of the target."""
    return submodule_witness(f.target, f.matrix)


def cokernel(f: ModuleMap) -> tuple:
    """Cokernel of f: returns (module, projection epi)."""
    rels = f.matrix.hstack(f.target.relation_lattice())
    pres = normalize_presentation(f.target.ring, f.target.ngens, rels)
    proj = ModuleMap(f.target, pres.module, pres.to_canonical)
    return pres.module, proj


def cokernel_with_section(f: ModuleMap) -> tuple:
    """Cokernel plus a generator-wise set-section of the projection."""
    rels = f.matrix.hstack(f.target.relation_lattice())
    pres = normalize_presentation(f.target.ring, f.target.ngens, rels)
    proj = ModuleMap(f.target, pres.module, pres.to_canonical)
    return pres.module, proj, pres.from_canonical


# ---------------------------------------------------------------------------
# Direct sums and pushouts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectSum:
    module: FpModule
    injections: tuple
    projections: tuple


def direct_sum(ms: Sequence[FpModule]) -> DirectSum:
    """Canonical direct sum with injections and projections.

    The concatenated factor list is renormalized, so the result is always in
    invariant-factor form (e.g. Z/2 + Z/3 over Z becomes Z/6).
    """
    if not ms:
        raise ModuleError("direct_sum needs the ring; pass at least the zero module")
    ring = ms[0].ring
    if any(m.ring != ring for m in ms):
        raise ModuleError("mixed rings in direct sum")
    total = sum(m.ngens for m in ms)
    cols = []
    offset = 0
    rel_cols = []
    for m in ms:
        for i, d in enumerate(m.factors):
            if d != 0:
                rel_cols.append([d if j == offset + i else 0 for j in range(total)])
        offset += m.ngens
    pres = normalize_presentation(ring, total, IntMatrix.from_columns(rel_cols, rows=total))
    injections = []
    projections = []
    offset = 0
    for m in ms:
        inj_cols = [pres.to_canonical.col(offset + i) for i in range(m.ngens)]
        inj = ModuleMap(m, pres.module, IntMatrix.from_columns(inj_cols, rows=pres.module.ngens))
        proj_rows = [pres.from_canonical.entries[offset + i] for i in range(m.ngens)]
        proj = ModuleMap(pres.module, m, IntMatrix.from_rows(proj_rows, cols=pres.module.ngens))
        injections.append(inj)
        projections.append(proj)
        offset += m.ngens
    return DirectSum(pres.module, tuple(injections), tuple(projections))


@dataclass(frozen=True)
class Pushout:
    """Pushout of alpha: S -> X along a mono iota: S -> M.

    The corner is (X + M) / A with A generated by (alpha(s), -iota(s)); the
    leg through X stays mono whenever iota is.
    """

    module: FpModule
    leg_from_alpha_target: ModuleMap   # X -> P
    leg_from_iota_target: ModuleMap    # M -> P
    presentation_relations: IntMatrix  # the A-columns inside X + M coordinates


def pushout(alpha: ModuleMap, iota: ModuleMap) -> Pushout:
    if alpha.source != iota.source:
        raise ModuleError("pushout legs must share their source")
    if not iota.is_mono():
        raise ModuleError("iota must be injective for this pushout construction")
    X, M = alpha.target, iota.target
    gx, gm = X.ngens, M.ngens
    total = gx + gm
    rel_cols = []
    for i, d in enumerate(X.factors):
        if d != 0:
            rel_cols.append([d if j == i else 0 for j in range(total)])
    for i, d in enumerate(M.factors):
        if d != 0:
            rel_cols.append([d if j == gx + i else 0 for j in range(total)])
    a_cols = []
    for s in range(alpha.source.ngens):
        col = [alpha.matrix.entries[i][s] for i in range(gx)] + \
              [-iota.matrix.entries[i][s] for i in range(gm)]
        a_cols.append(col)
    rels = IntMatrix.from_columns(rel_cols + a_cols, rows=total)
    pres = normalize_presentation(X.ring, total, rels)
    theta = ModuleMap(X, pres.module,
                      IntMatrix.from_columns([pres.to_canonical.col(i) for i in range(gx)],
                                             rows=pres.module.ngens))
    gamma = ModuleMap(M, pres.module,
                      IntMatrix.from_columns([pres.to_canonical.col(gx + i) for i in range(gm)],
                                             rows=pres.module.ngens))
    return Pushout(pres.module, theta, gamma, IntMatrix.from_columns(a_cols, rows=total))


# ---------------------------------------------------------------------------
# Hom, Ext and injective hulls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomModule:
    """Hom(source, target) as a canonical module plus an element <-> map codec."""

    source: FpModule
    target: FpModule
    module: FpModule
    pairs: tuple              # (i, j, order, scale): coordinate (i,j) ranges over
                              # multiples of scale in target slot i, order many
    to_canonical: IntMatrix
    from_canonical: IntMatrix

    def encode(self, f: ModuleMap) -> tuple:
        if f.source != self.source or f.target != self.target:
            raise ModuleError("map does not belong to this hom module")
        raw = []
        for (i, j, order, scale) in self.pairs:
            v = f.matrix.entries[i][j]
            raw.append((v // scale) % order if order else v)
        out = [sum(self.to_canonical.entries[r][t] * raw[t] for t in range(len(raw)))
               for r in range(self.module.ngens)]
        return self.module.reduce_element(out)

    def decode(self, elem: Sequence[int]) -> ModuleMap:
        raw = [sum(self.from_canonical.entries[t][r] * elem[r] for r in range(self.module.ngens))
               for t in range(len(self.pairs))]
        mat = [[0] * self.source.ngens for _ in range(self.target.ngens)]
        for (idx, (i, j, order, scale)) in enumerate(self.pairs):
            c = raw[idx] % order if order else raw[idx]
            mat[i][j] = c * scale
        return ModuleMap(self.source, self.target,
                         IntMatrix.from_rows(mat, cols=self.source.ngens))

    def elements(self) -> Iterator[ModuleMap]:
        for elem in self.module.elements():
            yield self.decode(elem)


def _hom_pair_data(ring: RingSpec, dj: int, di: int):
    """Cyclic structure of Hom(R/dj, R/di): (order, scale) with the maps being
    multiplication by multiples of ``scale``; order == 0 means a free Z of them."""
    if ring.is_modular:
        g = math.gcd(dj, di)
        return g, di // g
    if di == 0 and dj == 0:
        return 0, 1
    if di == 0:
        return 1, 0   # Hom(Z/d, Z) = 0
    if dj == 0:
        return di, 1  # Hom(Z, Z/d) = Z/d
    g = math.gcd(dj, di)
    return g, di // g


@lru_cache(maxsize=None)
def hom_module(source: FpModule, target: FpModule) -> HomModule:
    """Hom(source, target) with its canonical-form codec."""
    if source.ring != target.ring:
        raise ModuleError("mixed rings in hom")
    ring = source.ring
    pairs = []
    for i, di in enumerate(target.factors):
        for j, dj in enumerate(source.factors):
            order, scale = _hom_pair_data(ring, dj, di)
            if order == 1:
                continue
            pairs.append((i, j, order, scale))
    rel_cols = []
    for t, (_, _, order, _) in enumerate(pairs):
        if order != 0:
            rel_cols.append([order if s == t else 0 for s in range(len(pairs))])
    pres = normalize_presentation(ring, len(pairs), IntMatrix.from_columns(rel_cols, rows=len(pairs)))
    return HomModule(source, target, pres.module, tuple(pairs),
                     pres.to_canonical, pres.from_canonical)


def hom_precompose(h_from: HomModule, h_to: HomModule, phi: ModuleMap) -> ModuleMap:
    """The map Hom(A, N) -> Hom(A', N) given by f -> f o phi, phi: A' -> A."""
    if h_from.source != phi.target or h_to.source != phi.source or h_from.target != h_to.target:
        raise ModuleError("precomposition data mismatch")
    cols = []
    for k in range(h_from.module.ngens):
        elem = tuple(1 if t == k else 0 for t in range(h_from.module.ngens))
        f = h_from.decode(elem)
        cols.append(h_to.encode(f.compose(phi)))
    return ModuleMap(h_from.module, h_to.module,
                     IntMatrix.from_columns(cols, rows=h_to.module.ngens))


def hom_postcompose(h_from: HomModule, h_to: HomModule, psi: ModuleMap) -> ModuleMap:
    """The map Hom(A, N) -> Hom(A, N') given by f -> psi o f, psi: N -> N'."""
    if h_from.target != psi.source or h_to.target != psi.target or h_from.source != h_to.source:
        raise ModuleError("postcomposition data mismatch")
    cols = []
    for k in range(h_from.module.ngens):
        elem = tuple(1 if t == k else 0 for t in range(h_from.module.ngens))
        f = h_from.decode(elem)
        cols.append(h_to.encode(psi.compose(f)))
    return ModuleMap(h_from.module, h_to.module,
                     IntMatrix.from_columns(cols, rows=h_to.module.ngens))


@lru_cache(maxsize=None)
def ext1_module(m: FpModule, n: FpModule) -> FpModule:
    """Ext^1(m, n) computed from the canonical one-step free presentation
    0 -> K -> F0 -> m -> 0 as the cokernel of Hom(F0, n) -> Hom(K, n)."""
    if m.ring != n.ring:
        raise ModuleError("mixed rings in ext")
    f0 = FpModule.free(m.ring, m.ngens)
    proj = ModuleMap(f0, m, IntMatrix.identity(m.ngens))
    kw = kernel(proj)
    restriction = hom_precompose(hom_module(f0, n), hom_module(kw.sub, n), kw.inclusion)
    return cokernel(restriction)[0]


def _prime_factors(n: int) -> list:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def injective_hull(m: FpModule) -> tuple:
    """Injective hull over Z/n: returns (hull, essential mono embedding).

    Each factor d splits into its prime parts Z/p^a, and Z/p^a embeds
    essentially in Z/p^{v_p(n)} by multiplication with p^{v-a}.  Over Z the
    hull of a torsion module is not finitely generated, so only modular
    rings are supported.
    """
    if not m.ring.is_modular:
        raise ModuleError("injective hulls are only computable over Z/n here")
    n = m.ring.modulus
    nfac = dict(_prime_factors(n))
    hull_factors = []
    embed_cols = []   # per source generator, dict hull_index -> entry
    hull_index = 0
    positions = []
    for d in m.factors:
        entry = {}
        for p, a in _prime_factors(d):
            v = nfac[p]
            hull_factors.append(p ** v)
            entry[hull_index] = p ** (v - a)
            hull_index += 1
        positions.append(entry)
    raw_rows = len(hull_factors)
    embed = [[0] * m.ngens for _ in range(raw_rows)]
    for j, entry in enumerate(positions):
        for i, val in entry.items():
            embed[i][j] = val
    rel_cols = [[hull_factors[i] if r == i else 0 for r in range(raw_rows)]
                for i in range(raw_rows)]
    pres = normalize_presentation(m.ring, raw_rows, IntMatrix.from_columns(rel_cols, rows=raw_rows))
    emb = pres.to_canonical @ IntMatrix.from_rows(embed, cols=m.ngens)
    hull = pres.module
    embedding = ModuleMap(m, hull, emb)
    return hull, embedding


# ---------------------------------------------------------------------------
# Submodule enumeration (finite modules only)
# ---------------------------------------------------------------------------

def _add_elements(m: FpModule, a: tuple, b: tuple) -> tuple:
    return m.reduce_element([x + y for x, y in zip(a, b)])


def span_elements(m: FpModule, gens: Sequence[tuple]) -> frozenset:
    zero = m.reduce_element([0] * m.ngens)
    seen = {zero}
    frontier = [zero]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = _add_elements(m, v, g)
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return frozenset(seen)


def all_submodules(m: FpModule) -> list:
    """Every submodule of a finite module, as frozensets of elements,
    in a deterministic order (by size, then sorted element list)."""
    size = m.size()
    if size is None or size > 4096:
        raise ModuleError("submodule enumeration needs a small finite module")
    elements = sorted(m.elements())
    zero = m.reduce_element([0] * m.ngens)
    seen = {frozenset([zero])}
    frontier = [frozenset([zero])]
    while frontier:
        s = frontier.pop()
        for x in elements:
            if x in s:
                continue
            bigger = span_elements(m, list(s) + [x])
            if bigger not in seen:
                seen.add(bigger)
                frontier.append(bigger)
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def submodule_from_elements(m: FpModule, elems: Sequence[tuple]) -> SubquotientWitness:
    gen_cols = IntMatrix.from_columns([list(e) for e in elems], rows=m.ngens)
    return submodule_witness(m, gen_cols)


# ---------------------------------------------------------------------------
# Linear systems whose unknowns are module maps
# ---------------------------------------------------------------------------

class MapSystem:
    """Simultaneous linear equations over unknown module maps.

    Unknowns are declared with source and target; their well-definedness
    congruences are added automatically.  Equations have the form

        sum_k  L_k o U_{name_k} o R_k  =  rhs      in Hom(S, T)

    entered per term, and every solve returns the canonical solution, so
    downstream constructions are reproducible.
    """

    def __init__(self, ring: RingSpec):
        self.ring = ring
        self._unknowns: list = []
        self._offsets: dict = {}
        self._shapes: dict = {}
        self._nvars = 0
        self._equations: list = []

    def unknown(self, name: str, source: FpModule, target: FpModule) -> str:
        if name in self._offsets:
            raise ModuleError(f"duplicate unknown {name}")
        self._offsets[name] = self._nvars
        self._shapes[name] = (source, target)
        self._unknowns.append(name)
        self._nvars += source.ngens * target.ngens
        return name

    def _var(self, name: str, p: int, q: int) -> int:
        src, tgt = self._shapes[name]
        return self._offsets[name] + p * src.ngens + q

    def equation(self, terms: Sequence[tuple], rhs: Optional[ModuleMap],
                 space: tuple) -> None:
        """Add one map equation; ``terms`` are (L, name, R, sign) with L, R
        ModuleMaps (or None for identity) composing as L o U o R."""
        self._equations.append((list(terms), rhs, space))

    def solve(self) -> Optional[dict]:
        sys = CongruenceSystem(self.ring, self._nvars)
        default_mod = self.ring.modulus if self.ring.is_modular else 0
        for name in self._unknowns:
            src, tgt = self._shapes[name]
            for q, dq in enumerate(src.factors):
                if dq == 0:
                    continue
                for p, dp in enumerate(tgt.factors):
                    modulus = dp if dp else default_mod
                    sys.add({self._var(name, p, q): dq}, 0, modulus)
        for terms, rhs, (S, T) in self._equations:
            for r in range(T.ngens):
                modulus = T.factors[r] if T.factors[r] else default_mod
                for c in range(S.ngens):
                    coeffs: dict = {}
                    for (L, name, R, sign) in terms:
                        src, tgt = self._shapes[name]
                        lmat = L.matrix if L is not None else IntMatrix.identity(T.ngens)
                        rmat = R.matrix if R is not None else IntMatrix.identity(S.ngens)
                        for p in range(tgt.ngens):
                            lv = lmat.entries[r][p]
                            if lv == 0:
                                continue
                            for q in range(src.ngens):
                                rv = rmat.entries[q][c]
                                if rv == 0:
                                    continue
                                var = self._var(name, p, q)
                                coeffs[var] = coeffs.get(var, 0) + sign * lv * rv
                    rhs_val = rhs.matrix.entries[r][c] if rhs is not None else 0
                    sys.add(coeffs, rhs_val, modulus)
        part, _ = sys.solve()
        if part is None:
            return None
        out = {}
        for name in self._unknowns:
            src, tgt = self._shapes[name]
            base = self._offsets[name]
            mat = [[part[base + p * src.ngens + q] for q in range(src.ngens)]
                   for p in range(tgt.ngens)]
            out[name] = ModuleMap(src, tgt, IntMatrix.from_rows(mat, cols=src.ngens))
        return out
