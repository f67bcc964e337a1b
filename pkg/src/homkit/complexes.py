"""Bounded cochain complexes, chain maps, homotopies, cones and solvers.

Differentials raise degree and satisfy d o d = 0.  All stored complexes are
two-sided bounded so that every quantifier downstream stays finite.  The
mapping cone uses the sign convention [[-d, 0], [f, d]] and shifting by k
multiplies the differential by (-1)^k; with these choices the canonical cone
sequence is degreewise split and splitting is equivalent to null-homotopy
of the glued map, which the solvers here decide exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .exactalg import IntMatrix, RingSpec
from .modules import (
    DirectSum,
    FpModule,
    MapSystem,
    ModuleMap,
    direct_sum,
    hom_module,
    integer_kernel,
    kernel,
    normalize_presentation,
    submodule_witness,
)


class ComplexError(ValueError):
    pass


class Complex:
    """Degree-indexed family of modules with degree-raising differentials."""

    def __init__(self, ring: RingSpec, components: Dict[int, FpModule],
                 differentials: Dict[int, ModuleMap], check: bool = True):
        self.ring = ring
        comps = {k: m for k, m in components.items() if not m.is_zero()}
        for k, m in comps.items():
            if m.ring != ring:
                raise ComplexError(f"component at degree {k} lives over {m.ring}, not {ring}")
        diffs = {}
        for k, d in differentials.items():
            if k in comps and (k + 1) in comps:
                if d.source != comps[k] or d.target != comps[k + 1]:
                    raise ComplexError(f"differential at degree {k} has wrong endpoints")
                diffs[k] = d
            elif not d.is_zero():
                raise ComplexError(f"nonzero differential at degree {k} touches a zero component")
        for k in comps:
            if (k + 1) in comps and k not in diffs:
                diffs[k] = ModuleMap.zero(comps[k], comps[k + 1])
        self._components = dict(sorted(comps.items()))
        self._differentials = dict(sorted(diffs.items()))
        if check:
            verdict = validate_complex(self)
            if not verdict.ok:
                raise ComplexError(verdict.message)

    @property
    def support(self) -> Optional[Tuple[int, int]]:
        if not self._components:
            return None
        keys = list(self._components)
        return min(keys), max(keys)

    def degrees(self) -> list:
        return list(self._components)

    def component(self, k: int) -> FpModule:
        return self._components.get(k, FpModule.zero(self.ring))

    def differential(self, k: int) -> ModuleMap:
        if k in self._differentials:
            return self._differentials[k]
        return ModuleMap.zero(self.component(k), self.component(k + 1))

    def is_zero(self) -> bool:
        return not self._components

    def total_size(self) -> Optional[int]:
        total = 1
        for m in self._components.values():
            s = m.size()
            if s is None:
                return None
            total *= s
        return total

    def canonical_key(self) -> tuple:
        return (self.ring,
                tuple((k, m.factors) for k, m in self._components.items()),
                tuple((k, d.matrix.entries) for k, d in self._differentials.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Complex) and self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        lo, hi = self.support
        parts = [f"{k}:{self.component(k).describe()}" for k in range(lo, hi + 1)]
        return "[" + ", ".join(parts) + "]"

    def __repr__(self) -> str:
        return f"Complex({self.describe()})"


@dataclass(frozen=True)
class ComplexVerdict:
    ok: bool
    degree: Optional[int]
    message: str


def validate_complex(c: Complex) -> ComplexVerdict:
    """Check d o d = 0 degreewise; reports the middle degree of the first
    offending composite."""
    for k in sorted(c._components):
        d0 = c.differential(k)
        d1 = c.differential(k + 1)
        if d1.source.is_zero() or d0.source.is_zero():
            continue
        comp = d1.compose(d0)
        if not comp.is_zero():
            return ComplexVerdict(False, k + 1, f"d o d is nonzero through degree {k + 1}")
    return ComplexVerdict(True, None, "valid complex")


def zero_complex(ring: RingSpec) -> Complex:
    return Complex(ring, {}, {})


def sphere(n: int, m: FpModule) -> Complex:
    """The complex with m concentrated in degree n."""
    if m.is_zero():
        return zero_complex(m.ring)
    return Complex(m.ring, {n: m}, {})


def disk(n: int, m: FpModule) -> Complex:
    """The contractible complex with m in degrees n and n+1, identity between."""
    if m.is_zero():
        return zero_complex(m.ring)
    return Complex(m.ring, {n: m, n + 1: m}, {n: ModuleMap.identity(m)})


def shift(c: Complex, k: int) -> Complex:
    """Degree shift: shifted^m = c^{m+k}, differential scaled by (-1)^k."""
    sign = -1 if k % 2 else 1
    comps = {deg - k: m for deg, m in c._components.items()}
    diffs = {deg - k: (d if sign == 1 else -d) for deg, d in c._differentials.items()}
    return Complex(c.ring, comps, diffs, check=False)


class ChainMap:
    """Degreewise map commuting with the differentials."""

    def __init__(self, source: Complex, target: Complex,
                 components: Dict[int, ModuleMap], check: bool = True):
        self.source = source
        self.target = target
        comps = {}
        for k, f in components.items():
            if f.is_zero():
                continue
            if f.source != source.component(k) or f.target != target.component(k):
                raise ComplexError(f"chain map component at degree {k} has wrong endpoints")
            comps[k] = f
        self._components = dict(sorted(comps.items()))
        if check and not self.commutes():
            raise ComplexError("components do not commute with the differentials")

    def component(self, k: int) -> ModuleMap:
        if k in self._components:
            return self._components[k]
        return ModuleMap.zero(self.source.component(k), self.target.component(k))

    def commutes(self) -> bool:
        degs = set(self.source.degrees()) | set(self.target.degrees())
        for k in degs:
            left = self.target.differential(k).compose(self.component(k))
            right = self.component(k + 1).compose(self.source.differential(k))
            if left.matrix.entries != right.matrix.entries:
                return False
        return True

    def is_zero(self) -> bool:
        return not self._components

    def is_mono(self) -> bool:
        return all(self.component(k).is_mono() for k in self.source.degrees())

    def is_epi(self) -> bool:
        return all(self.component(k).is_epi() for k in self.target.degrees())

    def compose(self, other: "ChainMap") -> "ChainMap":
        if other.target != self.source:
            raise ComplexError("chain map composition mismatch")
        degs = set(other.source.degrees())
        comps = {k: self.component(k).compose(other.component(k)) for k in degs}
        return ChainMap(other.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self._components) | set(other._components)
        comps = {k: self.component(k) + other.component(k) for k in degs}
        return ChainMap(self.source, self.target, comps, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self._components) | set(other._components)
        comps = {k: self.component(k) - other.component(k) for k in degs}
        return ChainMap(self.source, self.target, comps, check=False)

    @staticmethod
    def zero(source: Complex, target: Complex) -> "ChainMap":
        return ChainMap(source, target, {}, check=False)

    @staticmethod
    def identity(c: Complex) -> "ChainMap":
        return ChainMap(c, c, {k: ModuleMap.identity(c.component(k)) for k in c.degrees()},
                        check=False)

    def canonical_key(self) -> tuple:
        return (self.source.canonical_key(), self.target.canonical_key(),
                tuple((k, f.matrix.entries) for k, f in self._components.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, ChainMap) and self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())


class Homotopy:
    """Degree -1 family s with  s o d + d o s = f  for the stored chain map."""

    def __init__(self, chain_map: ChainMap, components: Dict[int, ModuleMap],
                 check: bool = True):
        self.chain_map = chain_map
        comps = {}
        for k, s in components.items():
            if s.is_zero():
                continue
            if s.source != chain_map.source.component(k) or \
               s.target != chain_map.target.component(k - 1):
                raise ComplexError(f"homotopy component at degree {k} has wrong endpoints")
            comps[k] = s
        self._components = dict(sorted(comps.items()))
        if check and not self.verifies():
            raise ComplexError("homotopy identity fails")

    def component(self, k: int) -> ModuleMap:
        if k in self._components:
            return self._components[k]
        return ModuleMap.zero(self.chain_map.source.component(k),
                              self.chain_map.target.component(k - 1))

    def verifies(self) -> bool:
        f = self.chain_map
        degs = set(f.source.degrees()) | set(f.target.degrees())
        for k in degs:
            lhs = self.component(k + 1).compose(f.source.differential(k)) + \
                  f.target.differential(k - 1).compose(self.component(k))
            if lhs.matrix.entries != f.component(k).matrix.entries:
                return False
        return True


@dataclass(frozen=True)
class ShortExactOfComplexes:
    left: Complex
    middle: Complex
    right: Complex
    inj: ChainMap
    surj: ChainMap

    def validate(self) -> bool:
        degs = set(self.middle.degrees()) | set(self.left.degrees()) | set(self.right.degrees())
        for k in degs:
            if not self.inj.component(k).is_mono():
                return False
            if not self.surj.component(k).is_epi():
                return False
            comp = self.surj.component(k).compose(self.inj.component(k))
            if not comp.is_zero():
                return False
            # exactness at the middle: the image sits inside the kernel and
            # they agree as submodules (same invariant factors + containment)
            kw = kernel(self.surj.component(k))
            im = self.inj.component(k)
            imw = submodule_witness(self.middle.component(k), im.matrix)
            if kw.sub.factors != imw.sub.factors:
                return False
            if not kw.quotient_map.compose(im).is_zero():
                return False
        return True


def direct_sum_complexes(xs: Sequence[Complex]) -> tuple:
    """Degreewise direct sum with injection/projection chain maps."""
    if not xs:
        raise ComplexError("need at least one summand")
    ring = xs[0].ring
    degs = sorted({k for x in xs for k in x.degrees()})
    sums = {k: direct_sum([x.component(k) for x in xs]) for k in degs}
    comps = {k: sums[k].module for k in degs}
    diffs = {}
    for k in degs:
        if (k + 1) not in comps:
            continue
        total = None
        for idx, x in enumerate(xs):
            term = sums[k + 1].injections[idx].compose(
                x.differential(k)).compose(sums[k].projections[idx])
            total = term if total is None else total + term
        diffs[k] = total
    out = Complex(ring, comps, diffs, check=False)
    injs = []
    projs = []
    for idx, x in enumerate(xs):
        injs.append(ChainMap(x, out, {k: sums[k].injections[idx] for k in x.degrees()},
                             check=False))
        projs.append(ChainMap(out, x, {k: sums[k].projections[idx] for k in x.degrees()},
                              check=False))
    return out, injs, projs


def mapping_cone(f: ChainMap) -> tuple:
    """Mapping cone of f: X -> Y with its canonical degreewise-split sequence
    0 -> Y -> cone -> X[1] -> 0."""
    X, Y = f.source, f.target
    ring = X.ring
    sx = shift(X, 1)
    degs = sorted(set(sx.degrees()) | set(Y.degrees()))
    sums = {k: direct_sum([sx.component(k), Y.component(k)]) for k in degs}
    comps = {k: sums[k].module for k in degs}
    diffs = {}
    for k in degs:
        if (k + 1) not in comps:
            continue
        dx = sx.differential(k)          # already carries the shift sign
        term = sums[k + 1].injections[0].compose(dx).compose(sums[k].projections[0])
        fk = f.component(k + 1)          # X^{k+1} = sx^k -> Y^{k+1}... see below
        glue = sums[k + 1].injections[1].compose(fk).compose(sums[k].projections[0])
        dy = sums[k + 1].injections[1].compose(Y.differential(k)).compose(sums[k].projections[1])
        diffs[k] = term + glue + dy
    cone = Complex(ring, comps, diffs, check=False)
    inj = ChainMap(Y, cone, {k: sums[k].injections[1] for k in Y.degrees()}, check=False)
    surj = ChainMap(cone, sx, {k: sums[k].projections[0] for k in degs if k in sums}, check=False)
    seq = ShortExactOfComplexes(Y, cone, sx, inj, surj)
    return cone, seq


@dataclass
class HomDegree:
    degree: int
    blocks: tuple            # tuple of (i, HomModule) with i the source degree
    sum: DirectSum


@dataclass
class HomComplexData:
    x: Complex
    y: Complex
    complex: Complex
    degrees: dict            # n -> HomDegree

    def family_from_element(self, n: int, elem: Sequence[int]) -> dict:
        data = self.degrees.get(n)
        if data is None:
            return {}
        out = {}
        for idx, (i, hm) in enumerate(data.blocks):
            coords = data.sum.projections[idx].apply(elem)
            f = hm.decode(coords)
            if not f.is_zero():
                out[i] = f
        return out

    def element_from_family(self, n: int, family: dict) -> tuple:
        data = self.degrees.get(n)
        if data is None:
            return ()
        total = [0] * data.sum.module.ngens
        for idx, (i, hm) in enumerate(data.blocks):
            f = family.get(i)
            if f is None:
                continue
            coords = hm.encode(f)
            piece = data.sum.injections[idx].apply(coords)
            total = [a + b for a, b in zip(total, piece)]
        return data.sum.module.reduce_element(total)


def hom_complex_data(x: Complex, y: Complex, degrees: Optional[Sequence[int]] = None) -> HomComplexData:
    """Internal hom complex with block bookkeeping.

    Degree n component is the sum over i of Hom(x^i, y^{i+n}); the
    differential sends a family (f^i) to  d_y o f^i - (-1)^n f^{i+1} o d_x.
    """
    ring = x.ring
    if x.is_zero() or y.is_zero():
        return HomComplexData(x, y, zero_complex(ring), {})
    xlo, xhi = x.support
    ylo, yhi = y.support
    lo, hi = ylo - xhi, yhi - xlo
    wanted = range(lo, hi + 1) if degrees is None else [n for n in degrees if lo <= n <= hi]
    deg_data = {}
    for n in wanted:
        blocks = []
        for i in range(xlo, xhi + 1):
            if x.component(i).is_zero() or y.component(i + n).is_zero():
                continue
            hm = hom_module(x.component(i), y.component(i + n))
            if hm.module.is_zero():
                continue
            blocks.append((i, hm))
        if blocks:
            ds = direct_sum([hm.module for _, hm in blocks])
            deg_data[n] = HomDegree(n, tuple(blocks), ds)
    comps = {n: d.sum.module for n, d in deg_data.items()}
    diffs = {}
    for n, d in deg_data.items():
        if (n + 1) not in deg_data:
            continue
        tgt = deg_data[n + 1]
        sign = -1 if n % 2 else 1
        total = None
        for idx, (i, hm) in enumerate(d.blocks):
            for tidx, (ti, thm) in enumerate(tgt.blocks):
                cols = []
                contributes = (ti == i) or (ti == i - 1)
                if not contributes:
                    continue
                for g in range(hm.module.ngens):
                    elem = tuple(1 if t == g else 0 for t in range(hm.module.ngens))
                    f = hm.decode(elem)
                    if ti == i:
                        piece = y.differential(i + n).compose(f)
                    else:
                        piece = (f.compose(x.differential(i - 1))).__neg__() if sign == 1 \
                            else f.compose(x.differential(i - 1))
                    cols.append(thm.encode(piece))
                mat = IntMatrix.from_columns(cols, rows=thm.module.ngens)
                term = tgt.sum.injections[tidx].compose(
                    ModuleMap(hm.module, thm.module, mat)).compose(d.sum.projections[idx])
                total = term if total is None else total + term
        if total is not None:
            diffs[n] = total
    if degrees is None:
        cx = Complex(ring, comps, diffs, check=False)
    else:
        cx = Complex(ring, comps, diffs, check=False)
    return HomComplexData(x, y, cx, deg_data)


def hom_complex(x: Complex, y: Complex) -> Complex:
    return hom_complex_data(x, y).complex


# ---------------------------------------------------------------------------
# Homology and exactness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactnessReport:
    exact: bool
    homology: dict           # degree -> invariant factors of H^k

    def homology_size(self, k: int) -> Optional[int]:
        fac = self.homology.get(k, ())
        total = 1
        for d in fac:
            if d == 0:
                return None
            total *= d
        return total


def homology_at(c: Complex, k: int) -> FpModule:
    """H^k = ker d^k / im d^{k-1}, computed on the integer lattices."""
    comp = c.component(k)
    if comp.is_zero():
        return FpModule.zero(c.ring)
    g = comp.ngens
    dk = c.differential(k)
    lam_next = c.component(k + 1).relation_lattice()
    ker_gens = [list(col[:g]) for col in integer_kernel(dk.matrix.hstack(lam_next))] \
        if not c.component(k + 1).is_zero() else \
        [[1 if i == j else 0 for i in range(g)] for j in range(g)]
    prev = c.differential(k - 1)
    im_cols = prev.matrix.columns() if not c.component(k - 1).is_zero() else []
    lam = comp.relation_lattice()
    rel_cols = [list(col) for col in im_cols] + [list(col) for col in lam.columns()]
    B = IntMatrix.from_columns(ker_gens, rows=g)
    rel_in_B = []
    if B.cols:
        combined = B.hstack(IntMatrix.from_columns(rel_cols, rows=g))
        for col in integer_kernel(combined):
            rel_in_B.append(list(col[: B.cols]))
        # relations: y with B y inside the image lattice
        # (integer_kernel gives exactly those pairs)
    pres = normalize_presentation(c.ring, B.cols, IntMatrix.from_columns(rel_in_B, rows=B.cols))
    return pres.module


def is_exact(c: Complex) -> ExactnessReport:
    """Exactness verdict with the homology invariant factors per degree."""
    if c.is_zero():
        return ExactnessReport(True, {})
    lo, hi = c.support
    hom = {}
    exact = True
    for k in range(lo, hi + 1):
        h = homology_at(c, k)
        hom[k] = h.factors
        if not h.is_zero():
            exact = False
    return ExactnessReport(exact, hom)


# ---------------------------------------------------------------------------
# Homotopy and splitting solvers
# ---------------------------------------------------------------------------

def null_homotopy(f: ChainMap) -> Optional[Homotopy]:
    """Find s with s o d + d o s = f, or None; the solution is canonical."""
    X, Y = f.source, f.target
    if X.is_zero() or Y.is_zero():
        return Homotopy(f, {}, check=False)
    ms = MapSystem(X.ring)
    xlo, xhi = X.support
    names = {}
    for k in range(xlo, xhi + 2):
        if not X.component(k).is_zero() and not Y.component(k - 1).is_zero():
            names[k] = ms.unknown(f"s{k}", X.component(k), Y.component(k - 1))
    for k in range(xlo - 1, xhi + 2):
        if X.component(k).is_zero() or Y.component(k).is_zero():
            continue
        terms = []
        if (k + 1) in names:
            terms.append((None, names[k + 1], X.differential(k), 1))
        if k in names:
            terms.append((Y.differential(k - 1), names[k], None, 1))
        ms.equation(terms, f.component(k), (X.component(k), Y.component(k)))
    sol = ms.solve()
    if sol is None:
        return None
    comps = {k: sol[name] for k, name in names.items()}
    return Homotopy(f, comps, check=False)


def splits(seq: ShortExactOfComplexes) -> Optional[ChainMap]:
    """A retraction r with r o inj = id as chain maps, or None."""
    L, M = seq.left, seq.middle
    if L.is_zero():
        return ChainMap.zero(M, L)
    ms = MapSystem(L.ring)
    names = {}
    for k in M.degrees():
        if not L.component(k).is_zero():
            names[k] = ms.unknown(f"r{k}", M.component(k), L.component(k))
    degs = set(M.degrees()) | set(L.degrees())
    for k in degs:
        # chain square r^{k+1} d_M = d_L r^k
        if not M.component(k).is_zero() and not L.component(k + 1).is_zero():
            terms = []
            if (k + 1) in names:
                terms.append((None, names[k + 1], M.differential(k), 1))
            if k in names:
                terms.append((L.differential(k), names[k], None, -1))
            if terms:
                ms.equation(terms, None, (M.component(k), L.component(k + 1)))
        # retraction on the inclusion
        if not L.component(k).is_zero():
            ident = ModuleMap.identity(L.component(k))
            if k in names:
                ms.equation([(None, names[k], seq.inj.component(k), 1)], ident,
                            (L.component(k), L.component(k)))
            else:
                return None
    sol = ms.solve()
    if sol is None:
        return None
    comps = {k: sol[name] for k, name in names.items()}
    return ChainMap(M, L, comps, check=False)


# ---------------------------------------------------------------------------
# Chain map groups via degree-zero hom-complex cycles
# ---------------------------------------------------------------------------

@dataclass
class ChainMapGroup:
    """The abelian group of chain maps A -> B as a module with a decoder."""

    source: Complex
    target: Complex
    module: FpModule
    _data: HomComplexData
    _inclusion: Optional[ModuleMap]        # cycles -> hom-degree-0 component

    def decode(self, elem: Sequence[int]) -> ChainMap:
        if self._inclusion is None:
            return ChainMap.zero(self.source, self.target)
        coords = self._inclusion.apply(elem)
        family = self._data.family_from_element(0, coords)
        return ChainMap(self.source, self.target, family, check=False)

    def elements(self) -> Iterator[ChainMap]:
        if self.module.size() is None:
            raise ComplexError("infinite chain map group")
        for elem in self.module.elements():
            yield self.decode(elem)

    def encode(self, f: ChainMap) -> Optional[tuple]:
        """Coordinates of a chain map in the cycle group, if it lies there."""
        if self._inclusion is None:
            return () if f.is_zero() else None
        target_elem = self._data.element_from_family(0, dict(f._components))
        from .modules import _solve_in_module
        amb = self._data.degrees[0].sum.module
        rhs = IntMatrix.from_columns([list(target_elem)], rows=amb.ngens)
        sol = _solve_in_module(amb, self._inclusion.matrix, rhs)
        if sol is None:
            return None
        return tuple(sol.entries[i][0] for i in range(self.module.ngens))


_CHAIN_GROUP_CACHE: dict = {}


def chain_map_group(a: Complex, b: Complex) -> ChainMapGroup:
    key = (a.canonical_key(), b.canonical_key())
    hit = _CHAIN_GROUP_CACHE.get(key)
    if hit is not None:
        return hit
    data = hom_complex_data(a, b, degrees=(0, 1))
    if 0 not in data.degrees:
        out = ChainMapGroup(a, b, FpModule.zero(a.ring), data, None)
    else:
        d0 = data.complex.differential(0)
        if d0.target.is_zero():
            amb = data.degrees[0].sum.module
            out = ChainMapGroup(a, b, amb, data, ModuleMap.identity(amb))
        else:
            kw = kernel(d0)
            out = ChainMapGroup(a, b, kw.sub, data, kw.inclusion)
    _CHAIN_GROUP_CACHE[key] = out
    return out


def chain_maps(a: Complex, b: Complex, cap: int = 100000) -> list:
    grp = chain_map_group(a, b)
    size = grp.module.size()
    if size is None or size > cap:
        raise ComplexError(f"chain map group too large to enumerate ({size})")
    return list(grp.elements())


def complex_isomorphic(a: Complex, b: Complex) -> bool:
    """True when some chain map is a degreewise isomorphism."""
    if a.degrees() != b.degrees():
        return False
    if any(a.component(k).factors != b.component(k).factors for k in a.degrees()):
        return False
    for f in chain_map_group(a, b).elements():
        if all(f.component(k).is_mono() and f.component(k).is_epi() for k in a.degrees()):
            return True
    return False
