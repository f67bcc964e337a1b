"""Membership oracles for the distinguished class of modules, plus the finite
universes that make universally quantified properties checkable.

Every "for all modules/complexes" statement downstream is evaluated over a
declared universe, and each verdict records which universe was used, so the
results are reproducible claims rather than absolute ones.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterator, Optional, Sequence, Tuple

from .exactalg import RingSpec
from .modules import (
    FpModule,
    ModuleError,
    ModuleMap,
    cokernel,
    hom_module,
    kernel,
)
from .complexes import (
    ChainMap,
    Complex,
    ComplexError,
    chain_map_group,
    disk,
    is_exact,
    sphere,
    zero_complex,
)


DEFAULT_MODULE_SIZE_CAP = 64
DEFAULT_WINDOW_CAP = 5


def hard_module_cap() -> int:
    env = os.environ.get("HOMKIT_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_MODULE_SIZE_CAP


class UniverseCapError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Class specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XClassSpec:
    """Decidable membership predicate on invariant-factor lists.

    Kinds: ``all``, ``zero``, ``free``, ``ann`` (annihilated by the given
    integer) and ``pred`` (a full-match regex on the comma-joined factor
    list).  Built-in kinds always contain the zero module; for ``pred``
    classes that choice is an explicit toggle.
    """

    kind: str
    param: Optional[int] = None
    pattern: Optional[str] = None
    zero_is_member: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("all", "zero", "free", "ann", "pred"):
            raise ModuleError(f"unknown class kind {self.kind!r}")
        if self.kind == "ann" and (self.param is None or self.param < 1):
            raise ModuleError("ann class needs a positive annihilator")
        if self.kind == "pred" and self.pattern is None:
            raise ModuleError("pred class needs a pattern")

    def key(self) -> str:
        if self.kind == "ann":
            return f"ann:{self.param}"
        if self.kind == "pred":
            suffix = "" if self.zero_is_member else "!0"
            return f"pred:{self.pattern}{suffix}"
        return self.kind


ALL = XClassSpec("all")
ZERO_ONLY = XClassSpec("zero")
FREE = XClassSpec("free")


def ann(p: int) -> XClassSpec:
    return XClassSpec("ann", param=p)


def parse_class_spec(text: str) -> XClassSpec:
    text = text.strip()
    if text == "all":
        return ALL
    if text == "zero":
        return ZERO_ONLY
    if text == "free":
        return FREE
    if text.startswith("ann:"):
        return ann(int(text[4:]))
    if text.startswith("pred:"):
        return XClassSpec("pred", pattern=text[5:])
    raise ModuleError(f"cannot parse class spec {text!r}")


def contains_module(x: XClassSpec, m: FpModule) -> bool:
    if m.is_zero():
        return True if x.kind != "pred" else x.zero_is_member
    if x.kind == "all":
        return True
    if x.kind == "zero":
        return False
    if x.kind == "free":
        unit = m.ring.modulus if m.ring.is_modular else 0
        return all(d == unit for d in m.factors)
    if x.kind == "ann":
        return all(d != 0 and x.param % d == 0 for d in m.factors)
    rendered = ",".join(str(d) for d in m.factors)
    return re.fullmatch(x.pattern, rendered) is not None


def contains_complex(x: XClassSpec, c: Complex) -> bool:
    """True when every component (including the zero ones) belongs to the class."""
    if not contains_module(x, FpModule.zero(c.ring)):
        return False
    return all(contains_module(x, c.component(k)) for k in c.degrees())


# ---------------------------------------------------------------------------
# Module universes
# ---------------------------------------------------------------------------

def _divisors(n: int) -> list:
    return [d for d in range(2, n + 1) if n % d == 0]


def _factor_chains(n: int, bound: int) -> list:
    """All divisibility chains of divisors of n with product <= bound."""
    out = [()]
    divs = _divisors(n)

    def extend(prefix: tuple, prod: int):
        for d in divs:
            if prefix and d % prefix[-1] != 0:
                continue
            if prod * d > bound:
                continue
            chain = prefix + (d,)
            out.append(chain)
            extend(chain, prod * d)

    extend((), 1)
    return sorted(set(out), key=lambda f: (math.prod(f) if f else 1, len(f), f))


class ModuleUniverse:
    """Every isomorphism class of module over Z/n with at most ``size_bound``
    elements, enumerated exactly once in a deterministic order."""

    def __init__(self, ring: RingSpec, size_bound: int):
        if not ring.is_modular:
            raise ModuleError("module universes require a modular ring")
        if size_bound < 1:
            raise UniverseCapError("size bound must be at least 1")
        if size_bound > hard_module_cap():
            raise UniverseCapError(
                f"size bound {size_bound} exceeds the hard cap {hard_module_cap()} "
                "(set HOMKIT_CAP to override)")
        self.ring = ring
        self.size_bound = size_bound
        self._members: Optional[list] = None
        self._mono_pool: Optional[list] = None
        self._epi_pool: Optional[list] = None
        self._verdict_memo: dict = {}

    @property
    def members(self) -> list:
        if self._members is None:
            chains = _factor_chains(self.ring.modulus, self.size_bound)
            self._members = [FpModule(self.ring, f) for f in chains]
        return self._members

    def describe(self) -> str:
        return f"modules({self.ring}, size<={self.size_bound})"

    def mono_pool(self) -> list:
        """Injections between nonzero members, one per image submodule, with
        their cokernels.

        Injections from the zero module impose no lifting constraint and are
        left out; two injections with the same image differ by an automorphism
        of the source, which does not change any universal lifting test, so
        only the enumeration-first one per image is kept.
        """
        if self._mono_pool is None:
            pool = []
            for bi, b in enumerate(self.members):
                seen = set()
                for a in self.members:
                    if a.is_zero():
                        continue
                    for f in enumerate_monos(a, b):
                        img = frozenset(f.apply(x) for x in a.elements())
                        if (bi, img) in seen:
                            continue
                        seen.add((bi, img))
                        cok, _ = cokernel(f)
                        pool.append((f, cok))
            self._mono_pool = pool
        return self._mono_pool

    def epi_pool(self) -> list:
        """Surjections between members onto nonzero members, one per kernel
        subset (postcomposing with an automorphism of the target does not
        change any universal lifting test), with their kernels."""
        if self._epi_pool is None:
            pool = []
            for ai, a in enumerate(self.members):
                seen = set()
                for b in self.members:
                    if b.is_zero():
                        continue
                    for f in enumerate_epis(a, b):
                        zero = b.reduce_element([0] * b.ngens)
                        ker_set = frozenset(x for x in a.elements() if f.apply(x) == zero)
                        if (ai, ker_set) in seen:
                            continue
                        seen.add((ai, ker_set))
                        ker = kernel(f).sub
                        pool.append((f, ker))
            self._epi_pool = pool
        return self._epi_pool


_MODULE_UNIVERSES: dict = {}


def module_universe(ring: RingSpec, size_bound: int) -> ModuleUniverse:
    key = (ring, size_bound)
    if key not in _MODULE_UNIVERSES:
        _MODULE_UNIVERSES[key] = ModuleUniverse(ring, size_bound)
    return _MODULE_UNIVERSES[key]


def enumerate_modules(u: ModuleUniverse) -> Iterator[FpModule]:
    yield from u.members


def enumerate_homs(a: FpModule, b: FpModule) -> list:
    hm = hom_module(a, b)
    size = hm.module.size()
    if size is None or size > 1 << 20:
        raise UniverseCapError("hom set too large to enumerate")
    return list(hm.elements())


def enumerate_monos(a: FpModule, b: FpModule) -> list:
    """All injective homomorphisms a -> b, in deterministic order."""
    sa, sb = a.size(), b.size()
    if sa is None or sb is None:
        raise UniverseCapError("mono enumeration needs finite modules")
    if sa > sb:
        return []
    return [f for f in enumerate_homs(a, b) if f.is_mono()]


def enumerate_epis(a: FpModule, b: FpModule) -> list:
    sa, sb = a.size(), b.size()
    if sa is None or sb is None:
        raise UniverseCapError("epi enumeration needs finite modules")
    if sa < sb:
        return []
    return [f for f in enumerate_homs(a, b) if f.is_epi()]


# ---------------------------------------------------------------------------
# Complex universes
# ---------------------------------------------------------------------------

def _all_differential_tuples(comps: list, ring: RingSpec) -> Iterator[dict]:
    """All differential assignments with d o d = 0 for the given components."""
    arrows = []
    for k in range(len(comps) - 1):
        hm = hom_module(comps[k], comps[k + 1])
        arrows.append((k, [hm.decode(e) for e in hm.module.elements()]))
    if not arrows:
        yield {}
        return
    for combo in iproduct(*(choices for _, choices in arrows)):
        ok = True
        for i in range(len(combo) - 1):
            if not combo[i + 1].compose(combo[i]).is_zero():
                ok = False
                break
        if ok:
            yield {arrows[i][0]: combo[i] for i in range(len(combo))}


class ComplexUniverse:
    """A finite universe of bounded complexes.

    Contains the full enumeration of complexes supported on a short window of
    consecutive degrees (components drawn from a module universe) together
    with all disks and spheres on the members of a second, usually larger,
    module universe.  The disk family is what ties complex-level lifting back
    to module-level lifting degree by degree.
    """

    def __init__(self, ring: RingSpec, full_bound: int = 4,
                 full_window: Tuple[int, int] = (0, 1),
                 disk_bound: int = 8,
                 disk_degrees: Optional[Sequence[int]] = None):
        lo, hi = full_window
        if hi - lo + 1 > DEFAULT_WINDOW_CAP:
            raise UniverseCapError("full enumeration window exceeds the cap")
        self.ring = ring
        self.full_bound = full_bound
        self.full_window = full_window
        self.disk_bound = disk_bound
        if disk_degrees is None:
            disk_degrees = range(lo - 1, hi + 1)
        self.disk_degrees = tuple(disk_degrees)
        self._members: Optional[list] = None
        self._mono_pools: dict = {}
        self._epi_pools: dict = {}

    def describe(self) -> str:
        return (f"complexes({self.ring}, full<= {self.full_bound} on "
                f"{list(range(self.full_window[0], self.full_window[1] + 1))}, "
                f"disks/spheres<={self.disk_bound} at {list(self.disk_degrees)})")

    @property
    def members(self) -> list:
        if self._members is not None:
            return self._members
        seen = []
        keys = set()

        def push(c: Complex):
            k = c.canonical_key()
            if k not in keys:
                keys.add(k)
                seen.append(c)

        push(zero_complex(self.ring))
        base = module_universe(self.ring, self.full_bound)
        lo, hi = self.full_window
        degs = list(range(lo, hi + 1))
        for combo in iproduct(base.members, repeat=len(degs)):
            for diffs in _all_differential_tuples(list(combo), self.ring):
                comps = {degs[i]: combo[i] for i in range(len(degs))}
                shifted = {degs[i]: d for i, d in diffs.items()}
                push(Complex(self.ring, comps, shifted, check=False))
        wide = module_universe(self.ring, self.disk_bound)
        for m in wide.members:
            if m.is_zero():
                continue
            for k in self.disk_degrees:
                push(disk(k, m))
                push(sphere(k, m))
            push(sphere(self.disk_degrees[-1] + 1, m))
        self._members = seen
        return self._members

    def mono_pool(self) -> list:
        """Injective chain maps between members (nonzero source), one per
        image subcomplex, each with its degreewise cokernel complex.

        Two chain injections with the same degreewise image differ by a chain
        automorphism of the source, so they pose the same extension test;
        keeping the enumeration-first one per image is lossless.
        """
        if "pool" not in self._mono_pools:
            pool = []
            for bi, b in enumerate(self.members):
                seen = set()
                for a in self.members:
                    if a.is_zero():
                        continue
                    if not _support_embeds(a, b):
                        continue
                    for phi in chain_monos(a, b):
                        img = tuple(sorted(
                            (k, tuple(sorted(phi.component(k).apply(x)
                                             for x in a.component(k).elements())))
                            for k in a.degrees()))
                        if img in seen:
                            continue
                        seen.add(img)
                        pool.append((phi, cokernel_complex(phi)))
            self._mono_pools["pool"] = pool
        return self._mono_pools["pool"]

    def epi_pool(self) -> list:
        """Surjective chain maps between members (nonzero target), one per
        degreewise kernel subset, each with its kernel complex."""
        if "pool" not in self._epi_pools:
            pool = []
            for ai, a in enumerate(self.members):
                seen = set()
                for b in self.members:
                    if b.is_zero():
                        continue
                    if not _support_embeds(b, a):
                        continue
                    for psi in chain_epis(a, b):
                        kerkey = []
                        for k in a.degrees():
                            comp = psi.component(k)
                            zero = comp.target.reduce_element([0] * comp.target.ngens)
                            kerkey.append((k, tuple(sorted(
                                x for x in a.component(k).elements()
                                if comp.apply(x) == zero))))
                        kerkey = tuple(kerkey)
                        if kerkey in seen:
                            continue
                        seen.add(kerkey)
                        pool.append((psi, kernel_complex(psi)))
            self._epi_pools["pool"] = pool
        return self._epi_pools["pool"]


def _support_embeds(a: Complex, b: Complex) -> bool:
    """Cheap necessary condition for a degreewise injection a -> b."""
    for k in a.degrees():
        sa = a.component(k).size()
        sb = b.component(k).size()
        if sb is None:
            continue
        if sa is None or sa > sb:
            return False
    return True


def chain_monos(a: Complex, b: Complex) -> list:
    grp = chain_map_group(a, b)
    size = grp.module.size()
    if size is None or size > 1 << 16:
        raise UniverseCapError("chain map group too large")
    return [f for f in grp.elements() if f.is_mono()]


def chain_epis(a: Complex, b: Complex) -> list:
    grp = chain_map_group(a, b)
    size = grp.module.size()
    if size is None or size > 1 << 16:
        raise UniverseCapError("chain map group too large")
    return [f for f in grp.elements() if f.is_epi()]


def cokernel_complex(phi: ChainMap) -> Complex:
    """Degreewise cokernel of an injective chain map, with induced maps."""
    from .modules import cokernel_with_section
    b = phi.target
    data = {}
    for k in b.degrees():
        data[k] = cokernel_with_section(phi.component(k))
    comps = {k: d[0] for k, d in data.items()}
    diffs = {}
    for k in b.degrees():
        if (k + 1) not in data or data[k][0].is_zero() or data[k + 1][0].is_zero():
            continue
        cok, proj, section = data[k]
        cok2, proj2, _ = data[k + 1]
        mat = proj2.matrix @ b.differential(k).matrix @ section
        diffs[k] = ModuleMap(cok, cok2, mat)
    return Complex(b.ring, comps, diffs, check=False)


def kernel_complex(psi: ChainMap) -> Complex:
    """Degreewise kernel of a surjective chain map, with induced maps."""
    a = psi.source
    wits = {k: kernel(psi.component(k)) for k in a.degrees()}
    comps = {k: w.sub for k, w in wits.items()}
    diffs = {}
    for k in a.degrees():
        if (k + 1) not in wits or wits[k].sub.is_zero() or wits[k + 1].sub.is_zero():
            continue
        # solve incl_{k+1} o delta = d o incl_k; unique since incl is mono
        from .modules import _solve_in_module
        target_mat = a.differential(k).matrix @ wits[k].inclusion.matrix
        amb = a.component(k + 1)
        sol = _solve_in_module(amb, wits[k + 1].inclusion.matrix, target_mat)
        if sol is None:
            raise ComplexError("kernel complex: induced differential did not exist")
        diffs[k] = ModuleMap(wits[k].sub, wits[k + 1].sub, sol)
    return Complex(a.ring, comps, diffs, check=False)


_COMPLEX_UNIVERSES: dict = {}


def complex_universe(ring: RingSpec, full_bound: int = 4,
                     full_window: Tuple[int, int] = (0, 1),
                     disk_bound: int = 8,
                     disk_degrees: Optional[Sequence[int]] = None) -> ComplexUniverse:
    key = (ring, full_bound, full_window, disk_bound,
           tuple(disk_degrees) if disk_degrees is not None else None)
    if key not in _COMPLEX_UNIVERSES:
        _COMPLEX_UNIVERSES[key] = ComplexUniverse(ring, full_bound, full_window,
                                                  disk_bound, disk_degrees)
    return _COMPLEX_UNIVERSES[key]


def default_complex_universe(ring: RingSpec, for_support: Optional[Tuple[int, int]],
                             full_bound: int = 4, disk_bound: int = 8) -> ComplexUniverse:
    """Universe adapted to a complex's support: fully enumerated pairs on the
    two lowest degrees, disks and spheres covering the whole window."""
    if for_support is None:
        lo, hi = 0, 1
    else:
        lo, hi = for_support
    return complex_universe(ring, full_bound, (lo, lo + 1), disk_bound,
                            tuple(range(lo - 1, hi + 1)))


# ---------------------------------------------------------------------------
# The class of exact complexes with kernels in the distinguished class
# ---------------------------------------------------------------------------

class Eps1Universe:
    """Exact complexes on a bounded window whose differential kernels all lie
    in the distinguished class (the zero complex always qualifies)."""

    def __init__(self, ring: RingSpec, xclass: XClassSpec,
                 base_bound: int = 4, window: Tuple[int, int] = (-1, 1)):
        lo, hi = window
        if hi - lo + 1 > 4:
            raise UniverseCapError("exactness universe window is capped at 4 degrees")
        self.ring = ring
        self.xclass = xclass
        self.base_bound = base_bound
        self.window = window
        self._members: Optional[list] = None

    def describe(self) -> str:
        return (f"eps1({self.ring}, class={self.xclass.key()}, base<={self.base_bound}, "
                f"window={list(self.window)})")

    @property
    def members(self) -> list:
        if self._members is not None:
            return self._members
        out = [zero_complex(self.ring)]
        base = module_universe(self.ring, self.base_bound)
        lo, hi = self.window
        degs = list(range(lo, hi + 1))
        for combo in iproduct(base.members, repeat=len(degs)):
            if all(m.is_zero() for m in combo):
                continue
            for diffs in _all_differential_tuples(list(combo), self.ring):
                comps = {degs[i]: combo[i] for i in range(len(degs))}
                shifted = {degs[i]: d for i, d in diffs.items()}
                c = Complex(self.ring, comps, shifted, check=False)
                if self._qualifies(c):
                    out.append(c)
        self._members = out
        return self._members

    def _qualifies(self, c: Complex) -> bool:
        if not is_exact(c).exact:
            return False
        for k in c.degrees():
            ker = kernel(c.differential(k)).sub if not c.component(k + 1).is_zero() \
                else c.component(k)
            if not contains_module(self.xclass, ker):
                return False
        return True


_EPS1_UNIVERSES: dict = {}


def eps1_universe(ring: RingSpec, xclass: XClassSpec, base_bound: int = 4,
                  window: Tuple[int, int] = (-1, 1)) -> Eps1Universe:
    key = (ring, xclass.key(), base_bound, window)
    if key not in _EPS1_UNIVERSES:
        _EPS1_UNIVERSES[key] = Eps1Universe(ring, xclass, base_bound, window)
    return _EPS1_UNIVERSES[key]


def enumerate_eps1(u: Eps1Universe) -> Iterator[Complex]:
    yield from u.members
