"""Shared deterministic generators for the randomized suites."""
from __future__ import annotations

import random

from homkit import (
    ChainMap,
    Complex,
    FpModule,
    ModuleMap,
    RingSpec,
    chain_map_group,
    hom_module,
)


def small_modules(ring: RingSpec, max_size: int) -> list:
    """All modules over Z/n with at most ``max_size`` elements."""
    def chains(prefix, prod):
        out = [tuple(prefix)]
        for d in range(2, ring.modulus + 1):
            if ring.modulus % d:
                continue
            if prefix and d % prefix[-1] != 0:
                continue
            if prod * d <= max_size:
                out.extend(chains(prefix + [d], prod * d))
        return out
    facs = sorted(set(chains([], 1)), key=lambda f: (len(f), f))
    return [FpModule(ring, f) for f in facs]


def random_complex(rng: random.Random, ring: RingSpec, members: list,
                   max_degrees: int = 3, lo_range=(-1, 1)) -> Complex:
    """A random bounded complex with components from ``members``."""
    ndeg = rng.randint(1, max_degrees)
    lo = rng.randint(*lo_range)
    comps = {k: rng.choice(members) for k in range(lo, lo + ndeg)}
    for _ in range(60):
        diffs = {}
        ok = True
        prev = None
        for k in range(lo, lo + ndeg - 1):
            hm = hom_module(comps[k], comps[k + 1])
            if hm.module.is_zero():
                d = ModuleMap.zero(comps[k], comps[k + 1])
            else:
                els = list(hm.module.elements())
                d = hm.decode(els[rng.randrange(len(els))])
            if prev is not None and not d.compose(prev).is_zero():
                ok = False
                break
            diffs[k] = d
            prev = d
        if ok:
            return Complex(ring, comps, diffs)
    return Complex(ring, comps, {})


def random_chain_map(rng: random.Random, x: Complex, y: Complex) -> ChainMap:
    grp = chain_map_group(x, y)
    size = grp.module.size()
    if not size or size == 1:
        return ChainMap.zero(x, y)
    els = list(grp.module.elements())
    return grp.decode(els[rng.randrange(len(els))])
