"""Dimension solver: examples, the closure-oracle agreement, and the
structural properties (monotonicity, weakening, collapse)."""

import random

from xtt.dims import build_classes, consistent, decide_eq
from xtt.syntax import Cube, CubeDim, CubeEq, DIM0, DIM1, DimConst, DimVar
from xtt.testkit import all_small_cubes, closure_oracle


def _cube(n, *pairs):
    entries = tuple(CubeDim() for _ in range(n))
    entries += tuple(CubeEq(a, b) for a, b in pairs)
    return Cube(entries)


def test_empty_cube():
    cls = build_classes(Cube())
    assert consistent(cls)
    assert not decide_eq(cls, DIM0, DIM1)
    assert decide_eq(cls, DIM0, DIM0)


def test_hypothesis_rule():
    cls = build_classes(_cube(1, (DimVar(0), DIM0)))
    assert consistent(cls)
    assert decide_eq(cls, DimVar(0), DIM0)
    assert not decide_eq(cls, DimVar(0), DIM1)


def test_transitive_inconsistency():
    # i, j with i=j, j=1, i=0 merges everything: 0 ~ 1
    cls = build_classes(_cube(2, (DimVar(0), DimVar(1)),
                              (DimVar(1), DIM1), (DimVar(0), DIM0)))
    assert not consistent(cls)
    oracle = closure_oracle(_cube(2, (DimVar(0), DimVar(1)),
                                  (DimVar(1), DIM1), (DimVar(0), DIM0)))
    assert oracle.inconsistent()


def test_false_constraint_collapses_all_queries():
    cls = build_classes(_cube(2, (DIM0, DIM1)))
    assert not consistent(cls)
    assert decide_eq(cls, DimVar(0), DimVar(1))
    assert decide_eq(cls, DIM0, DIM1)


def test_single_face_is_consistent():
    cls = build_classes(_cube(1, (DimVar(0), DIM1)))
    assert consistent(cls)


def test_double_face_is_inconsistent():
    cls = build_classes(_cube(1, (DimVar(0), DIM0), (DimVar(0), DIM1)))
    assert not consistent(cls)


def test_idempotent_and_frozen():
    cube = _cube(2, (DimVar(0), DimVar(1)))
    a = build_classes(cube)
    b = build_classes(cube)
    scope = [DIM0, DIM1, DimVar(0), DimVar(1)]
    for r in scope:
        for s in scope:
            assert decide_eq(a, r, s) == decide_eq(b, r, s)


def test_fresh_levels_are_singletons():
    cls = build_classes(_cube(1, (DimVar(0), DIM0)))
    assert decide_eq(cls, DimVar(7), DimVar(7))
    assert not decide_eq(cls, DimVar(7), DimVar(8))
    assert not decide_eq(cls, DimVar(7), DIM0)


def test_extension_monotone():
    # adding a constraint never turns a true answer false
    rng = random.Random(4)
    sample = [c for c in all_small_cubes(2, 2) if rng.random() < 0.15]
    for cube in sample:
        cls = build_classes(cube)
        n = cube.num_dims
        scope = [DIM0, DIM1] + [DimVar(k) for k in range(n)]
        stronger = cls.extended(rng.choice(scope), rng.choice(scope))
        for r in scope:
            for s in scope:
                if decide_eq(cls, r, s):
                    assert decide_eq(stronger, r, s)


def test_constraint_weakening():
    # any equality derivable in a cube is derivable after appending a
    # constraint (the admissible weakening rule)
    base = _cube(2, (DimVar(0), DIM1))
    weakened = Cube(base.entries + (CubeEq(DimVar(1), DimVar(1)),))
    a, b = build_classes(base), build_classes(weakened)
    scope = [DIM0, DIM1, DimVar(0), DimVar(1)]
    for r in scope:
        for s in scope:
            if decide_eq(a, r, s):
                assert decide_eq(b, r, s)


def test_oracle_agreement_sampled():
    # the exhaustive version is acceptance criterion 5; keep a fast
    # random slice in the unit suite
    rng = random.Random(9)
    for cube in all_small_cubes(3, 3):
        if rng.random() > 0.02:
            continue
        cls = build_classes(cube)
        oracle = closure_oracle(cube)
        scope = [DIM0, DIM1] + [DimVar(k) for k in range(cube.num_dims)]
        for r in scope:
            for s in scope:
                assert decide_eq(cls, r, s) == oracle.related(r, s)


def test_const_of():
    cls = build_classes(_cube(2, (DimVar(0), DIM1)))
    assert cls.const_of(DimVar(0)) == 1
    assert cls.const_of(DimVar(1)) is None
    assert cls.const_of(DIM0) == 0
