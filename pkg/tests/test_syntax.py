"""Substitution calculus: the binding lemmas, restated for the
binder-shrinking convention (instantiating a dimension binder removes it,
so levels above the target renumber down)."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_scoped_term
from xtt.syntax import (
    Bool, Coe, DIM0, DIM1, DimConst, DimLam, DimVar, Eq, FF, Lam, PApp,
    TT, Var, alpha_eq, free_dim_levels, occurs_dim, shift_dim_from,
    shift_tm, subst_dim, subst_tm,
)


def test_subst_dim_variable_hit():
    t = PApp(Bool(), TT(), DimVar(0))  # scoped in one free dim
    assert subst_dim(t, DIM0, 0) == PApp(Bool(), TT(), DIM0)
    # under a binder, the bound dimension still points at its own binder
    # (level 1 renumbers to 0 when the free dimension is instantiated)
    u = DimLam(PApp(Bool(), TT(), DimVar(1)))  # one free dim + the binder
    assert subst_dim(u, DIM0, 0) == DimLam(PApp(Bool(), TT(), DimVar(0)))


def test_subst_dim_no_occurrence():
    assert subst_dim(TT(), DIM1, 0) == TT()


def test_subst_dim_under_binder():
    # Eq{i.A}{N0}{N1}: substituting an outer dimension leaves the bound
    # one pointing at its own binder (its level renumbers with the cube).
    line = PApp(Bool(), TT(), DimVar(1))  # the bound i at level 1
    t = Eq(line, FF(), TT())  # scoped in one free dim (level 0)
    out = subst_dim(t, DIM0, 0)
    assert out == Eq(PApp(Bool(), TT(), DimVar(0)), FF(), TT())


def test_subst_tm_examples():
    assert subst_tm(Var(0), TT(), 0) == TT()
    assert subst_tm(Lam(Var(1)), TT(), 0) == Lam(TT())
    assert subst_tm(Bool(), TT(), 0) == Bool()
    # the substituted term's indices shift under the crossed binder
    assert subst_tm(Lam(Var(1)), Var(0), 0) == Lam(Var(1))


def test_subst_tm_scope_error():
    with pytest.raises(Exception):
        subst_tm(Var(0), TT(), -1)


def test_occurs_dim_examples():
    assert occurs_dim(PApp(Bool(), TT(), DimVar(0)), 0)
    assert not occurs_dim(Bool(), 0)
    # bound j is not i: lambda j. p @ j with p not mentioning level 0
    t = DimLam(PApp(Bool(), TT(), DimVar(1)))
    assert not occurs_dim(t, 0)


def test_alpha_eq_identifies_bound_names():
    # de Bruijn representation: both sides are literally the same tree
    a = Lam(Var(0))
    b = Lam(Var(0))
    assert alpha_eq(a, b)
    assert not alpha_eq(TT(), FF())
    c1 = Coe(Bool(), DIM0, DIM1, TT())
    c2 = Coe(Bool(), DIM0, DIM1, TT())
    assert alpha_eq(c1, c2)


# ---------------------------------------------------------------------------
# Randomized lemmas
# ---------------------------------------------------------------------------

def _corpus(n_dims, n_vars, count=200, depth=4, seed=0):
    rng = random.Random(seed)
    return [random_scoped_term(rng, n_dims, n_vars, rng.randrange(depth + 1))
            for _ in range(count)]


def test_identity_substitution():
    # Weakening at slot i then instantiating the new binder with the old
    # variable i is the identity.
    for t in _corpus(3, 2):
        for i in range(3):
            weakened = shift_dim_from(t, i, 1)
            assert subst_dim(weakened, DimVar(i), i) == t


def test_substitution_composition_constants():
    # For i < j and constant dimensions, the two orders of instantiation
    # agree (the second target renumbers after the first removal).
    for t in _corpus(3, 2, seed=1):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            for r in (DIM0, DIM1):
                for s in (DIM0, DIM1):
                    lhs = subst_dim(subst_dim(t, r, i), s, j - 1)
                    rhs = subst_dim(subst_dim(t, s, j), r, i)
                    assert lhs == rhs


def test_constant_substitution_eliminates_level():
    # The free dimensions of the result are exactly the renumbered
    # survivors; the substituted level is gone.
    for t in _corpus(3, 2, seed=2):
        for i in range(3):
            out = subst_dim(t, DimConst(0), i)
            expect = {m if m < i else m - 1
                      for m in free_dim_levels(t, below=3) if m != i}
            assert free_dim_levels(out, below=2) == expect


def test_shift_tm_roundtrip():
    for t in _corpus(2, 3, seed=3):
        assert shift_tm(shift_tm(t, 2), -2) == t


@st.composite
def _scoped_terms(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    depth = draw(st.integers(0, 4))
    rng = random.Random(seed)
    return random_scoped_term(rng, 2, 2, depth)


@settings(max_examples=150, deadline=None)
@given(_scoped_terms())
def test_alpha_eq_is_reflexive_and_stable(t):
    assert alpha_eq(t, t)
    # structural equality is preserved by an unrelated weakening
    assert alpha_eq(shift_dim_from(t, 5, 1), shift_dim_from(t, 5, 1))


@settings(max_examples=150, deadline=None)
@given(_scoped_terms(), st.integers(0, 1), st.integers(0, 1))
def test_subst_then_occurs(t, i, eps):
    out = subst_dim(t, DimConst(eps), i)
    # after removing binder i, level 1 is gone entirely (only levels
    # below remain among the frees)
    assert free_dim_levels(out, below=1) <= {0}
