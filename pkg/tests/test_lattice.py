import random

import pytest

import latticeselect as ls
from latticeselect.data import load_default_schemas
from latticeselect.dataset import AttributeSchema, ClassSchema, ObjectRecord, Region
from latticeselect.errors import ContextTooLargeError, LatticeDomainError
from latticeselect.lattice import (
    IntervalComponent,
    NumericGrid,
    element_from_row,
    format_element,
    join_rows,
    materialize,
    stack_rows,
    unique_rows,
)
from oracle_utils import (
    element_diff_py,
    from_py,
    leq_py,
    materialize_py,
    successors_py,
    to_py,
)


def _obj(idx, **attrs):
    return ObjectRecord(f"o{idx}", "C", Region(idx * 10, 0, 5, 5), attrs)


def _cat_ctx(*domain):
    schema = ClassSchema("C", (AttributeSchema("a0", "categorical", domain=tuple(domain)),))
    return ls.build_context(schema, ())


def _num_ctx(values, lo=0, hi=100):
    schema = ClassSchema("C", (AttributeSchema("a0", "numeric", lower=lo, upper=hi),))
    objs = [_obj(i, a0=v) for i, v in enumerate(values)]
    return ls.build_context(schema, objs)


# --- grid construction -------------------------------------------------------


def test_six_person_age_atoms(six_ctx):
    age = six_ctx.components[1]
    assert age.grid.points == (19, 22, 24, 31, 42)
    assert [str(a) for a in age.atoms] == [
        "[0,19)", "[19,19]", "(19,22)", "[22,22]", "(22,24)", "[24,24]",
        "(24,31)", "[31,31]", "(31,42)", "[42,42]", "(42,100]",
    ]


def test_single_point_grid_atoms():
    ctx = _num_ctx([24])
    assert [str(a) for a in ctx.components[0].atoms] == ["[0,24)", "[24,24]", "(24,100]"]


def test_empty_grid_single_atom():
    ctx = _num_ctx([])
    assert [str(a) for a in ctx.components[0].atoms] == ["[0,100]"]


def test_grid_point_on_bound_drops_empty_gap():
    comp = IntervalComponent.build(NumericGrid(0, 100, (0, 100)))
    assert [str(a) for a in comp.atoms] == ["[0,0]", "(0,100)", "[100,100]"]


def test_grid_points_from_labeled_objects_only(six_dataset, six_ctx, six_spec):
    # neutral objects play no role: context built from labels only
    assert six_ctx.components[1].grid.points == (19, 22, 24, 31, 42)
    assert six_ctx.components[0].domain == ("NoStyle", "Stride", "Logo")


def test_build_context_rejects_foreign_class(six_dataset):
    schema = six_dataset.schemas["Person"]
    alien = ObjectRecord("x", "Vehicle", Region(0, 0, 1, 1), {"Age": 5})
    with pytest.raises(LatticeDomainError):
        ls.build_context(schema, [alien])


# --- atoms -------------------------------------------------------------------


def test_atom_of_examples(six_atoms):
    assert format_element(six_atoms["pi7"]) == "<{NoStyle}, [24,24]>"
    assert format_element(six_atoms["pi6"]) == "<{Logo}, [19,19]>"


def test_atom_is_direct_successor_of_bottom(six_ctx, six_atoms):
    # direct successor of bottom = atom: nothing strictly between
    universe = materialize_py(six_ctx)
    atom = to_py(six_atoms["pi7"])
    strictly_below = [x for x in universe if leq_py(x, atom) and x != atom]
    assert strictly_below == []


def test_atom_off_grid_errors(six_ctx, six_dataset):
    neutral = ObjectRecord(
        "n", "Person", Region(0, 0, 1, 1), {"TopStyle": "NoStyle", "Age": 23}
    )
    with pytest.raises(LatticeDomainError, match="not a grid point"):
        ls.atom_of(six_ctx, neutral)


# --- order, join, meet -------------------------------------------------------


def test_leq_examples(six_ctx, six_atoms):
    top = ls.top(six_ctx)
    assert ls.leq(six_atoms["pi3"], top)  # <{Logo},[24,24]> <= top
    a = from_py(six_ctx, (frozenset({0}), (3, 3)))  # <{NoStyle},[22,22]>
    b = from_py(six_ctx, (frozenset({0, 1}), (4, 10)))  # <{NoStyle,Stride},(22,100]>
    assert not ls.leq(a, b)
    assert ls.leq(a, a)


def test_bottom_laws(six_ctx, six_atoms):
    bot = ls.bottom(six_ctx)
    a = six_atoms["pi7"]
    assert ls.leq(bot, a) and not ls.leq(a, bot)
    assert ls.join(a, bot) == a
    assert ls.meet(a, bot) == bot


def test_join_meet_cat_example():
    ctx = _cat_ctx("N", "S", "L")
    n = from_py(ctx, (frozenset({0}),))
    s = from_py(ctx, (frozenset({1}),))
    assert to_py(ls.join(n, s)) == (frozenset({0, 1}),)
    assert ls.meet(n, s).bottom


def test_join_hull_spans_intermediate_atoms(six_ctx):
    a = from_py(six_ctx, (frozenset({0}), (5, 5)))  # <{N},[24,24]>
    b = from_py(six_ctx, (frozenset({1}), (9, 9)))  # <{S},[42,42]>
    assert format_element(ls.join(a, b)) == "<{NoStyle,Stride}, [24,42]>"


def test_arity_mismatch_rejected(six_ctx):
    other = _cat_ctx("N", "S", "L")
    with pytest.raises(LatticeDomainError):
        ls.leq(ls.top(six_ctx), ls.top(other))


def _random_ctxs(n, seed=0, max_size=4):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        n_attrs = rng.randint(1, 2)
        attrs = []
        objs_attrs = []
        for i in range(n_attrs):
            if rng.random() < 0.5:
                size = rng.randint(2, max_size)
                attrs.append(
                    AttributeSchema(f"a{i}", "categorical", domain=tuple(f"s{j}" for j in range(size)))
                )
            else:
                attrs.append(AttributeSchema(f"a{i}", "numeric", lower=0, upper=10))
        schema = ClassSchema("C", tuple(attrs))
        labeled = []
        for k in range(rng.randint(0, 4)):
            values = {}
            for a in attrs:
                if a.is_categorical:
                    values[a.name] = rng.choice(a.domain)
                else:
                    values[a.name] = rng.randint(0, 10)
            labeled.append(_obj(k, **values))
        try:
            out.append(ls.build_context(schema, labeled))
        except LatticeDomainError:
            pass
    return out


def test_order_laws_on_random_contexts():
    rng = random.Random(7)
    for ctx in _random_ctxs(25, seed=1):
        universe = materialize_py(ctx)
        sample = [rng.choice(universe) for _ in range(12)]
        elements = [from_py(ctx, x) for x in sample]
        for a, pa in zip(elements, sample):
            assert ls.leq(a, a)
            for b, pb in zip(elements, sample):
                assert ls.leq(a, b) == leq_py(pa, pb)
                if ls.leq(a, b) and ls.leq(b, a):
                    assert a == b
                for c in elements:
                    if ls.leq(a, b) and ls.leq(b, c):
                        assert ls.leq(a, c)


def test_join_meet_are_bounds_on_random_contexts():
    rng = random.Random(13)
    for ctx in _random_ctxs(12, seed=2):
        universe = [from_py(ctx, x) for x in materialize_py(ctx)] + [ls.bottom(ctx)]
        for _ in range(6):
            a, b = rng.choice(universe), rng.choice(universe)
            j, m = ls.join(a, b), ls.meet(a, b)
            assert ls.leq(a, j) and ls.leq(b, j)
            assert ls.leq(m, a) and ls.leq(m, b)
            for x in universe:
                if ls.leq(a, x) and ls.leq(b, x):
                    assert ls.leq(j, x)
                if ls.leq(x, a) and ls.leq(x, b):
                    assert ls.leq(x, m)


# --- successors --------------------------------------------------------------


def test_successors_cat_example():
    ctx = _cat_ctx("N", "S", "L")
    n = from_py(ctx, (frozenset({0}),))
    succ = {to_py(s) for s in ls.successors(ctx, n)}
    assert succ == {(frozenset({0, 1}),), (frozenset({0, 2}),)}


def test_successors_of_top_empty(six_ctx):
    assert ls.successors(six_ctx, ls.top(six_ctx)) == []


def test_successors_product_example(six_ctx):
    e = from_py(six_ctx, (frozenset({0, 1}), (5, 5)))  # <{N,S},[24,24]>
    got = {format_element(s) for s in ls.successors(six_ctx, e)}
    assert got == {
        "<{NoStyle,Stride,Logo}, [24,24]>",
        "<{NoStyle,Stride}, (22,24]>",
        "<{NoStyle,Stride}, [24,31)>",
    }


def test_successors_of_bottom_rejected(six_ctx):
    with pytest.raises(LatticeDomainError):
        ls.successors(six_ctx, ls.bottom(six_ctx))


def test_successors_match_materialized_definition():
    rng = random.Random(5)
    for ctx in _random_ctxs(15, seed=3):
        universe = materialize_py(ctx)
        for x in rng.sample(universe, min(6, len(universe))):
            got = {to_py(s) for s in ls.successors(ctx, from_py(ctx, x))}
            assert got == set(successors_py(universe, x))


# --- element difference ------------------------------------------------------


def test_element_diff_motivating_example(six_ctx, six_atoms):
    out = ls.element_diff(six_ctx, ls.top(six_ctx), six_atoms["pi3"])
    assert {format_element(e) for e in out} == {
        "<{NoStyle,Stride}, [0,100]>",
        "<{NoStyle,Stride,Logo}, [0,24)>",
        "<{NoStyle,Stride,Logo}, (24,100]>",
    }


def test_element_diff_short_circuits_when_not_covered(six_ctx, six_atoms):
    a = six_atoms["pi7"]
    out = ls.element_diff(six_ctx, a, six_atoms["pi3"])
    assert out == [a]


def test_element_diff_self_is_empty(six_ctx, six_atoms):
    a = six_atoms["pi3"]
    assert ls.element_diff(six_ctx, a, a) == []


def test_element_diff_requires_atom(six_ctx, six_atoms):
    with pytest.raises(LatticeDomainError, match="atomic"):
        ls.element_diff(six_ctx, ls.top(six_ctx), ls.top(six_ctx))
    with pytest.raises(LatticeDomainError):
        ls.element_diff(six_ctx, ls.bottom(six_ctx), six_atoms["pi3"])


def test_element_diff_sound_and_complete_exhaustive(six_ctx, six_atoms):
    universe = materialize_py(six_ctx)
    atoms = [to_py(a) for a in six_atoms.values()]
    for a_py in universe:
        a = from_py(six_ctx, a_py)
        for b_py in atoms:
            b = from_py(six_ctx, b_py)
            out = [to_py(e) for e in ls.element_diff(six_ctx, a, b)]
            if not leq_py(b_py, a_py):
                assert out == [a_py]
                continue
            # soundness: every child below a, excluding b
            for m in out:
                assert leq_py(m, a_py) and not leq_py(b_py, m)
            # completeness: every feasible x is under some child
            for x in universe:
                if leq_py(x, a_py) and not leq_py(b_py, x):
                    assert any(leq_py(x, m) for m in out)


def test_element_diff_matches_definition_oracle():
    rng = random.Random(23)
    for ctx in _random_ctxs(10, seed=4):
        universe = materialize_py(ctx)
        atoms = [
            x
            for x in universe
            if all(
                (len(c) == 1 if isinstance(c, frozenset) else c[0] == c[1]) for c in x
            )
        ]
        if not atoms:
            continue
        for _ in range(5):
            a_py = rng.choice(universe)
            b_py = rng.choice(atoms)
            got = {to_py(e) for e in ls.element_diff(ctx, from_py(ctx, a_py), from_py(ctx, b_py))}
            if not leq_py(b_py, a_py):
                assert got == {a_py}
            else:
                assert got == set(element_diff_py(universe, a_py, b_py))


# --- lattice size and materialization ----------------------------------------


def test_lattice_size_examples(six_ctx):
    assert ls.lattice_size(_cat_ctx("N", "S", "L")) == 8
    assert ls.lattice_size(_num_ctx([24])) == 7
    assert ls.lattice_size(six_ctx) == 1 + 7 * 66


def test_lattice_size_vehicle_schema_exact():
    schema = load_default_schemas("vehicle")["Vehicle"]
    ctx = ls.build_context(schema, ())
    assert ls.lattice_size(ctx) == 1_046_530 == 1 + (2**10 - 1) ** 2


def test_lattice_size_agrees_with_enumeration():
    for ctx in _random_ctxs(20, seed=6):
        assert ls.lattice_size(ctx) == len(materialize_py(ctx)) + 1
        rows = materialize(ctx)
        assert rows.shape[0] == ls.lattice_size(ctx) - 1


def test_materialize_rows_unique_and_canonical():
    for ctx in _random_ctxs(8, seed=8):
        rows = materialize(ctx)
        assert unique_rows(rows).shape == rows.shape
        assert {to_py(element_from_row(ctx, rows[i])) for i in range(rows.shape[0])} == set(
            materialize_py(ctx)
        )


def test_materialize_cap_enforced():
    schema = load_default_schemas("vehicle")["Vehicle"]
    ctx = ls.build_context(schema, ())
    with pytest.raises(ContextTooLargeError):
        materialize(ctx, cap=1000)


def test_size_cap_env_override(monkeypatch):
    ctx = _cat_ctx("a", "b", "c")  # 8 elements
    monkeypatch.setenv("LATTICE_SELECT_SIZE_CAP", "4")
    with pytest.raises(ContextTooLargeError):
        materialize(ctx)
    monkeypatch.setenv("LATTICE_SELECT_SIZE_CAP", "100")
    assert materialize(ctx).shape[0] == 7
    monkeypatch.setenv("LATTICE_SELECT_SIZE_CAP", "soon")
    with pytest.raises(ValueError):
        materialize(ctx)


def test_domain_cap_rejected():
    domain = tuple(f"s{i}" for i in range(64))
    with pytest.raises(Exception, match="63"):
        _cat_ctx(*domain)


def test_join_rows_matches_pairwise(six_ctx, six_atoms):
    atoms = list(six_atoms.values())
    rows = stack_rows(atoms)
    fold = atoms[0]
    for a in atoms[1:]:
        fold = ls.join(fold, a)
    assert element_from_row(six_ctx, join_rows(six_ctx, rows)) == fold


def test_format_element(six_ctx):
    e = from_py(six_ctx, (frozenset({0, 1}), (4, 10)))
    assert format_element(e) == "<{NoStyle,Stride}, (22,100]>"
    assert format_element(ls.bottom(six_ctx)) == "<bottom>"
