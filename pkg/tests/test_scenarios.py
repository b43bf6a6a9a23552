import pytest

from cascadeho.autonomous import (
    AutonomousData,
    block_differential,
    validate_data,
)
from cascadeho.errors import InputError, SquareNonzero, UnknownFixture
from cascadeho.mbs import MorseBottSystem, validate_system
from cascadeho.morphisms import MorphismData, validate_morphism
from cascadeho.scenarios import (
    CORRUPTION_CLASSES,
    all_mutations,
    fixture,
    fixture_names,
    mutations,
    period_doubling,
    prequantization,
)


def test_registry_contents():
    names = fixture_names()
    assert "one-interval" in names and "trivial-cobordism" in names
    with pytest.raises(UnknownFixture):
        fixture("does-not-exist")


def test_fixtures_are_deterministic():
    import cascadeho.serialize as serialize

    for name in fixture_names():
        assert serialize.dumps(fixture(name).payload) == serialize.dumps(
            fixture(name).payload
        )


def test_prequantization_shape():
    data = prequantization(2, 3, 1)
    assert len(data.orbits) == 6  # p, r, 4 saddles
    assert data.extra[(("check", "p"), ("hat", "r"))] == 3
    assert data.orbits["p"].homotopy_class == "1G"
    assert prequantization(1, 1, 2).extra[(("check", "p"), ("hat", "r"))] == 2


def test_prequantization_validates_over_grid():
    for g in (1, 2, 3):
        for e in (1, 2, 3):
            for d in (1, 2, 3, 4):
                data = prequantization(g, e, d)
                assert validate_data(data) == [], (g, e, d)
                block_differential(data)


def test_prequantization_rejects_nonpositive():
    with pytest.raises(InputError):
        prequantization(0, 1, 1)


def test_period_doubling_sides():
    minus = period_doubling("minus")
    assert list(minus.orbits) == ["E1"] and minus.orbits["E1"].d == 2
    plus = period_doubling("plus", 3)
    assert not plus.orbits["H1"].good and plus.orbits["e2"].good
    with pytest.raises(InputError):
        period_doubling("sideways")
    with pytest.raises(InputError):
        period_doubling("plus", 4)
    assert period_doubling("plus", 4, allow_even=True).extra[
        (("hat", "H1"), ("hat", "e2"))
    ] == 4


def _is_rejected(mutation):
    payload = mutation.payload
    if mutation.expect == "square-nonzero":
        try:
            block_differential(payload)
        except SquareNonzero:
            return True
        return False
    if isinstance(payload, MorseBottSystem):
        codes = {v.code for v in validate_system(payload)}
    elif isinstance(payload, AutonomousData):
        codes = {v.code for v in validate_data(payload)}
    else:
        assert isinstance(payload, MorphismData)
        codes = {v.code for v in validate_morphism(payload)}
    return mutation.expect in codes


def test_every_mutation_is_rejected():
    corpus = all_mutations()
    assert corpus
    for mutation in corpus:
        assert _is_rejected(mutation), (mutation.fixture, mutation.cls)


def test_mutation_corpus_covers_all_classes():
    seen = {m.cls for m in all_mutations()}
    assert seen == set(CORRUPTION_CLASSES)


def test_mutations_do_not_alter_the_fixture():
    base = fixture("one-interval")
    before = {pair: len(points) for pair, points in base.payload.m0.items()}
    mutations("one-interval")
    after = fixture("one-interval")
    assert {p: len(pts) for p, pts in after.payload.m0.items()} == before
    assert validate_system(after.payload) == []
