import numpy as np
import pytest

from icpmaps import serialize
from icpmaps.algebra import Algebra, MatrixOverAlgebra, random_element
from icpmaps.errors import SpecFormatError
from icpmaps.factory import noninvariant_block_example, point_evaluation_example, trace_example
from icpmaps.gram import build_gram
from icpmaps.stinespring import dilate, verify_dilation


def test_algebra_roundtrip():
    alg = Algebra([2, 1])
    again = serialize.algebra_from_json(serialize.algebra_to_json(alg))
    assert again == alg


def test_algebra_rejects_bad_blocks():
    for bad in ({}, {"blocks": []}, {"blocks": [0]}, {"blocks": "x"}, [1]):
        with pytest.raises(SpecFormatError):
            serialize.algebra_from_json(bad)


def test_element_roundtrip(rng):
    alg = Algebra([2, 1])
    x = random_element(alg, rng)
    again = serialize.element_from_json(alg, serialize.element_to_json(x))
    assert x.allclose(again, atol=0)


def test_matrix_over_algebra_roundtrip(rng):
    alg = Algebra([1, 1])
    x = MatrixOverAlgebra(alg, rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2)))
    again = serialize.matrix_over_algebra_from_json(serialize.matrix_over_algebra_to_json(x))
    assert np.array_equal(x.coords, again.coords)


def test_map_roundtrip():
    phi = trace_example(2)
    again = serialize.map_from_json(serialize.map_to_json(phi))
    assert np.array_equal(phi.coeffs, again.coeffs)
    assert again.algebra == phi.algebra


def test_block_roundtrip():
    block = noninvariant_block_example()
    again = serialize.block_from_json(serialize.block_to_json(block))
    assert again.n == 2
    for i in range(2):
        for j in range(2):
            assert np.array_equal(block.entries[i][j].coeffs, again.entries[i][j].coeffs)


def test_map_spec_shape_validation():
    spec = serialize.map_to_json(point_evaluation_example(2))
    spec["coeffs"] = spec["coeffs"][0]  # arity now wrong
    with pytest.raises(SpecFormatError):
        serialize.map_from_json(spec)
    spec2 = serialize.map_to_json(point_evaluation_example(2))
    del spec2["k"]
    with pytest.raises(SpecFormatError):
        serialize.map_from_json(spec2)


def test_load_map_spec_dispatch():
    assert serialize.load_map_spec({"kind": "trace", "n": 2}).h == 2
    block = serialize.load_map_spec(serialize.block_to_json(noninvariant_block_example()))
    assert block.n == 2
    phi = serialize.load_map_spec(serialize.map_to_json(point_evaluation_example(2)))
    assert phi.k == 3
    with pytest.raises(SpecFormatError):
        serialize.load_map_spec({"weird": 1})
    with pytest.raises(SpecFormatError):
        serialize.load_map_spec("not an object")


def test_triple_roundtrip():
    phi = point_evaluation_example(2)
    triple = dilate(phi)
    data = serialize.triple_to_json(triple, verify_dilation(phi, triple).to_dict())
    again = serialize.triple_from_json(data)
    assert again.kappa == triple.kappa
    assert verify_dilation(phi, again).reconstruction <= 1e-12
    for p in range(triple.m):
        assert np.allclose(triple.reps[p], again.reps[p], atol=1e-15)


def test_gram_export_contains_legend():
    gram = build_gram(point_evaluation_example(2))
    data = serialize.gram_to_json(gram)
    assert data["size"] == 4
    assert len(data["index_map"]) == 4
    assert data["index_map"][0] == {"factors": [0, 0], "slot": 0, "component": 0}
    back = serialize.matrix_from_json(data["matrix"])
    assert np.array_equal(back, gram.matrix)


def test_dumps_is_deterministic():
    payload = {"b": 1.5, "a": [1, 2], "c": {"y": 0.1, "x": -2}}
    assert serialize.dumps(payload) == serialize.dumps(dict(reversed(payload.items())))
