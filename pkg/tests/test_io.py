import numpy as np
import pytest

from eatonchain.finite_model import FiniteModel
from eatonchain.io import (ParseError, dumps_kernel, dumps_model,
                           load_distribution, loads_kernel, loads_model,
                           parse_sections)
from eatonchain.kernel import TransitionKernel
from eatonchain.testing import random_model

GOOD = """\
; two-point model
#theta
a 1.0
b 3   ; trailing comment
#x
u
v
#P
0.5 0.5
0.25 0.75
"""


def test_parse_good_model():
    model = loads_model(GOOD)
    assert model.theta_labels == ("a", "b")
    assert model.x_labels == ("u", "v")
    assert model.nu.tolist() == [1.0, 3.0]
    assert model.P.tolist() == [[0.5, 0.5], [0.25, 0.75]]


@pytest.mark.parametrize("text, line, fragment", [
    (GOOD.replace("0.25 0.75", "0.25 0.7"), 10, "row 1 sums to"),
    (GOOD.replace("0.25 0.75", "0.25"), 10, "entries"),
    (GOOD.replace("b 3", "b x3"), 4, "not a number"),
    (GOOD.replace("b 3", "b"), 4, "label weight"),
    ("a 1\n" + GOOD, 1, "before the first section"),
    (GOOD + "#x\nw\n", 11, "duplicate"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        loads_model(text)
    assert info.value.line == line
    assert f":{line}:" in str(info.value)


def test_missing_section():
    with pytest.raises(ParseError, match="missing section #P"):
        loads_model(GOOD.split("#P")[0])


def test_wrong_row_count():
    with pytest.raises(ParseError, match="2 rows"):
        loads_model(GOOD.replace("#theta\n", "#theta\nc 1\n"))


def test_parse_sections_keeps_unknown_sections():
    sec = parse_sections("#foo\n1 2\n#bar\n")
    assert sec == {"foo": [(2, ["1", "2"])], "bar": []}


def test_model_round_trip_exact():
    rng = np.random.default_rng(8)
    for _ in range(50):
        model = random_model(rng)
        back = loads_model(dumps_model(model, "a comment\nspanning lines"))
        assert back.theta_labels == model.theta_labels
        assert np.array_equal(back.P, model.P)
        assert np.array_equal(back.nu, model.nu)


def test_kernel_round_trip():
    k = TransitionKernel(["a", "b"], [[0.1, 0.9], [1 / 3, 2 / 3]])
    model = FiniteModel.from_arrays(np.eye(2), [1, 2], theta_labels=["a", "b"])
    back, w = loads_kernel(dumps_kernel(k, model.theta_space))
    assert back == k and w.weights.tolist() == [1.0, 2.0]


def test_kernel_states_section_default_weights():
    k, w = loads_kernel("#states\ns\nt\n#R\n0 1\n1 0\n")
    assert w.weights.tolist() == [1.0, 1.0]
    assert k.state_labels == ("s", "t")


def test_kernel_row_error_line():
    with pytest.raises(ParseError, match="row 0 sums") as info:
        loads_kernel("#states\ns\nt\n#R\n0.5 0.4\n1 0\n")
    assert info.value.line == 5


def test_load_distribution(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("b 0.75\n; note\na 0.25\n")
    assert load_distribution(f, ["a", "b"]).tolist() == [0.25, 0.75]
    f.write_text("c 1\n")
    with pytest.raises(ParseError, match="unknown label"):
        load_distribution(f, ["a", "b"])
