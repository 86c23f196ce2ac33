"""Smoke test for the rudiset extension module.

Build and run from the workspace root:

    cargo build -p rudiset-python --release --features extension-module
    cp target/release/librudiset.so python/rudiset.so
    python3 python/smoke_test.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import rudiset
from rudiset import Hf, Theory


def main():
    rst = Theory()
    assert rst.config.startswith("rst"), rst.config

    assert rst.is_valid("{x in t | ~(x = a)}")
    assert not rst.is_valid("{x | ~(x in y)}")
    report = rst.check("{x | ~(x in y)}")
    assert not report["valid"] and report["violations"], report

    assert rst.is_safe("x in a", ["x"])
    assert not rst.is_safe("~(x in a)", ["x"])
    assert rst.derive("x in a", ["x"]) is not None
    assert rst.explain_failure("~(x in a)", ["x"]) is not None
    assert ["x"] in rst.safe_sets("x in a")

    assert rst.kind("{a, b}") == "term"
    assert rst.kind("a in b") == "formula"

    two = Hf.nat(2)
    assert two.as_nat() == 2 and len(two) == 2 and Hf.nat(1) in two
    assert Hf("{{}}") == Hf.nat(1)
    p = Hf.pair(Hf.nat(1), Hf.nat(3))
    assert p.as_pair() == (Hf.nat(1), Hf.nat(3))
    assert len({Hf.nat(2), Hf("{{}, {{}}}")}) == 1
    assert Hf.nat(1).issubset(two) and two.difference(Hf.nat(1)) == Hf.set([Hf.nat(1)])

    got = rst.eval("s cup t", {"s": Hf.nat(2), "t": Hf.nat(3)})
    assert got == Hf.nat(3), got
    assert rst.eval("a in b", {"a": Hf.nat(1), "b": Hf.nat(2)}) is True
    sep = rst.eval("{x in s | ~(x = a)}", {"s": Hf.nat(3), "a": Hf.nat(1)})
    assert sep == Hf.set([Hf.nat(0), Hf.nat(2)]), sep

    rst.define("def twice(s) := s cup s")
    assert rst.eval("twice(s)", {"s": Hf.nat(4)}).as_nat() == 4
    assert "cup" not in rst.expand("twice(s)")

    try:
        rst.eval("{x | ~(x in y)}", {"y": Hf()})
        raise AssertionError("expected InvalidExpression")
    except rudiset.InvalidExpression:
        pass
    try:
        rst.eval("s cup t", {"s": Hf()})
        raise AssertionError("expected UnboundVariable")
    except rudiset.UnboundVariable:
        pass
    try:
        rst.is_valid("{x |")
        raise AssertionError("expected SyntaxError")
    except rudiset.SyntaxError as e:
        assert isinstance(e, rudiset.RudisetError)

    pzf = Theory("pzf", budget=1000)
    assert pzf.budget == 1000
    assert pzf.is_valid("TC[x, y](y in x)(g, h)")
    try:
        pzf.eval("{y | exists x. x = 0 & TC[x, y](y = {z | z = x | z in x})(x, y)}")
        raise AssertionError("expected a runaway evaluation to stop")
    except (rudiset.BudgetExceeded, rudiset.NotEvaluable):
        pass

    print("smoke test ok")


if __name__ == "__main__":
    main()
