"""Smoke test for the dendro_py extension. Build it first with
`pip install --no-build-isolation -e crates/py`."""

import json

import dendro_py


def main():
    codes = dendro_py.trees(2, arity_cap=2)
    assert "|" in codes and "(|)" in codes and "((|)|)" in codes
    assert dendro_py.degree("L3") == 3

    c2 = dendro_py.Presheaf.fixture("rep", "C2")
    assert c2.counts() == [3, 1] and c2.is_normal()
    again = dendro_py.Presheaf.parse(c2.to_text())
    assert again.generators() == c2.generators()

    e = dendro_py.Presheaf.fixture("e-nerve", degree=2)
    assert e.counts() == [2, 2, 2]
    assert len(e.evaluate("L1")) == 4

    code, out = dendro_py.run(["check-ez", "--site", "omega", "--max-degree", "2", "--json"])
    report = json.loads(out)
    assert code == 0 and report["status"] == "pass"

    code, _ = dendro_py.run(["fixtures", "no-such-fixture"])
    assert code == 3

    try:
        dendro_py.Presheaf.parse("presheaf X { gen a : nope; }")
    except ValueError:
        pass
    else:
        raise AssertionError("bad shape accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
