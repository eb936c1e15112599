"""Smoke test for the j2kit Python bindings.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import json

import j2kit_py as j2


def main():
    f = j2.Formula("[0]p1 -> [0][0]p1")
    assert f.depth == 2 and f.variables == ["p1"], f

    assert j2.prove("[0]p1 -> [0][0]p1")["theorem"]
    refuted = j2.prove("[1]p1 -> [0]p1")
    assert not refuted["theorem"]
    cm = refuted["countermodel"]
    model = j2.Model.from_json(json.dumps(cm["model"]), ["p1"])
    assert not model.forces("[1]p1 -> [0]p1", cm["point"])

    chain = j2.Model.from_json(json.dumps({"worlds": [0, 1], "r0": [[0, 1]], "root": 0}))
    single = j2.Model.from_json(json.dumps({"worlds": [0], "root": 0}))
    assert not j2.bisimilar(chain, single, 1)
    assert j2.bisimilar(chain, chain)
    chi = j2.char_formula(chain, 1)
    assert chain.forces(chi) and not single.forces(chi)

    assert j2.validate_frame(json.dumps({"worlds": [0, 1], "r0": [[0, 1]], "root": 0}))["j2_ok"]

    rule = j2.admissible("<0>T", "F")
    assert rule["admissible"] and not rule["derivable"], rule

    proj = j2.projective("[0]p1 -> p1")
    assert proj["projective"] and "p1" in proj["unifier"]["images"], proj

    basis = j2.unify_basis("p1 | ~p1")
    assert basis["unifiers"], basis

    big = j2.unify_basis("p1 | [0]F")["unifiers"][0]
    names = [d["name"] for d in big["definitions"]]
    assert names and all(n.startswith("$") for n in names), big

    code, out, _ = j2.cli(["prove", "p1 -> p1", "--json"])
    assert code == 0 and json.loads(out)["verdict"] == "theorem"

    try:
        j2.Formula("p1 &")
    except j2.J2Error:
        pass
    else:
        raise AssertionError("parse error not raised")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
