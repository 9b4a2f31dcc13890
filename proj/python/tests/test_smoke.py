"""Smoke test for the Python bindings; runs under plain `python`."""

import os
import sys

import hpn


def model(name):
    root = os.environ.get("HPN_MODELS", os.path.join(os.path.dirname(__file__), "..", "..", "models"))
    with open(os.path.join(root, name)) as f:
        return f.read()


def main():
    tanks3 = model("tanks3.hpn")
    assert hpn.net_class(tanks3) == "ccpn"
    assert hpn.validate(tanks3) == []

    csv = hpn.simulate_ccpn_csv(tanks3, "40")
    rows = [line.split(",") for line in csv.strip().splitlines()]
    assert rows[0][0] == "time"
    assert ["10", "15", "0", "95"] in rows
    assert ["40", "0", "0", "320"] in rows

    graph = hpn.evolution_graph_json(tanks3, "40")
    assert graph.count('"start"') == 3

    delem = model("tanks3_delem.hpn")
    assert hpn.check_equivalence(delem, "30", "earliest") is None
    assert hpn.check_equivalence(delem, "30", "latest") is None

    ha = hpn.translate_json(delem)
    assert '"format": "hpn-ha"' in ha

    traj, events = hpn.simulate_hybrid_csv(delem, "30", "latest")
    assert "discrete-fire" not in events

    onetank = model("onetank.hpn")
    vcsv = hpn.simulate_vcpn_csv(onetank, 2.0)
    last = vcsv.strip().splitlines()[-1].split(",")
    assert abs(float(last[1]) - 0.8646647167633873) < 1e-6

    print("python smoke: ok")


if __name__ == "__main__":
    sys.exit(main())
