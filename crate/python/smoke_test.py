#!/usr/bin/env python3
"""Smoke test for the dmf Python extension.

Build the extension first:

    cargo build -p dmf-py --release

The script copies target/release/libdmf.so next to itself as dmf.so (the
import name must match the module), imports it, and exercises the main
entry points against known exact values.
"""

import json
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    candidates = [
        os.environ.get("DMF_LIB"),
        os.path.join(ROOT, "target", "release", "libdmf.so"),
        os.path.join(ROOT, "target", "debug", "libdmf.so"),
    ]
    src = next((c for c in candidates if c and os.path.exists(c)), None)
    if src is None:
        sys.exit("libdmf.so not found; run `cargo build -p dmf-py --release` first")
    tmp = tempfile.mkdtemp(prefix="dmf-py-")
    shutil.copy(src, os.path.join(tmp, "dmf.so"))
    sys.path.insert(0, tmp)
    import dmf  # noqa: E402

    return dmf


def main():
    dmf = load_module()

    # Carlitz coefficients of T^2 over F_2: (T^2, T^2 + T, 1)
    ctx2 = dmf.Context(2, m=2, e=1, prec=160)
    assert ctx2.carlitz("T^2") == ["0,0,1", "0,1,1", "1"]
    assert ctx2.bracket("T", 1) == "0,1,1"
    assert ctx2.d_factor(0) == "1"

    # series arithmetic: T * T^-1 == 1 exactly
    t = ctx2.parse("T")
    one = ctx2.parse("1")
    assert t * t.inverse() == one
    assert t.log() == "1/1"

    # chamber combinatorics: the multiset over the origin in rank 3
    ctx3 = dmf.Context(3, m=3, e=1, prec=160)
    assert ctx3.insep_multiset(["0", "0", "0"], 6) == [
        "0/1", "0/1", "0/1", "1/1", "1/1", "1/1",
    ]
    assert ctx3.wk_member(["0", "0", "0"], 2)
    assert not ctx3.wk_member(["0", "0", "0"], 3)

    # W(2) atlas for rank 3, coefficients <= 3
    vs = dmf.wk_vertices(3, 2, 3)
    assert sorted(vs) == sorted([[0, 0]] + [[n, 1] for n in range(4)])

    # building map of a fundamental frame
    assert ctx2.building_map(["w*T", "1"]) == ["1/1", "0/1"]
    ok, _reason = ctx2.is_fundamental(["1", "1"])
    assert not ok

    # form profile at a frame: alpha_0 = 1 and Delta = g_2 nonzero
    profile = json.loads(ctx2.forms(["w*T", "1"], kmax=2))
    assert profile["alpha"][0]["log"] == "0/1"
    assert profile["g"][2]["log"] is not None

    # the direct Eisenstein sum at weight q - 1 is congruent to -1 off the
    # last wall: E + 1 is small
    e1 = ctx2.eisenstein(["w*T", "1"], k=1, d=3)
    shifted = e1 + one
    num, den = shifted.log().split("/")
    assert int(num) < 0 < int(den)

    # Newton polygon of the span of {1, w}: two tied slopes at 0
    np_data = json.loads(ctx2.newton_polygon(["1", "w"]))
    assert np_data["spectrum"] == ["0/1", "0/1"]

    # a fast verification suite end to end
    passed, report = ctx2.verify("carlitz-valuations", seed=7)
    assert passed, report
    assert "carlitz-valuations" in dmf.suites()

    print("smoke test OK")


if __name__ == "__main__":
    main()
