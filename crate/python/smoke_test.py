#!/usr/bin/env python3
"""Smoke test for the hurwitz_py extension module.

Build the module first:

    cargo build -p hurwitz-py            # or --release

then run:

    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    """Copy the built cdylib under its importable name and import it."""
    for profile in ("release", "debug"):
        built = REPO / "target" / profile / "libhurwitz_py.so"
        if built.exists():
            staging = Path(tempfile.mkdtemp(prefix="hurwitz_py_"))
            shutil.copy(built, staging / "hurwitz_py.so")
            sys.path.insert(0, str(staging))
            import hurwitz_py

            return hurwitz_py
    sys.exit("build the extension first: cargo build -p hurwitz-py")


def main():
    hz = load_module()

    # Datum parsing and canonical form.
    d = hz.Datum("(2^7,4 | 3^6 | 3^6)")
    assert str(d) == "(4,2^7 | 3^6 | 3^6) n=18 g=0", str(d)
    assert (d.n, d.genus, d.q) == (18, 0, 3)
    assert d.partitions()[0] == [4, 2, 2, 2, 2, 2, 2, 2]

    # Certificate cascade: a non-realizable datum with a divisibility proof.
    verdict = hz.check("(2^7,4 | 3^6 | 3^6)")
    assert verdict["verdict"] == "non-realizable", verdict
    assert verdict["certificate"]["kind"] == "t0-divisibility", verdict
    assert hz.verify_certificate(verdict["datum"], verdict["certificate"])

    # A realizable datum with an explicit witness.
    verdict = hz.check("(5 | 5)")
    assert verdict["verdict"] == "realizable" and "witness" in verdict, verdict

    # Exhaustive search agrees on the classical small non-realizable datum.
    verdict = hz.oracle("(2,2 | 2,2 | 1,3)")
    assert verdict["verdict"] == "non-realizable", verdict

    # Enumeration and generators.
    data = hz.enumerate_data(4)
    assert len(data) == 14, len(data)
    thd = hz.gen_series("thd", [2])
    assert str(thd) == "(3,1 | 2^2 | 2^2) n=4 g=0", str(thd)
    prop = hz.gen_prop(2, 3, 3, 3)
    assert str(prop) == "(4,2^7 | 3^6 | 3^6) n=18 g=0", str(prop)

    # Combinatorial maps.
    triangle = "v: 1 2\nv: 3 4\nv: 5 6\ne: 2 3\ne: 4 5\ne: 6 1\n"
    assert str(hz.map_datum(triangle)) == "(3^2 | 2^3 | 2^3) n=6 g=0"
    report = hz.graph_hypotheses(triangle, 3, 2)
    assert report["consistent"] is True, report

    # Polynomial covering data.
    assert hz.verify_covering(hz.dihedral_covering(7))
    assert hz.verify_covering(hz.tetrahedral_covering())

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
