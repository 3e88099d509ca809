"""Smoke test for the qswitch_py extension.

Build and run from the repository root:
    cargo build --release -p qswitch-py --features extension-module
    cp target/release/libqswitch_py.so python/qswitch_py.so
    python3 python/smoke_test.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import qswitch_py as qs


def main():
    zi = qs.Pauli("ZI", 2)
    assert str(zi.conjugate("XX", [0, 1])) == "Y0X1"
    assert str(qs.Pauli("YX", 2).conjugate("XX", [0, 1])) == "-Z0"
    assert str(qs.Pauli("X", 1).conjugate("H", [0])) == "Z0"
    assert not qs.Pauli("X0", 2).commutes(qs.Pauli("Z0", 2))
    assert (qs.Pauli("X0", 1) * qs.Pauli("Z0", 1)) == qs.Pauli("-iY0", 1)

    stabs, lx, lz = qs.code_operators(1)
    assert [str(p) for p in lx] == ["X4X6", "X2X6", "X1X6"]
    assert [str(p) for p in lz] == ["Z0Z4", "Z0Z2", "Z0Z1"]
    assert len(stabs) == 5 and "check.1->2" in qs.catalog(1)

    names = qs.circuit_names()
    assert "ghz8-ft" in names and "grover-encoded" in names
    assert qs.circuit_text("ghz8-ft").startswith("QUBITS 9")

    rep = qs.enumerate_faults("ghz8-ft")
    assert rep["logical_failures"] == 0 and rep["sites"] == rep["detected"] + rep["benign"]
    assert qs.enumerate_faults("negative-control")["logical_failures"] > 0

    r = qs.run_experiment("grover-encoded", 0.0, 200)
    assert r["R"] == 1.0 and r["p_L"] == 0.0
    a = qs.run_experiment("switch-1to2-+++", 1e-2, 20000, seed=7)
    b = qs.run_experiment("switch-1to2-+++", 1e-2, 20000, seed=7, threads=2)
    assert a == b and 0.0 < a["R"] < 1.0

    exponent, prefactor, r2 = qs.fit_scaling([(1e-3, 7e-6), (2e-3, 2.8e-5), (4e-3, 1.12e-4)])
    assert abs(exponent - 2.0) < 1e-9 and abs(prefactor - 7.0) < 1e-6 and r2 > 0.999999

    print("smoke test passed")


if __name__ == "__main__":
    main()
