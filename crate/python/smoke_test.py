"""Smoke test for the Python extension.

Build first:  cargo build --release -p quartic-lines-py --features extension-module
Then run:     python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        for name in ("libquartic_lines_py.so", "libquartic_lines_py.dylib", "quartic_lines_py.dll"):
            lib = ROOT / "target" / profile / name
            if lib.exists():
                suffix = ".pyd" if name.endswith(".dll") else ".so"
                dest = pathlib.Path(tempfile.mkdtemp()) / ("quartic_lines" + suffix)
                shutil.copy(lib, dest)
                spec = importlib.util.spec_from_file_location("quartic_lines", dest)
                mod = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(mod)
                return mod
    sys.exit("extension not built; run: cargo build --release -p quartic-lines-py --features extension-module")


def main():
    ql = load()

    f = ql.Field(4)
    a = 0x6
    assert f.mul(a, f.inv(a)) == 1
    assert f.mul(f.sqrt(a), f.sqrt(a)) == a

    s = ql.Surface.builtin("s5_mu0")
    lines = s.lines(2)
    assert len(lines) == 60, len(lines)
    assert all(len(r["entries"]) == 8 for r in lines)
    copy = ql.Surface.from_json(s.to_json(), "copy")
    assert copy.field_degree == 2

    report = s.census(ext=2, singular_ext=1)
    assert report["lattice"]["rank"] == 20
    assert report["lattice"]["discriminant"] == "-55"
    assert set(report["graph"]["valencies"]) == {17}

    lat = ql.GramLattice([[-2, 1], [1, -2]])
    assert lat.rank() == 2 and lat.discriminant() == 3

    m = ql.WeierstrassModel(1, [[1], [], [], [], [0, 0, 0, 1]], 1)
    assert m.classify("0x0")["type"] == "I3"

    assert ql.fiber_configs("psi-square-case", 21)[0] == "6I4"
    assert ql.run_verify("config-table")["passed"]
    code, out, _ = ql.run_cli(["verify", "fermat-degenerate"])
    assert code == 0 and '"passed": true' in out
    code, _, err = ql.run_cli(["lines", "--surface", "no-such-surface"])
    assert code == 2 and "unknown builtin" in err

    print("python smoke test passed")


if __name__ == "__main__":
    main()
