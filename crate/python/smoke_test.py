#!/usr/bin/env python3
"""Smoke test for the percolab_py extension module.

Builds the cdylib with cargo, loads it, and checks a handful of exactly
known values end to end. Run from anywhere:

    python3 python/smoke_test.py [--release]
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build(release: bool) -> Path:
    cmd = ["cargo", "build", "-p", "percolab-py"]
    profile = "debug"
    if release:
        cmd.append("--release")
        profile = "release"
    subprocess.run(cmd, cwd=ROOT, check=True)
    lib = ROOT / "target" / profile / "libpercolab_py.so"
    if not lib.exists():  # macOS fallback
        lib = ROOT / "target" / profile / "libpercolab_py.dylib"
    if not lib.exists():
        sys.exit(f"built library not found under target/{profile}")
    return lib


def load_module(lib: Path):
    ext = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    tmp = Path(tempfile.mkdtemp(prefix="percolab_py_"))
    shutil.copy2(lib, tmp / f"percolab_py{ext}")
    sys.path.insert(0, str(tmp))
    import percolab_py  # noqa: E402

    return percolab_py


def approx(a: float, b: float, tol: float = 1e-10) -> bool:
    return abs(a - b) <= tol


def main() -> None:
    release = "--release" in sys.argv
    lab = load_module(build(release))
    checks = 0

    def ok(name: str, cond: bool) -> None:
        nonlocal checks
        if not cond:
            sys.exit(f"FAIL {name}")
        checks += 1
        print(f"PASS {name}")

    # Lattice constructors and counts.
    rect = lab.Lattice.rectangle(2, 1)
    ok("rectangle counts", (rect.vertex_count, rect.edge_count) == (6, 7))
    box = lab.Lattice.box(3, 1)
    ok("box counts", (box.vertex_count, box.edge_count) == (27, 54))
    hexa = lab.Lattice.hexagon(2)
    ok("hexagon counts", (hexa.vertex_count, hexa.edge_count) == (24, 30))
    ok("describe mentions kind", '"kind":"square"' in rect.describe().replace(" ", ""))

    # Exactly known constants.
    ok("self-dual point q=2", approx(lab.self_dual_point(2.0), 0.5857864376269049))
    ok("self-dual crossing", approx(lab.crossing_probability_exact(2, 1, 0.5), 0.5, 1e-12))
    ok("unit square crossing", approx(lab.crossing_probability_exact(1, 1, 0.5), 0.75, 1e-12))
    p_star, q_star = lab.fk_dual(0.5, 2.0)
    ok("dual parameters", approx(p_star, 2.0 / 3.0, 1e-12) and q_star == 2.0)
    ok("beta/p round trip", approx(lab.p_of_beta(lab.beta_of_p(0.37)), 0.37, 1e-14))
    ok("x_c(1)", approx(lab.x_c(1.0), 1.0 / math.sqrt(3.0), 1e-14))
    ok("sigma(1)", approx(lab.sigma(1.0), 0.5, 1e-14))

    # Walk counts and the parafermionic identity.
    ok("SAW counts", lab.count_saw(6) == [3, 6, 12, 24, 48, 90])
    ok("contour integrals vanish", lab.max_contour_integral(1.0) < 1e-10)
    ok("off-critical does not vanish", lab.max_contour_integral(1.0, 2, 0.5) > 1e-4)

    # Coupling equivalence, exactly.
    ok("coupling TV", lab.coupling_equivalence_tv(0.4, 2) < 1e-12)

    # A few stochastic estimators with fixed seeds.
    mean, stderr = lab.crossing_probability(9, 8, 0.5, 2000, 7)
    ok("crossing MC near 1/2", abs(mean - 0.5) < 5 * stderr + 1e-9)
    mean2, _ = lab.crossing_probability(9, 8, 0.5, 2000, 7)
    ok("crossing MC deterministic", mean == mean2)
    curve = lab.s_curve(12, [0.40, 0.45, 0.50, 0.55, 0.60], 2000, 11)
    ok("s-curve monotone", all(
        a[1] <= b[1] for a, b in zip(curve["rows"], curve["rows"][1:])
    ))
    sample = lab.Lattice.rectangle(4, 4).sample(1.0, 3)
    ok("full config is one cluster", sample == (40, 1, True))

    print(f"\nsmoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
