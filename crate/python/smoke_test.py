#!/usr/bin/env python3
"""Smoke test for the geodete_py extension module.

Builds nothing itself: expects the cdylib at target/{debug,release}/
libgeodete_py.so (build with
`cargo build -p geodete-python --features extension-module`).
Copies it into a temp directory under the importable name and drives the
main types and the full certificate pipeline.
"""

import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libgeodete_py.so", "geodete_py.so", "libgeodete_py.dylib")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit(
            "libgeodete_py not found; run "
            "`cargo build -p geodete-python --features extension-module` first"
        )
    tmp = tempfile.mkdtemp(prefix="geodete_py_")
    shutil.copy2(built, pathlib.Path(tmp) / "geodete_py.so")
    sys.path.insert(0, tmp)
    import geodete_py

    return geodete_py


def main():
    g = load_module()

    # Permutations and groups.
    p = g.Permutation([1, 0, 2])
    assert p.order() == 2 and p.is_involution()
    assert p.compose(p).images() == [0, 1, 2]

    psl7 = g.Group.projective(7, "psl2")
    pgl7 = g.Group.projective(7, "pgl2")
    assert psl7.order() == 168
    assert pgl7.order() == 336
    assert pgl7.degree() == 8

    # The Klein-quartic action and its tetrahedral extensions.
    actions = g.search_epimorphisms(pgl7, (2, 3, 7))
    assert len(actions) == 1
    action = actions[0]
    assert action.genus() == 3
    assert action.orientable()
    assert action.euler_characteristic() == -4
    assert action.hurwitz_class() == "orientation_reversing_hurwitz"

    extensions = g.extend_theorem1(action)
    assert len(extensions) == 5
    assert all(e.kernel_free() for e in extensions)
    assert sorted(e.x() for e in extensions) == [3, 4, 4, 7, 7]
    chosen = min(extensions, key=lambda e: e.x())
    assert g.manifold_orientable(chosen)
    rows = g.census(chosen)
    by_labels = {tuple(labels): (total, count, per) for _, labels, total, count, per in rows}
    assert by_labels[(7, 7, 7)] == (-96, 24, -4)

    # A nonorientable action, its lift, and the double-cone route.
    pgl5 = g.Group.projective(5, "pgl2")
    nonor = g.search_epimorphisms(pgl5, (2, 4, 5))[0]
    assert not nonor.orientable()
    ext2 = g.extend_theorem2(nonor)
    assert ext2.kernel_free()
    assert not g.manifold_orientable(ext2)

    lifted, tau = g.lift_double_cover(nonor)
    assert lifted.orientable()
    assert lifted.group().order() == 2 * nonor.group().order()
    reversing, free = g.involution_analysis(lifted, tau)
    assert reversing and free

    # The job pipeline end to end, byte-deterministic.
    job = g.catalog_job("klein-pgl27")
    code_a, cert_a = g.run_job_toml(job)
    code_b, cert_b = g.run_job_toml(job)
    assert code_a == code_b == 0
    assert cert_a == cert_b
    cert = json.loads(cert_a)
    assert cert["meta"]["verified"] is True
    assert cert["action"]["genus"] == 3
    assert cert["manifold"]["orientable"] is True

    assert "klein-pgl27" in g.catalog_names()

    print("smoke test passed:", len(cert_a), "certificate bytes,")
    print(" ", len(extensions), "tetrahedral extensions, census classes:", len(rows))


if __name__ == "__main__":
    main()
