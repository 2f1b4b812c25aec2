"""Smoke test for the isotube extension module.

    pip install --no-build-isolation -e .
    python python/smoke_test.py
"""

import json
import math

import isotube


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    b = isotube.AlgebraVector(1.0, [0.0, 0.0, 0.0, 0.0], 0.0)
    z = isotube.AlgebraVector(0.0, [0.0, 0.0, 0.0, 0.0], 1.0)
    assert close(isotube.inner(isotube.complex_structure(b), z), 1.0)
    assert isotube.bracket(b, z).to_flat() == z.to_flat()
    x = isotube.AlgebraVector(0.3, [0.1, -0.2, 0.5, 0.4], -0.7)
    y = isotube.AlgebraVector(-1.1, [0.6, 0.2, -0.3, 0.9], 0.25)
    torsion = isotube.connection(x, y) - isotube.connection(y, x) - isotube.bracket(x, y)
    assert torsion.norm() < 1e-12

    mixed = isotube.NormalSubspace.preset(3, "mixed3")
    assert (mixed.n, mixed.k) == (3, 3)
    assert not isotube.classify_tube(mixed)["homogeneous"]
    plane = isotube.NormalSubspace.preset(3, "theta_plane(0.5)")
    c = isotube.classify_tube(plane)
    assert c["homogeneous"] and close(c["constant_angle"], 0.5, 1e-9)

    dec = isotube.decompose(mixed, [0.6, 0.0, 0.8, 0.0])
    assert dec.case == "interior"
    r = 1.3
    spec = isotube.tube_spectrum(mixed, [0.6, 0.0, 0.8, 0.0], r)
    assert close(spec["trace"], isotube.mean_curvature_closed(3, 3, r), 1e-9)
    roots = isotube.closed_principal_curvatures(3, 3, r, dec.phi)
    assert max(abs(a - b) for a, b in zip(spec["sorted"], roots)) < 1e-8

    s = isotube.shape_operator_w(mixed, [0.6, 0.0, 0.8, 0.0])
    assert close(sum(s[i][i] for i in range(len(s))), 0.0)

    try:
        isotube.NormalSubspace.preset(2, "mixed3")
    except ValueError:
        pass
    else:
        raise AssertionError("mixed3 must need n >= 3")

    report = json.loads(isotube.analyze('n = 3\nwperp = "mixed3"\nradii = [1.0]\nsamples = 5\n'))
    assert report["summary"]["passed"] and len(report["rows"]) == 5
    passed, _ = isotube.verify()
    assert passed
    assert math.isfinite(isotube.det_propagator_closed(4, 2, 0.5))
    print("isotube smoke test passed")


if __name__ == "__main__":
    main()
