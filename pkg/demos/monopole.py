"""The Dirac monopole as a U(1) bundle over the sphere.

Two hemispheres carry their own potential, glued along the equator by the
transition function exp(i k phi).  That gluing only closes up when k is an
integer, which is the charge quantisation condition.
"""
import numpy as np

from gaugekit import atlas, gauge, transport

for k in (-2, -1, 0, 1, 2, 0.5):
    report = atlas.validate_cocycle(atlas.monopole_cocycle(k), samples=2000)
    verdict = "consistent" if report.passed else "inconsistent"
    print(f"k = {k:>4}: gluing is {verdict} (periodicity violation {report.periodicity_violation:.1e})")

print()
for k in (1, 2):
    w = gauge.connection("monopole", k=k)
    hol = transport.holonomy(w, transport.loop("equator", chart="N"))
    # Flux through the northern cap: the curvature is -i k/2 sin(theta) dtheta dphi.
    flux = -1j * k / 2 * 2 * np.pi
    print(f"k = {k}: equatorial holonomy {complex(hol[0, 0]):.6f}, exp(-flux) = {complex(np.exp(-flux)):.6f}")

w = gauge.connection("monopole", k=1)
x = np.array([np.pi / 2, 0.7])
print(f"\npotentials agree on the overlap to {gauge.overlap_residual(w, 'N', 'S', x):.1e}")
