"""Field equations for a non-abelian connection.

A constant su(2) potential A = a dx + b dy has curvature [a, b] but is not a
vacuum solution: its Yang-Mills current is built from nested brackets.  The
current is then covariantly conserved, whatever the connection.
"""
import numpy as np

from gaugekit import fields, gauge, geometry, lie
from gaugekit.gauge import VolumeData

G = lie.SU2()
a, b = G.basis[0], G.basis[1]
w = gauge.connection("constant_su2")
E4 = geometry.euclidean(4)
x = np.zeros(4)

F = gauge.curvature_form(w, w.charts[0], x)
print("F_xy matches [a, b]:", np.allclose(F[0, 1], lie.bracket(a, b)))

J = fields.brute_force_yang_mills_current(w, E4, x)
print("J_x matches [b, [a, b]]:", np.allclose(J[0], lie.bracket(b, lie.bracket(a, b))))
print("J_y matches -[a, [a, b]]:", np.allclose(J[1], -lie.bracket(a, lie.bracket(a, b))))

vol = VolumeData(E4)
res = fields.yang_mills_residual(w, vol, lambda y: fields.brute_force_yang_mills_current(w, E4, y), x, fd_step=1e-4)
print(f"Yang-Mills residual with that current: {res:.1e}")

# Conservation on a less symmetric connection, with the step halved twice.
poly = gauge.connection("poly_su2_r4")
mink = VolumeData(geometry.minkowski(4))
p = np.array([0.1, -0.2, 0.3, 0.05])
for h in (2e-3, 1e-3, 5e-4):
    Jp = fields.yang_mills_field(mink, poly, fd_step=h)
    print(f"fd step {h:.0e}: covariant divergence of the current {fields.charge_conservation_residual(poly, mink, Jp, p, fd_step=h):.2e}")

# The action density does not see gauge transformations.
tau = gauge.smooth_gauge(poly.cocycle, np.random.default_rng(1))
wt = gauge.gauge_transform(poly, tau)
print(f"\naction density {fields.ym_action_density(poly, mink, p):+.10f}")
print(f"after a gauge   {fields.ym_action_density(wt, mink, p):+.10f}")
