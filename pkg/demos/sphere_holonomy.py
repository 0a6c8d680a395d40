"""Carry a tangent vector around a geodesic triangle on the unit sphere.

The triangle joins the north pole to two points on the equator a quarter turn
apart, so it encloses one eighth of the sphere.  On a surface of constant
curvature 1 the vector comes back rotated by the enclosed area.
"""
import numpy as np

from gaugekit import dynamics, geometry, transport

g = geometry.sphere()

# Curvature first: the scalar curvature of the unit sphere is 2 everywhere.
for theta in (0.4, 1.2, 2.5):
    S = geometry.riemann_curvature(g, np.array([theta, 0.3]), fd_step=1e-5).scalar
    print(f"scalar curvature at theta={theta}: {S:.8f}")

# Now the triangle.
tri = transport.loop("octant_triangle")
v0 = np.array([1.0, 0.0])
res = transport.parallel_transport_vector(transport.LeviCivita(g), tri, v0, steps_per_unit=250, verify=True)
angle = transport.tangent_rotation_angle(g, tri.start, v0, res.value)

print(f"\ntriangle perimeter: {tri.length:.6f} (three quarter circles: {1.5 * np.pi:.6f})")
print(f"rotation after one lap: {angle:+.8f} rad")
print(f"enclosed area:          {np.pi / 2:+.8f}")
print(f"length drift: {res.norm_drift:.2e}, change under step halving: {res.step_halving_change:.2e}")

# A great circle is a closed geodesic with period 2 pi.  Start on the equator
# heading north-east so the path stays clear of the poles.
x0, v0 = np.array([np.pi / 2, 0.0]), np.array([0.6, 0.8])
traj = dynamics.geodesic_integrate(g, x0, v0, (0.0, 2 * np.pi), 800)
d = traj.x[-1] - x0
d[1] = (d[1] + np.pi) % (2 * np.pi) - np.pi
print(f"\ngreat circle returns to the start within {np.abs(d).max():.2e}")
