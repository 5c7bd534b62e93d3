# Sweep the cone's surface rays against the WGS84 ellipsoid and classify
# what comes back: two separate rings, a single folded loop, a single
# grazing point, or nothing. Writes the curves as KML and GeoJSON.

import math
import os

import numpy as np

import dopplergeo as dg
from dopplergeo.geodesy import WGS84, ecef_to_geodetic_arrays

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(OUT, exist_ok=True)


def rows(points):
    lat, lon, h = ecef_to_geodetic_arrays(points)
    return np.column_stack([lat, lon, h])


vehicle = dg.VehicleState.from_attitude(
    dg.GeodeticCoord(-34.6462, 138.833, 2000.0), 50.0,
    dg.AttitudeEuler(0.0, -30.0, 190.0))

scenarios = {
    "uav_26p56deg": dg.cone_from_geometry(vehicle.position_ecef(),
                                          vehicle.velocity_dir, math.radians(26.56)),
    "uav_30deg_grazing": dg.cone_from_geometry(vehicle.position_ecef(),
                                               vehicle.velocity_dir, math.radians(30.0)),
    "satellite_nadir": dg.cone_from_geometry(
        np.array([0.0, 0.0, WGS84.b + 700e3]), np.array([0.0, 0.0, -1.0]),
        math.radians(10.0)),
    "satellite_zenith": dg.cone_from_geometry(
        np.array([0.0, 0.0, WGS84.b + 700e3]), np.array([0.0, 0.0, 1.0]),
        math.radians(45.0)),
}

for name, cone in scenarios.items():
    curve = dg.intersect_cone_ellipsoid(cone, n_samples=720)
    print(f"{name:20s} topology {curve.topology:20s} "
          f"visible {len(curve.points_near):4d}  far {len(curve.points_far):4d}")
    polylines = []
    if len(curve.points_near):
        polylines.append(("visible curve", rows(curve.points_near), dg.STYLE_ELLIPSOID))
    if len(curve.points_far):
        polylines.append(("far-side curve", rows(curve.points_far), dg.STYLE_ELLIPSOID))
    with open(os.path.join(OUT, f"{name}.kml"), "wb") as f:
        f.write(dg.write_kml(polylines, name=name))
    with open(os.path.join(OUT, f"{name}.geojson"), "wb") as f:
        f.write(dg.write_geojson(polylines))

print("curves written to", OUT)

# every returned point sits on both surfaces to rounding accuracy
cone = scenarios["uav_26p56deg"]
curve = dg.intersect_cone_ellipsoid(cone)
print("max ellipsoid residual:", dg.ellipsoid_residual(curve.points_near).max())
print("max cone residual:     ", dg.cone_surface_residual(cone, curve.points_near).max())
