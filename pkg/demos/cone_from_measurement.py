# From a single received frequency to the cone of candidate emitter
# directions: semi-angle from the fractional shift, axis from the shift
# sign, and the effect of the air's refractive index on the angle.

import math

import dopplergeo as dg

C = dg.SPEED_OF_LIGHT

vehicle = dg.VehicleState.from_attitude(
    position=dg.GeodeticCoord(-34.6462, 138.833, 2000.0),
    speed=50.0,
    attitude=dg.AttitudeEuler(roll=0.0, pitch=-30.0, yaw=190.0),
)
print("vehicle at", vehicle.position)
print("velocity direction (ECEF):", vehicle.velocity_dir.round(6))

for shift in (43.3, 49.93, 2.615, -43.3):
    m = dg.DopplerMeasurement(C + shift, C)
    cone = dg.build_cone(vehicle, m)
    cone_air = dg.build_cone(vehicle, m, n=1.0003)
    print(f"shift {shift:+8.3f} Hz -> semi-angle {math.degrees(cone.semi_angle):7.3f} deg "
          f"(in air {math.degrees(cone_air.semi_angle):7.3f} deg), "
          f"axis along {'velocity' if shift > 0 else 'reverse velocity'}")

# a 60 Hz shift at 50 m/s would need a closing speed above the wave speed
try:
    dg.build_cone(vehicle, dg.DopplerMeasurement(C + 60.0, C))
except dg.InfeasibleShift as exc:
    print("60 Hz at 50 m/s:", exc)

# zero shift degenerates to the plane normal to the velocity
plane = dg.build_cone(vehicle, dg.DopplerMeasurement(C, C))
print("zero shift -> locus kind:", plane.kind,
      "semi-angle", math.degrees(plane.semi_angle), "deg")
