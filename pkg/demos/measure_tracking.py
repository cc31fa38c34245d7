"""Reprojection gaps, occlusion and look-alike targets in the tracking simulator."""
import numpy as np

from brickphase.metrics import ViewpointSet
from brickphase.samples import tower
from brickphase.tracking import CameraModel, Pose, TrackerParams, recognize, reprojection_gap, rotation_z

camera = CameraModel(focal_px=1400)  # 1792 x 828 screen, centred principal point
block = np.array([[[-125, -125, 0], [125, 125, 50]]], dtype=float)  # 100 x 100 x 20 mm in LDU
true = Pose(np.eye(3), (0, 0, 300))

print("same pose:", reprojection_gap(true, true, camera, block))
for dx in (0.25, 0.5, 1.0, 2.0):
    gap = reprojection_gap(true, Pose(np.eye(3), (dx, 0, 300)), camera, block)
    print(f"shift {dx:4.2f} mm -> mean {gap.mean_px:.3f} px, max {gap.max_px:.3f} px")
for deg in (0.01, 0.04, 0.2, 1.0):
    gap = reprojection_gap(true, Pose(rotation_z(deg), (0, 0, 300)), camera, block)
    print(f"turn {deg:4.2f} deg -> max {gap.max_px:.3f} px")

parts = list(tower(20))
params = TrackerParams()
for fraction in (0.0, 0.5, 0.66, 0.7, 0.9):
    print(f"occluded {fraction:.2f}:", recognize(10, [(2, 10)], parts, params, occlusion_fraction=fraction))

# targets 19 and 20 bricks tall look nearly alike from the front
front = ViewpointSet.named("front")
print("twin prefixes:", recognize(20, [(2, 19), (3, 20)], parts, views=front))
print("distinct prefixes:", recognize(14, [(2, 10), (3, 16)], parts, TrackerParams(theta_iou=0.3), views=front))
print("too far back:", recognize(20, [(2, 1)], parts, TrackerParams(t_max=5)))
