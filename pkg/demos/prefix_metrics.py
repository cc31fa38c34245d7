"""How symmetric, how detailed and how alike are the partial builds."""
import numpy as np

from brickphase.metrics import ViewpointSet, confusability, distinctness_score, rasterize, symmetry_score
from brickphase.samples import _model, l_model

# two bricks side by side look the same from either end
pair = list(_model([("3001", "identity", (-40, 0, 0)), ("3001", "identity", (40, 0, 0))]))
print("mirror pair:", symmetry_score(pair))

# one more brick on the right breaks it
lopsided = pair + list(_model([("3005", "identity", (40, 24, 10))]))
print("with an extra brick:", symmetry_score(lopsided).score)

model = list(l_model())
front = ViewpointSet.named("front")
print(" k  symmetry  distinct  like-next")
for k in range(1, len(model) + 1):
    like = confusability(model[:k], model[:k + 1]) if k < len(model) else float("nan")
    print(f"{k:2d}  {symmetry_score(model[:k]).score:8.3f}  {distinctness_score(model[:k]):8.3f}  {like:9.3f}")

# the front silhouette of the finished wall, coarse enough to print
r = rasterize(model, front.directions[0], resolution=0.1)
for row in r.grid[::-1]:
    print("".join("#" if c else "." for c in row))

# a box seen straight on has no notches, so it scores zero
print("lone brick face-on:", distinctness_score(model[:1], ViewpointSet.face_on()))
print("area ratio front view:", np.mean(r.grid).round(3))
