"""Which orders keep a build in one grounded piece."""
import itertools

from brickphase import contact_graph, precedence_graph
from brickphase.samples import bridge, pyramid
from brickphase.stability import prefix_feasible
from brickphase.sequencer import NoFeasibleOrderError, order_steps

m = bridge()
cg = contact_graph(m)
prec = precedence_graph(m, cg)
ok = [o for o in itertools.permutations(range(1, 6)) if prefix_feasible(m, cg, o).feasible]
print("bridge orders that stay in one piece:", ok)
print("any of them bottom-up?", any(prec.is_topological(o) for o in ok))
print("pier, other pier:", prefix_feasible(m, cg, [1, 3, 2, 4, 5]).first_violation)
print("deck first:", prefix_feasible(m, cg, [5, 1, 2, 3, 4]).first_violation)

try:
    order_steps(m, prec, cg)
except NoFeasibleOrderError as exc:
    print("sequencer:", exc)

# rows on a base plate are fine: the plate ties them together
p = pyramid(base_plate=True)
cg = contact_graph(p)
print("plated pyramid:", order_steps(p, precedence_graph(p, cg), cg))
