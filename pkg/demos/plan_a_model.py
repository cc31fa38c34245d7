"""Turn a small brick model into an instruction plan and look at what came out."""
import tempfile
from pathlib import Path

from brickphase import contact_graph, parse_model, precedence_graph
from brickphase.plan_format import deserialize, save_plan, serialize
from brickphase.samples import l_model
from brickphase.sequencer import PrefixScorer, SequencerConfig, plan, plan_draft
from brickphase.model import serialize_model

model = l_model()
text = serialize_model(model)
print(text)

# parsing the text back gives the same model, hash included
again = parse_model(text)
print("same hash:", again.model_hash == model.model_hash)

# which parts touch, and which have to go down first
contacts = contact_graph(model)
prec = precedence_graph(model, contacts)
print(len(contacts.edges), "contacts,", len(prec.edges), "must-come-before pairs")

# default settings: up to 40 steps per phase, at least 8 bootstrap steps
config = SequencerConfig()
draft = plan_draft(model, config)
print("order:", draft.order)
print("bootstrap ends at step", draft.bootstrap_end, "phases start at", draft.boundaries)

# how each candidate prefix scores; a boundary needs low symmetry and enough outline detail
scorer = PrefixScorer(model, draft.order, config)
for k in range(config.b_min, model.part_count + 1):
    verdict = scorer.check(k + 1, None) if k < model.part_count else "-"
    print(f"  prefix {k:2d}: symmetry {scorer.symmetry(k):.3f} distinct {scorer.distinctness(k):.3f} "
          f"-> start at {k + 1}: {verdict or 'ok'}")

# a tighter tolerance forces more phases
tight = plan_draft(model, SequencerConfig(t_max=3, b_min=2, theta_sym=1.0, theta_dist=0.0, theta_conf=1.0))
print("with t_max=3 the phases start at", tight.boundaries)

# the plan file is canonical JSON; saving twice gives the same bytes
result = plan(model, config)
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "l_wall.plan.json"
    save_plan(result, path)
    data = path.read_text()
    print(len(data), "bytes, round-trips:", deserialize(data) == result, "stable:", serialize(result) == data)
