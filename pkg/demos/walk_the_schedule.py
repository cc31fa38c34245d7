"""Step a 386-step plan forward and back and watch the targets switch."""
from brickphase.runtime import (
    AnchorPlaced, DisableGroundPlane, DisableTarget, EnableGroundPlane, EnableTarget, Next, Prev,
    TargetRecognized, TrackingLost, apply, init,
)
from brickphase.samples import long_schedule_plan

plan = long_schedule_plan()
print("bootstrap 1..%d" % plan.bootstrap_end)
for ph in plan.phases:
    print(f"phase {ph.phase_id}: steps {ph.start_step}..{ph.end_step}, load its target at {ph.pre_activate_at}")

state, directives = init(plan)
print(state.mode, directives)
state, _ = apply(state, AnchorPlaced(), plan)


def show(d, state):
    if isinstance(d, (EnableTarget, DisableTarget, DisableGroundPlane, EnableGroundPlane)):
        print(f"  step {state.step:3d}  {d}  active {sorted(state.active_targets)}  mode {state.mode}")


print("forward:")
while state.step < plan.part_count:
    state, directives = apply(state, Next(), plan)
    phase = plan.phase_at(state.step)
    # the host reports recognition once it sees the new target
    if phase is not None and state.step == phase.start_step:
        state, _ = apply(state, TargetRecognized(phase.phase_id), plan)
    for d in directives:
        show(d, state)

# losing tracking keeps the targets loaded
state, _ = apply(state, TrackingLost(), plan)
print("after a dropout:", state.mode, sorted(state.active_targets))

print("backward:")
while state.step > 1:
    state, directives = apply(state, Prev(), plan)
    for d in directives:
        show(d, state)

# going back keeps both targets for two steps around each switch
print("final:", state.step, state.mode, sorted(state.active_targets), "ground plane", state.ground_plane)
