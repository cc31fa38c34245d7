"""Phased step-by-step instruction planning for brick assemblies."""
from .metrics import (
    SilhouetteRaster,
    SymmetryReport,
    ViewpointSet,
    confusability,
    distinctness_score,
    rasterize,
    symmetry_score,
)
from .model import (
    AssemblyModel,
    ContactGraph,
    InterpenetrationError,
    ModelError,
    ModelParseError,
    PartPlacement,
    PrecedenceCycleError,
    PrecedenceGraph,
    build_model,
    contact_graph,
    parse_model,
    precedence_graph,
    serialize_model,
)
from .plan_format import (
    InstructionPlan,
    PlanFormatError,
    PlanValidationError,
    PlanVersionError,
    deserialize,
    load_plan,
    save_plan,
    serialize,
    validate_plan,
)
from .sequencer import (
    NoFeasibleOrderError,
    OrderedPlanDraft,
    PlanningError,
    SequencerConfig,
    UnplannableError,
    order_steps,
    partition_phases,
    plan,
    plan_draft,
)
from .shapes import PART_DICTIONARY, PartShape
from .stability import FeasibilityReport, prefix_feasible
from .tracking import CameraModel, Pose, TrackerParams, occlusion_stability, recognize, reprojection_gap

__version__ = "0.1.0"
