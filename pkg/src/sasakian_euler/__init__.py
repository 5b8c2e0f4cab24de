"""Steady Euler flows on Sasakian 3-manifolds: solution families, residual
checks, isometries and flow-line integration."""

from .charts import H3, NIL, S3, SL2, ChartVectorField, get_chart
from .dynamics import Trajectory, integrate_flowline, vortex_line
from .errors import (
    AxisPoint,
    BothParametersZero,
    DegenerateSeed,
    FrameInconsistent,
    NearSingular,
    OrderUnsupported,
    OutsideDomain,
    PreconditionViolated,
    SingularEvaluation,
    UnknownTag,
)
from .families import (
    FamilyDescriptor,
    hyperbolic,
    kkps,
    mirror,
    nomizu_family,
    nomizu_psi,
    sasakian_ansatz,
    twin_family,
    two_killing,
)
from .frames import FrameField, FramePoint, SasakianFrameSpec, nil_frame, s3_frame, sl2_frame
from .grids import ResidualReport, SampleGrid
from .isometries import AmbientIsometry, check_equivalence, mirror_map, psi_map, sec43_map
from .profiles import Profile, parse

__version__ = "0.1.0"
