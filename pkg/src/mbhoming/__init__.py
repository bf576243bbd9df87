"""Visual homing with a lateralized mushroom-body memory.

A panoramic view is compressed into a projection-neuron vector, expanded
into a sparse Kenyon-cell code, and matched against five output-neuron
weight banks (left/right per hemisphere plus a nest bank).  Differential
familiarity steers a simulated car-like vehicle back to the nest; nest
familiarity modulates its speed so it can stop there.
"""

__version__ = "0.1.0"

from .optic_lobe import VisionConfig, process
from .mushroom_body import (
    MBONId,
    MBONBank,
    FamiliarityReadout,
    build_projection,
    encode,
    familiarity,
    learn,
    serialize,
    deserialize,
)
from .path_integrator import (
    GeoFix,
    LocalPose,
    HomingVector,
    TeachingSignal,
    PINoiseModel,
    geo_to_local,
    homing_vector,
    teaching_signal,
)
from .sip_controller import DriveCommand, ControlMode, SipController, lateral_error
