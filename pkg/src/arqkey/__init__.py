"""Secret-key sharing over block-fading wiretap channels via ACK/NACK feedback."""

__version__ = "0.1.0"

from arqkey.capacity import (
    RateQuery,
    RateResult,
    ack_probability,
    ergodic_upper_bound,
    erasure_secrecy_capacity,
    eve_gap_term,
    exp_integral_e1,
    expected_transmissions,
    finite_key_rate,
    key_rate_general,
    key_rate_independent,
    maximize_key_rate,
    outage_probability,
)
from arqkey.channel import (
    ChannelDraw,
    ChiSquare,
    DumbAntennaComposite,
    FullyCorrelated,
    GaussMarkovRayleigh,
    IndependentRayleigh,
    Los,
    ModelMismatchError,
    Rayleigh,
    evolve_gain,
    sample_block,
    sample_dumb_antenna,
    substream,
)
from arqkey.protocol import (
    ProtocolConfig,
    estimate_metrics,
    run_epoch,
    run_key_exchange,
    secrecy_blindness_test,
)

__all__ = [
    "__version__",
    "ChannelDraw",
    "ChiSquare",
    "DumbAntennaComposite",
    "FullyCorrelated",
    "GaussMarkovRayleigh",
    "IndependentRayleigh",
    "Los",
    "ModelMismatchError",
    "ProtocolConfig",
    "RateQuery",
    "RateResult",
    "Rayleigh",
    "ack_probability",
    "ergodic_upper_bound",
    "erasure_secrecy_capacity",
    "estimate_metrics",
    "eve_gap_term",
    "evolve_gain",
    "exp_integral_e1",
    "expected_transmissions",
    "finite_key_rate",
    "key_rate_general",
    "key_rate_independent",
    "maximize_key_rate",
    "outage_probability",
    "run_epoch",
    "run_key_exchange",
    "sample_block",
    "sample_dumb_antenna",
    "secrecy_blindness_test",
    "substream",
]
