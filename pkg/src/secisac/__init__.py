"""Secrecy-distortion regions for discrete memoryless secure ISAC channels.

Modules:

* :mod:`secisac.prob_core`: labeled joint tables, entropies, mutual information
* :mod:`secisac.channel_model`: the channel, auxiliary chains, ordering checks
* :mod:`secisac.estimation`: optimal per-letter state estimators
* :mod:`secisac.regions`: inner/outer bounds, sweeps, separation baseline
* :mod:`secisac.canonical`: closed forms for the binary examples
* :mod:`secisac.simulate`: Monte-Carlo distortion checks
* :mod:`secisac.specfile`: JSON channel description files
"""

from .prob_core import (Alphabet, Kernel, LabeledJoint, ZERO_MASS, ZeroMassError, binary_entropy,
                        condition, conditional_entropy, entropy, marginalize, mutual_information,
                        star)
from .channel_model import (AuxChain, IsacChannel, assemble_joint, check_more_capable,
                            check_physically_degraded, check_reversely_degraded)
from .estimation import DistortionMetric, Estimator, expected_distortion, hamming, optimal_estimator
from .regions import (RegionPoint, SweepSpec, full_secrecy_inner, full_secrecy_outer,
                      pareto_filter, partial_secrecy_inner, partial_secrecy_outer,
                      separation_baseline, sweep_region, theorem1_point, theorem2_point,
                      theorem3_point, theorem4_point)
from .canonical import (D_of_p, D_prime_of_p, bec_bsc_channel, bernoulli_noiseless_channel,
                        figure2_data, is_more_capable_closed_form, lemma1_point, lemma2_threshold,
                        lemma3_point)
from .simulate import SimConfig, plugin_mutual_information, simulate_distortion

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "Kernel", "LabeledJoint", "ZERO_MASS", "ZeroMassError", "binary_entropy",
    "condition", "conditional_entropy", "entropy", "marginalize", "mutual_information", "star",
    "AuxChain", "IsacChannel", "assemble_joint", "check_more_capable",
    "check_physically_degraded", "check_reversely_degraded", "DistortionMetric", "Estimator",
    "expected_distortion", "hamming", "optimal_estimator", "RegionPoint", "SweepSpec",
    "full_secrecy_inner", "full_secrecy_outer", "pareto_filter", "partial_secrecy_inner",
    "partial_secrecy_outer", "separation_baseline", "sweep_region", "theorem1_point",
    "theorem2_point", "theorem3_point", "theorem4_point", "D_of_p", "D_prime_of_p",
    "bec_bsc_channel", "bernoulli_noiseless_channel", "figure2_data",
    "is_more_capable_closed_form", "lemma1_point", "lemma2_threshold", "lemma3_point",
    "SimConfig", "plugin_mutual_information", "simulate_distortion",
]
