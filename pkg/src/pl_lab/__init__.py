"""Distance functions to closed sets, Lojasiewicz-type inequalities and
proximal-point length certificates."""

from ._util import TOL_SET, UsageError
from .certify import (CertificationReport, Property, SamplingPlan, SubgradientOracle, Verdict,
                      clarke_oracle, conditioning_report, estimate_constant, loja_ratio,
                      oracle_for, sandwich_report, submetric_report)
from .funclib import (PowerDistance, PowerNorm, Quadratic, SubgradientSample, clarke_min_norm,
                      clarke_subdiff, eval_test_function, limiting_subdiff, value)
from .proxflow import (Desingularizer, ProxTrace, audit_prox_step, finite_length_certificate,
                       prox_sequence, prox_step)
from .setlib import (AffineSubspace, Box, Cardinality, ClosedSet, ParabolaGraph, PointCloud,
                     ProjectionResult, Singleton, Sphere, Union, distance, project)

__version__ = "0.1.0"
