"""Hilberg exponents: power-law growth of block mutual information."""

from .codes import LZ78Codec, ShannonFanoCodec, code_pmi, kraft_check, lz78_length, make_codec
from .errors import ImpossibleEventError, ParameterError, ResourceError
from .experiment import ExperimentConfig, run_analytic, run_code_mi, run_estimate, run_simulate
from .exponents import CurveRecord, ExponentReport, GrowthFit, build_report, find_excess_witness
from .measures import expected_mi_mixture, expected_mi_santa_fe, log_prob
from .pmi import PmiSample, log_plus, nested_pmi, pmi_exact
from .sampling import ProcessKind, ProcessSpec, Window, replicate_rng, sample_window
from .schedule import Block, Schedule, build_schedule
from .zeta import ZetaValue, zeta

__version__ = "0.1.0"
