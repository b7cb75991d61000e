"""Sub-Nyquist wideband spectrum sensing.

Multicoset sampling of a sparse multiband signal, sequential forward
NLLS detection of the occupied channels from the snapshot correlation
matrix, an energy-detection baseline at the Nyquist rate, and a Monte
Carlo harness that reproduces the detection / false-alarm experiments.
"""

from .ed import EdConfig, channelize, ed_threshold, energy_detect, inverse_q
from .estimator import (DetectionResult, ModulationMatrix, RankDeficientError,
                        SampleCorrelation, SelectionStep, exhaustive_nlls,
                        lse_criterion, modulation_matrix, sample_correlation,
                        sequential_forward_nlls)
from .harness import (ExperimentConfig, MetricsRow, config_from_dict,
                      load_config, metrics, run_trial, sweep_m, sweep_snr)
from .iqfile import ingest_iq, write_iq
from .multicoset import (CosetPattern, SnapshotMatrix, coset_pattern,
                         fractional_shift, random_pattern, sample, snapshots,
                         sub_nyquist_factor)
from .siggen import (MultibandSignalSpec, NyquistRecord, band_power,
                     empirical_psd, generate)
from .spectrum import (ActiveChannelSet, ChannelPlan, active_set, channel_plan,
                       complement, landau_minimum_rate, validate_plan)

__version__ = "0.1.0"
