"""Quadrotor parameter identification from proprioceptive flight logs.

Estimates the motor time constant, thrust curve, diagonal inertia and yaw
torque coefficient of a multirotor from accelerometer, gyro and motor
command channels, with a simulator for closed-loop verification and a CLI
plus HTTP service around the pipeline.
"""

from ._version import __version__
from .errors import (DegenerateChannel, EmptyOverlap, InsufficientExcitation,
                     LengthMismatch, MagicMismatch, MissingColumn, NoRealRoot,
                     NonFiniteObjective, NonNumericCell, NonPositiveInput,
                     PipelineError, RankDeficient, SeriesUnavailable, ShapeMismatch,
                     SysIdError, TooShort, TruncatedMessage, UnknownLabel,
                     UnstableStep, UnsupportedVersion)
from .types import (ChannelMapping, ChannelSpec, RawLog, RigidBodyGeometry,
                    SysIdDataset, crazyflie_geometry, default_channel_mapping)
from .lsq import LinearSystem, LsqSolution, grid_minimize, solve_ols, stack
from .motor import (HoverStats, MotorModelEstimate, ThrustCurve, ema_alpha,
                    fit_thrust_curve, hover_analysis, hover_command, predict_thrust,
                    simulate_motor_speeds, sweep_time_constant, transient_skip)
from .inertia import (AngularDataset, InertiaEstimate, RollPitchFit,
                      angular_acceleration, assemble_inertia_estimate,
                      build_full_inertia_system, fit_k_tau, fit_roll_pitch,
                      fit_yaw_ratio, inertia_reference_entries, inertia_scaling_table,
                      positional_torques, predict_izz, smooth_series, yaw_drive)
from .sim import (BUILTIN_SCRIPTS, ExcitationScript, QuadrotorParams, SimState,
                  crazyflie_params, measure, run_script, standard_suite, step,
                  validate)
from .ulog import parse_ulog, write_dataset_ulog, write_ulog
from .csvlog import csv_default_mapping, parse_crazyflie_csv, write_dataset_csv
from .resample import resample_sync, select_segment, slice_dataset
from .pipeline import (IdentificationReport, PipelineConfig, SegmentWindow,
                       dump_json, export_plot_data, run_pipeline)

import inspect as _inspect

__all__ = sorted(n for n, o in globals().items()
                 if not n.startswith("_") and not _inspect.ismodule(o))

