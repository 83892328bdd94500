"""Reference and excitation waveform generators.

Every generator returns a uniformly sampled :class:`TimeSeries` whose
samples are pure functions of time, so regenerating at a finer rate
reproduces the coarser samples exactly. Axis assignment follows the pose
ordering from :mod:`flexpos.kinematics`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kinematics import POSE_LABELS, POSE_UNITS


def axis_index(name: str) -> int:
    """Index of a pose axis by label ('x', 'y', 'z', 'rx', 'ry', 'rz')."""
    try:
        return POSE_LABELS.index(name)
    except ValueError:
        raise ValidationError(
            f"unknown axis {name!r}; expected one of {POSE_LABELS}"
        ) from None


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled 6-channel record.

    data: (n, 6) float samples.
    rate_hz: sampling rate.
    labels/units: per-channel names and units (pose layout by default).
    """

    rate_hz: float
    data: np.ndarray
    labels: tuple = POSE_LABELS
    units: tuple = POSE_UNITS

    def __post_init__(self):
        if not (np.isfinite(self.rate_hz) and self.rate_hz > 0.0):
            raise ValidationError(f"rate_hz must be positive, got {self.rate_hz}")
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != 6:
            raise ValidationError(f"data must have shape (n, 6), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValidationError("data contains non-finite samples")
        if len(self.labels) != 6 or len(self.units) != 6:
            raise ValidationError("labels and units must each have 6 entries")
        object.__setattr__(self, "data", data)

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.data.shape[0]) / self.rate_hz

    @property
    def duration_s(self) -> float:
        return self.data.shape[0] / self.rate_hz


def _n_samples(duration_s: float, rate_hz: float) -> int:
    if not (np.isfinite(duration_s) and duration_s >= 0.0):
        raise ValidationError(f"duration must be >= 0, got {duration_s}")
    if not (np.isfinite(rate_hz) and rate_hz > 0.0):
        raise ValidationError(f"rate must be positive, got {rate_hz}")
    n = int(round(duration_s * rate_hz))
    if n < 1:
        raise ValidationError(
            f"duration {duration_s} s at {rate_hz} Hz yields no samples"
        )
    return n


def constant(pose, duration_s: float, rate_hz: float) -> TimeSeries:
    """Hold a fixed pose (a step reference when started from rest)."""
    pose = np.broadcast_to(np.asarray(pose, dtype=float), (6,))
    n = _n_samples(duration_s, rate_hz)
    return TimeSeries(rate_hz=rate_hz, data=np.tile(pose, (n, 1)))


def staircase(
    step_heights,
    period_s: float,
    n_steps: int,
    rate_hz: float,
    bidirectional: bool = True,
) -> TimeSeries:
    """Ascending-then-descending staircase, one dwell per period.

    Levels go ``h, 2h, ..., n*h`` and, when ``bidirectional``, back down
    ``(n-1)*h, ..., 0``. Samples are right-continuous at dwell boundaries
    (a boundary sample takes the new level). ``n_steps == 0`` produces one
    period of zeros.

    Args:
        step_heights: per-axis step height (um / urad), pose order;
            scalars broadcast. Zero disables an axis.
        period_s: dwell duration per level.
        n_steps: number of ascending steps.
        rate_hz: sample rate; at least 2 samples per period required.
    """
    heights = np.broadcast_to(np.asarray(step_heights, dtype=float), (6,))
    if not (np.isfinite(period_s) and period_s > 0.0):
        raise ValidationError(f"period must be positive, got {period_s}")
    if n_steps < 0:
        raise ValidationError(f"n_steps must be >= 0, got {n_steps}")
    if period_s * rate_hz < 2.0:
        raise ValidationError("need at least 2 samples per staircase period")

    n_dwells = staircase_dwell_count(n_steps, bidirectional)
    levels = staircase_levels(n_steps, bidirectional)
    n = _n_samples(n_dwells * period_s, rate_hz)
    t = np.arange(n) / rate_hz
    idx = np.minimum((t / period_s).astype(int), n_dwells - 1)
    profile = levels[idx]
    return TimeSeries(rate_hz=rate_hz, data=np.outer(profile, heights))


def staircase_dwell_count(n_steps: int, bidirectional: bool = True) -> int:
    if n_steps == 0:
        return 1
    return 2 * n_steps if bidirectional else n_steps


def staircase_levels(n_steps: int, bidirectional: bool = True) -> np.ndarray:
    """Unit-height dwell levels; multiply by a step height for a profile."""
    if n_steps == 0:
        return np.zeros(1)
    up = np.arange(1, n_steps + 1, dtype=float)
    if not bidirectional:
        return up
    down = np.arange(n_steps - 1, -1, -1, dtype=float)
    return np.concatenate([up, down])


def circle(
    plane,
    radius: float,
    frequency_hz: float,
    duration_s: float,
    rate_hz: float,
) -> TimeSeries:
    """Circular trajectory in an axis pair: (R cos, R sin) at a fixed rate."""
    if frequency_hz <= 0.0:
        raise ValidationError(f"frequency must be positive, got {frequency_hz}")
    if frequency_hz >= rate_hz / 10.0:
        raise ValidationError(
            f"circle frequency {frequency_hz} Hz too close to rate {rate_hz} Hz"
        )
    i, j = (axis_index(a) for a in plane)
    if i == j:
        raise ValidationError("circle plane needs two distinct axes")
    n = _n_samples(duration_s, rate_hz)
    t = np.arange(n) / rate_hz
    data = np.zeros((n, 6))
    data[:, i] = radius * np.cos(2.0 * np.pi * frequency_hz * t)
    data[:, j] = radius * np.sin(2.0 * np.pi * frequency_hz * t)
    return TimeSeries(rate_hz=rate_hz, data=data)


def rose(
    axes,
    amplitude: float,
    petals: int,
    frequency_hz: float,
    duration_s: float,
    rate_hz: float,
    third_amplitude: float = 0.0,
) -> TimeSeries:
    """Rhodonea trajectory r = A sin(k theta) traced at uniform angular speed.

    The polar curve maps to the first two axes; an optional third axis
    carries ``third_amplitude * sin(theta)`` superimposed (used for the
    spatial variants). Even petal counts trace 2k petals per revolution.

    Args:
        axes: 2 or 3 pose axis names, e.g. ("x", "y") or ("x", "y", "rz").
        petals: integer k >= 2 in r = A sin(k theta).
    """
    if len(axes) not in (2, 3):
        raise ValidationError("rose needs 2 or 3 axes")
    if int(petals) != petals or petals < 2:
        raise ValidationError(f"petals must be an integer >= 2, got {petals}")
    if frequency_hz <= 0.0:
        raise ValidationError(f"frequency must be positive, got {frequency_hz}")
    idx = [axis_index(a) for a in axes]
    if len(set(idx)) != len(idx):
        raise ValidationError("rose axes must be distinct")
    n = _n_samples(duration_s, rate_hz)
    theta = 2.0 * np.pi * frequency_hz * (np.arange(n) / rate_hz)
    r = amplitude * np.sin(petals * theta)
    data = np.zeros((n, 6))
    data[:, idx[0]] = r * np.cos(theta)
    data[:, idx[1]] = r * np.sin(theta)
    if len(idx) == 3:
        data[:, idx[2]] = third_amplitude * np.sin(theta)
    return TimeSeries(rate_hz=rate_hz, data=data)


def sine(
    amplitudes,
    frequency_hz: float,
    duration_s: float,
    rate_hz: float,
) -> TimeSeries:
    """Common-phase sinusoid on every axis with a nonzero amplitude."""
    amps = np.broadcast_to(np.asarray(amplitudes, dtype=float), (6,))
    if frequency_hz <= 0.0:
        raise ValidationError(f"frequency must be positive, got {frequency_hz}")
    n = _n_samples(duration_s, rate_hz)
    t = np.arange(n) / rate_hz
    return TimeSeries(
        rate_hz=rate_hz,
        data=np.outer(np.sin(2.0 * np.pi * frequency_hz * t), amps),
    )


def chirp(
    amplitudes,
    f0_hz: float,
    f1_hz: float,
    duration_s: float,
    rate_hz: float,
) -> TimeSeries:
    """Linear sweep: instantaneous frequency runs from f0 to f1 over the record.

    Phase is ``2 pi (f0 t + (f1 - f0) t^2 / (2 T))``; ``f1 == f0``
    degenerates to a pure sine.
    """
    amps = np.broadcast_to(np.asarray(amplitudes, dtype=float), (6,))
    if not (0.0 < f0_hz <= f1_hz):
        raise ValidationError(f"need 0 < f0 <= f1, got f0={f0_hz}, f1={f1_hz}")
    if f1_hz >= rate_hz / 4.0:
        raise ValidationError(
            f"sweep end {f1_hz} Hz too close to the rate {rate_hz} Hz"
        )
    n = _n_samples(duration_s, rate_hz)
    t = np.arange(n) / rate_hz
    phase = 2.0 * np.pi * (f0_hz * t + (f1_hz - f0_hz) * t**2 / (2.0 * duration_s))
    return TimeSeries(rate_hz=rate_hz, data=np.outer(np.sin(phase), amps))


@dataclass(frozen=True)
class WaveformSpec:
    """Declarative waveform description, as expressed in configs and CLI flags.

    Only the fields relevant to ``kind`` are consulted; `generate`
    validates the rest.
    """

    kind: str
    duration_s: float = 0.0
    amplitudes: tuple = field(default_factory=tuple)  # pose-order amplitudes
    axes: tuple = field(default_factory=tuple)        # axis names (circle / rose)
    frequency_hz: float = 0.0
    period_s: float = 0.0       # staircase dwell
    n_steps: int = 0            # staircase ascending steps
    petals: int = 4             # rose lobe parameter
    third_amplitude: float = 0.0
    f0_hz: float = 0.0          # chirp start
    f1_hz: float = 0.0          # chirp end

    def generate(self, rate_hz: float) -> TimeSeries:
        kind = self.kind.lower()
        if kind == "constant":
            return constant(self._amps6(), self.duration_s, rate_hz)
        if kind == "staircase":
            return staircase(self._amps6(), self.period_s, self.n_steps, rate_hz)
        if kind == "sine":
            return sine(self._amps6(), self.frequency_hz, self.duration_s, rate_hz)
        if kind == "circle":
            if len(self.axes) != 2:
                raise ValidationError("circle requires exactly 2 axes")
            return circle(
                self.axes, self._scalar_amp(), self.frequency_hz,
                self.duration_s, rate_hz,
            )
        if kind == "rose":
            return rose(
                self.axes, self._scalar_amp(), self.petals, self.frequency_hz,
                self.duration_s, rate_hz, third_amplitude=self.third_amplitude,
            )
        if kind == "chirp":
            return chirp(self._amps6(), self.f0_hz, self.f1_hz, self.duration_s, rate_hz)
        raise ValidationError(f"unknown waveform kind {self.kind!r}")

    def _amps6(self):
        if len(self.amplitudes) == 0:
            return np.zeros(6)
        if len(self.amplitudes) == 1:
            return np.full(6, float(self.amplitudes[0]))
        if len(self.amplitudes) == 6:
            return np.asarray(self.amplitudes, dtype=float)
        raise ValidationError(
            f"amplitudes must have 1 or 6 entries, got {len(self.amplitudes)}"
        )

    def _scalar_amp(self) -> float:
        if len(self.amplitudes) != 1:
            raise ValidationError(
                f"{self.kind} takes a single amplitude, got {len(self.amplitudes)}"
            )
        return float(self.amplitudes[0])
