"""Coherent-state optics for polarization-encoded weak coherent pulses.

A pulse is a two-mode coherent state described by its complex Jones
amplitudes (a_h, a_v); the mean photon number is |a_h|^2 + |a_v|^2.
Linear optics (loss, polarization rotation, beam splitters) maps coherent
states to coherent states, so pulse propagation and interference reduce to
exact amplitude arithmetic.  Threshold detectors click with probability

    p_click = 1 - (1 - p_dark) * exp(-eta_det * |amplitude|^2),

which is exact for coherent-state inputs.  Everything downstream (the
relay, the analytic gain model, the Monte Carlo) is built on these
primitives, so this module doubles as the physical oracle for the
analytic formulas.

All operations are pure functions of their inputs plus an explicitly
passed random generator; batched variants (suffix ``_batch``) operate on
numpy arrays along the leading axis and are what the session runner and
Monte Carlo tests use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BASIS_Z = "Z"
BASIS_X = "X"
BASES = (BASIS_Z, BASIS_X)

INTENSITY_LABELS = ("signal", "decoy1", "decoy2")

ARM_A = "A"
ARM_B = "B"

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class PolarizedAmplitude:
    """Jones vector of one coherent pulse: complex H and V amplitudes."""

    a_h: complex
    a_v: complex

    @property
    def mean_photon_number(self) -> float:
        return abs(self.a_h) ** 2 + abs(self.a_v) ** 2


@dataclass(frozen=True)
class PulsePreparation:
    """One party's choices for a single pulse.

    ``intensity_label`` names which entry of the party's intensity set is
    in use; ``mean_photon_number`` is the corresponding mean photon
    number (signal mu, first decoy nu or second decoy omega).
    """

    basis: str
    bit: int
    intensity_label: str
    mean_photon_number: float
    global_phase: float

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit}")
        if self.intensity_label not in INTENSITY_LABELS:
            raise ValueError(
                f"intensity_label must be one of {INTENSITY_LABELS}, "
                f"got {self.intensity_label!r}"
            )
        if self.mean_photon_number < 0:
            raise ValueError("mean_photon_number must be >= 0")


@dataclass(frozen=True)
class ChannelParams:
    """Channel and relay-detector parameters.

    Misalignment is the polarization error probability e_d, realized as a
    rotation by theta with sin^2(theta) = e_d applied in each arm.  The
    detector efficiency and dark count probability describe the four
    threshold detectors of the measurement unit (per detector, per gate).
    """

    length_a_km: float
    length_b_km: float
    loss_db_per_km: float
    misalignment: float
    detector_efficiency: float
    dark_count_prob: float

    def __post_init__(self):
        if self.length_a_km < 0 or self.length_b_km < 0:
            raise ValueError("arm lengths must be >= 0")
        if self.loss_db_per_km < 0:
            raise ValueError("loss_db_per_km must be >= 0")
        if not 0.0 <= self.misalignment <= 0.5:
            raise ValueError("misalignment must be in [0, 0.5]")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must be in (0, 1]")
        if not 0.0 <= self.dark_count_prob < 1.0:
            raise ValueError("dark_count_prob must be in [0, 1)")

    def arm_length_km(self, arm: str) -> float:
        if arm == ARM_A:
            return self.length_a_km
        if arm == ARM_B:
            return self.length_b_km
        raise ValueError(f"arm must be 'A' or 'B', got {arm!r}")

    def arm_transmittance(self, arm: str) -> float:
        """10^(-loss_db_per_km * length / 10) for the requested arm."""
        return 10.0 ** (-self.loss_db_per_km * self.arm_length_km(arm) / 10.0)

    @property
    def misalignment_angle(self) -> float:
        """Rotation angle theta with sin^2(theta) = misalignment."""
        return math.asin(math.sqrt(self.misalignment))


@dataclass(frozen=True)
class ClickPattern:
    """Which of the four relay detectors clicked in one gate."""

    d1h: bool
    d1v: bool
    d2h: bool
    d2v: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.d1h, self.d1v, self.d2h, self.d2v)


def jones_vector(basis: str, bit: int) -> np.ndarray:
    """Unit Jones vector (H, V components) for a BB84 state."""
    if basis == BASIS_Z:
        return np.array([1.0, 0.0]) if bit == 0 else np.array([0.0, 1.0])
    if basis == BASIS_X:
        if bit == 0:
            return np.array([_SQRT_HALF, _SQRT_HALF])
        return np.array([_SQRT_HALF, -_SQRT_HALF])
    raise ValueError(f"basis must be one of {BASES}, got {basis!r}")


def prepare_pulse(prep: PulsePreparation) -> PolarizedAmplitude:
    """Encode one BB84 weak coherent pulse.

    The amplitude magnitude is sqrt(mean_photon_number) along the encoded
    polarization direction, times exp(i * global_phase).
    """
    direction = jones_vector(prep.basis, prep.bit)
    scale = math.sqrt(prep.mean_photon_number) * np.exp(1j * prep.global_phase)
    amp = scale * direction
    return PolarizedAmplitude(complex(amp[0]), complex(amp[1]))


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_channel(amp: PolarizedAmplitude, params: ChannelParams, arm: str) -> PolarizedAmplitude:
    """Propagate a pulse through one arm: loss then misalignment rotation.

    Loss scales the amplitudes by sqrt(eta); coherent states stay coherent
    under linear loss, so this is exact.  The misalignment rotation acts on
    the Jones vector after the loss.
    """
    scale = math.sqrt(params.arm_transmittance(arm))
    rot = rotation_matrix(params.misalignment_angle)
    vec = scale * (rot @ np.array([amp.a_h, amp.a_v]))
    return PolarizedAmplitude(complex(vec[0]), complex(vec[1]))


@dataclass(frozen=True)
class BsmModes:
    """Amplitudes at the four relay detectors after the 50:50 BS + PBSs."""

    d1h: complex
    d1v: complex
    d2h: complex
    d2v: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.d1h, self.d1v, self.d2h, self.d2v)


def bsm_transfer(amp_a: PolarizedAmplitude, amp_b: PolarizedAmplitude) -> BsmModes:
    """Interfere two pulses on the relay's 50:50 beam splitter.

    Per polarization p, output port 1 carries (a_p + b_p)/sqrt(2) and port
    2 carries (a_p - b_p)/sqrt(2); the polarizing beam splitter on each
    port then separates H and V onto the four detectors.  Total mean
    photon number is conserved.
    """
    return BsmModes(
        d1h=(amp_a.a_h + amp_b.a_h) * _SQRT_HALF,
        d1v=(amp_a.a_v + amp_b.a_v) * _SQRT_HALF,
        d2h=(amp_a.a_h - amp_b.a_h) * _SQRT_HALF,
        d2v=(amp_a.a_v - amp_b.a_v) * _SQRT_HALF,
    )


def click_probabilities(
    modes: BsmModes, detector_efficiency: float, dark_count_prob: float
) -> tuple[float, float, float, float]:
    """Threshold-detector click probability for each of the four modes.

    p = 1 - (1 - p_dark) * exp(-eta * |amplitude|^2); clicks of distinct
    detectors are independent given the amplitudes.
    """
    if not 0.0 < detector_efficiency <= 1.0:
        raise ValueError("detector_efficiency must be in (0, 1]")
    if not 0.0 <= dark_count_prob < 1.0:
        raise ValueError("dark_count_prob must be in [0, 1)")
    return tuple(
        1.0 - (1.0 - dark_count_prob) * math.exp(-detector_efficiency * abs(m) ** 2)
        for m in modes.as_tuple()
    )


def sample_clicks(probs, rng: np.random.Generator) -> ClickPattern:
    """Draw one independent Bernoulli click per detector."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (4,):
        raise ValueError("expected four click probabilities")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("click probabilities must be in [0, 1]")
    draws = rng.random(4) < p
    return ClickPattern(*(bool(x) for x in draws))


# ---------------------------------------------------------------------------
# Batched variants.  Jones arrays have shape (n, 2) complex; detector
# arrays have shape (n, 4) ordered (D1H, D1V, D2H, D2V).
# ---------------------------------------------------------------------------

_JONES_BY_BASIS_BIT = np.array(
    [
        [[1.0, 0.0], [0.0, 1.0]],  # Z: bit 0 -> H, bit 1 -> V
        [[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]],  # X: diag, antidiag
    ]
)


def prepare_pulses_batch(
    basis_is_x: np.ndarray,
    bits: np.ndarray,
    mean_photon_numbers: np.ndarray,
    phases: np.ndarray,
) -> np.ndarray:
    """Vectorized prepare_pulse: returns an (n, 2) complex Jones array."""
    directions = _JONES_BY_BASIS_BIT[basis_is_x.astype(int), bits.astype(int)]
    scale = np.sqrt(mean_photon_numbers) * np.exp(1j * phases)
    return directions * scale[:, None]


def apply_channel_batch(amps: np.ndarray, params: ChannelParams, arm: str) -> np.ndarray:
    scale = math.sqrt(params.arm_transmittance(arm))
    rot = rotation_matrix(params.misalignment_angle)
    return scale * (amps @ rot.T)


def bsm_transfer_batch(amps_a: np.ndarray, amps_b: np.ndarray) -> np.ndarray:
    """Vectorized bsm_transfer: (n, 2) x 2 -> (n, 4) detector amplitudes."""
    plus = (amps_a + amps_b) * _SQRT_HALF
    minus = (amps_a - amps_b) * _SQRT_HALF
    return np.concatenate([plus, minus], axis=1)


def click_probabilities_batch(
    detector_amps: np.ndarray, detector_efficiency: float, dark_count_prob: float
) -> np.ndarray:
    intensities = np.abs(detector_amps) ** 2
    return 1.0 - (1.0 - dark_count_prob) * np.exp(-detector_efficiency * intensities)


def sample_clicks_batch(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return rng.random(probs.shape) < probs


# ---------------------------------------------------------------------------
# Hong-Ou-Mandel interference experiment.
# ---------------------------------------------------------------------------


def hom_experiment(
    mu_a: float,
    mu_b: float,
    distinguishable: bool,
    trials: int,
    rng: np.random.Generator,
    detector_efficiency: float = 1.0,
    dark_count_prob: float = 0.0,
) -> float:
    """Estimate the coincidence probability of a two-laser HOM experiment.

    Each trial draws independent uniform global phases for two equally
    polarized coherent pulses and interferes them at a 50:50 beam
    splitter.  In the distinguishable configuration the inputs are routed
    into separate non-interfering mode pairs, so each detector sees the
    incoherent sum of half of each pulse.  Returns the fraction of trials
    where both output detectors clicked.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mu_a < 0 or mu_b < 0:
        raise ValueError("mean photon numbers must be >= 0")
    phase = rng.uniform(0.0, 2.0 * math.pi, size=trials)  # relative phase is sufficient
    if distinguishable:
        i1 = np.full(trials, 0.5 * (mu_a + mu_b))
        i2 = i1
    else:
        cos = np.cos(phase)
        cross = math.sqrt(mu_a * mu_b) * cos
        i1 = 0.5 * (mu_a + mu_b) + cross
        i2 = 0.5 * (mu_a + mu_b) - cross
    p1 = 1.0 - (1.0 - dark_count_prob) * np.exp(-detector_efficiency * i1)
    p2 = 1.0 - (1.0 - dark_count_prob) * np.exp(-detector_efficiency * i2)
    clicks1 = rng.random(trials) < p1
    clicks2 = rng.random(trials) < p2
    return float(np.mean(clicks1 & clicks2))


@dataclass(frozen=True)
class HomVisibility:
    """Visibility estimate with the two coincidence rates behind it."""

    visibility: float
    coincidence_indistinguishable: float
    coincidence_distinguishable: float
    std_error: float


def hom_visibility(
    mu: float,
    trials: int,
    rng: np.random.Generator,
    detector_efficiency: float = 1.0,
    dark_count_prob: float = 0.0,
) -> HomVisibility:
    """Run paired (indistinguishable, distinguishable) HOM experiments.

    V = 1 - C_indist / C_dist; the standard error propagates the binomial
    errors of the two coincidence estimates.
    """
    c_ind = hom_experiment(mu, mu, False, trials, rng, detector_efficiency, dark_count_prob)
    c_dist = hom_experiment(mu, mu, True, trials, rng, detector_efficiency, dark_count_prob)
    if c_dist == 0.0:
        return HomVisibility(0.0, c_ind, c_dist, float("inf"))
    var_ind = c_ind * (1.0 - c_ind) / trials
    var_dist = c_dist * (1.0 - c_dist) / trials
    ratio = c_ind / c_dist
    var_v = (var_ind / c_dist**2) + (c_ind**2 / c_dist**4) * var_dist
    return HomVisibility(1.0 - ratio, c_ind, c_dist, math.sqrt(var_v))
