"""Two-slot amplify-and-forward link simulation and its frequency-domain linear model.

Slot 1: the source broadcasts a training block; destination and relay both
listen. Slot 2: the relay scales its noisy receive by ``beta`` and
retransmits. Because the channel matrices are circulant, taking the unitary
DFT of both destination observations reduces everything to ``y = X h + z``
where ``h`` is the stacked composite channel of length ``2L - 1`` and ``X``
is a 2N x (2L-1) block-diagonal matrix built from the training sequence.
"""

from dataclasses import dataclass

import numpy as np

from .channel import Channel

__all__ = [
    "TrainingSequence",
    "SlotObservations",
    "Measurement",
    "gen_training",
    "unitary_dft",
    "circulant_apply",
    "amplification_factor",
    "simulate_two_slot",
    "build_measurement_matrix",
    "to_frequency_model",
    "frequency_response",
    "stacked_noise_cov_diag",
]

_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2)


@dataclass(frozen=True)
class TrainingSequence:
    """Known training block of N complex symbols with per-symbol energy ``unit_power``."""

    samples: np.ndarray
    unit_power: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        n = samples.size
        energy = float(np.sum(np.abs(samples) ** 2))
        if not np.isclose(energy, n * self.unit_power, rtol=1e-9):
            raise ValueError(
                f"training energy {energy:.6g} != N*P = {n * self.unit_power:.6g}"
            )

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class SlotObservations:
    """Destination receives from both slots, plus the relay gain and noise level."""

    y_d1: np.ndarray
    y_d2: np.ndarray
    beta: float
    noise_var: float

    def __post_init__(self):
        if self.y_d1.shape != self.y_d2.shape or self.y_d1.ndim != 1:
            raise ValueError("slot observations must be 1-D vectors of equal length")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be nonnegative, got {self.noise_var}")


@dataclass(frozen=True)
class Measurement:
    """Frequency-domain observation ``y`` (length 2N) and training matrix ``X`` (2N x (2L-1))."""

    y: np.ndarray
    X: np.ndarray
    noise_var: float


def gen_training(
    n: int, power: float, rng: np.random.Generator, kind: str = "qpsk"
) -> TrainingSequence:
    """Draw a training sequence of ``n`` symbols with per-symbol energy ``power``.

    ``kind='qpsk'`` gives i.i.d. uniform QPSK in the time domain.
    ``kind='qpsk_flat'`` draws the QPSK symbols in the DFT domain and
    transmits their inverse transform: the spectrum is constant modulus, so
    the diagonal of the equivalent training matrix is perfectly conditioned
    (a time-domain constant-modulus alphabet does not give this; its DFT has
    deep fades). ``kind='gaussian'`` gives complex Gaussian symbols rescaled
    to exact total energy ``n * power``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    if kind == "qpsk":
        samples = _QPSK[rng.integers(0, 4, size=n)] * np.sqrt(power)
    elif kind == "qpsk_flat":
        spectrum = _QPSK[rng.integers(0, 4, size=n)] * np.sqrt(power)
        samples = unitary_dft(n).conj().T @ spectrum
    elif kind == "gaussian":
        samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        samples *= np.sqrt(n * power) / np.linalg.norm(samples)
    else:
        raise ValueError(f"unknown training kind {kind!r}")
    return TrainingSequence(samples=samples, unit_power=power)


def unitary_dft(n: int) -> np.ndarray:
    """Unitary DFT matrix F with F[m, k] = exp(-2j*pi*m*k/n) / sqrt(n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(m, m) / n) / np.sqrt(n)


def circulant_apply(h: Channel, x: np.ndarray) -> np.ndarray:
    """Multiply by the N x N circulant matrix whose first column is ``[h, 0]``.

    Equivalent to circular convolution of the zero-padded taps with ``x``;
    done via the FFT.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    if len(h) > n:
        raise ValueError(f"channel length {len(h)} exceeds block length {n}")
    c = np.zeros(n, dtype=np.complex128)
    c[: len(h)] = h.taps
    return np.fft.ifft(np.fft.fft(c) * np.fft.fft(x))


def amplification_factor(
    p_relay: float, p_source: float, noise_var: float, rule: str = "as_printed"
) -> float:
    """Relay power-scaling gain beta under long-time averaging.

    ``rule='as_printed'`` uses beta = sqrt(P_R / (sigma^2 * P_S + sigma^2)).
    ``rule='unit_channel'`` uses the dimensionally consistent alternative
    beta = sqrt(P_R / (P_S + sigma^2)), which treats the relay-input channel
    power as 1.
    """
    if p_relay <= 0 or p_source <= 0:
        raise ValueError("powers must be positive")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    if rule == "as_printed":
        denom = noise_var * p_source + noise_var
    elif rule == "unit_channel":
        denom = p_source + noise_var
    else:
        raise ValueError(f"unknown beta rule {rule!r}")
    if denom == 0:
        raise ZeroDivisionError("amplification denominator is zero (noiseless limit)")
    return float(np.sqrt(p_relay / denom))


def _cn_noise(n: int, var: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly symmetric complex Gaussian vector with variance ``var`` per entry."""
    if var == 0:
        return np.zeros(n, dtype=np.complex128)
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(var / 2)


def simulate_two_slot(
    h_sd: Channel,
    h_sr: Channel,
    h_rd: Channel,
    x: TrainingSequence,
    noise_var: float,
    beta: float,
    rng: np.random.Generator,
) -> SlotObservations:
    """Run both transmission slots and return the destination observations.

    The slot-2 noise is generated physically: the relay amplifies its own
    noisy receive, so the destination sees ``beta * H_rd @ z_r1 + z_d2``
    with the correct colored covariance by construction.
    """
    n = len(x)
    for h in (h_sd, h_sr, h_rd):
        if len(h) > n:
            raise ValueError(f"channel length {len(h)} exceeds block length {n}")
    z_d1 = _cn_noise(n, noise_var, rng)
    z_r1 = _cn_noise(n, noise_var, rng)
    z_d2 = _cn_noise(n, noise_var, rng)
    y_d1 = circulant_apply(h_sd, x.samples) + z_d1
    y_r1 = circulant_apply(h_sr, x.samples) + z_r1
    y_d2 = beta * circulant_apply(h_rd, y_r1) + z_d2
    return SlotObservations(y_d1=y_d1, y_d2=y_d2, beta=beta, noise_var=noise_var)


def frequency_response(h: Channel, n: int) -> np.ndarray:
    """Length-N frequency response H(k) = sum_l h_l exp(-2j*pi*k*l/n).

    These are the diagonal entries of F @ H_circ @ F^H; used by diagnostics
    and the analytic noise-covariance computation.
    """
    c = np.zeros(n, dtype=np.complex128)
    c[: len(h)] = h.taps
    return np.fft.fft(c)


def build_measurement_matrix(x: TrainingSequence, L: int, beta: float = 1.0) -> np.ndarray:
    """Equivalent 2N x (2L-1) training matrix of the stacked frequency-domain model.

    Top-left N x L block is sqrt(N) * diag(F x) @ F[:, :L]; bottom-right
    N x (L-1) block is the same construction on the first L-1 columns scaled
    by ``beta``; the off-diagonal blocks are exactly zero.
    """
    n = len(x)
    if L > n:
        raise ValueError(f"L = {L} exceeds training length N = {n}")
    if L % 2 != 0:
        raise ValueError(f"L must be even, got {L}")
    f = unitary_dft(n)
    fx = f @ x.samples
    weighted = np.sqrt(n) * fx[:, None] * f  # sqrt(N) * diag(Fx) @ F
    X = np.zeros((2 * n, 2 * L - 1), dtype=np.complex128)
    X[:n, :L] = weighted[:, :L]
    X[n:, L:] = beta * weighted[:, : L - 1]
    return X


def to_frequency_model(obs: SlotObservations, x: TrainingSequence, L: int) -> Measurement:
    """DFT both slot observations and pair them with the equivalent training matrix.

    The relay gain ``beta`` is folded into the lower block of X (it is a
    known system constant), so the unknown stays the physical composite
    channel vector.
    """
    n = len(x)
    if obs.y_d1.size != n:
        raise ValueError(f"observation length {obs.y_d1.size} != training length {n}")
    f = unitary_dft(n)
    y = np.concatenate([f @ obs.y_d1, f @ obs.y_d2])
    X = build_measurement_matrix(x, L, beta=obs.beta)
    return Measurement(y=y, X=X, noise_var=obs.noise_var)


def stacked_noise_cov_diag(h_rd: Channel, beta: float, noise_var: float, n: int) -> np.ndarray:
    """Diagonal of the stacked frequency-domain noise covariance (length 2N).

    Slot-1 entries are white at ``noise_var``; slot-2 entries carry the
    relay-amplified color ``(beta^2 |H_rd(k)|^2 + 1) * noise_var``.
    """
    h_rd_freq = frequency_response(h_rd, n)
    top = np.full(n, noise_var)
    bottom = (beta**2 * np.abs(h_rd_freq) ** 2 + 1.0) * noise_var
    return np.concatenate([top, bottom])
