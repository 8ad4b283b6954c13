"""Sparse / dense multipath channel generation and the cascaded composite channel.

The direct link is a sparse impulse response with K dominant taps; the two
relay hops are dense. The estimation target is the stacked vector
``[direct, direct * relay-cascade]`` of length ``2L - 1``.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Channel", "ChannelSpec", "CompositeChannel", "gen_channel", "cascade", "compose"]


@dataclass(frozen=True)
class ChannelSpec:
    """Shape of a multipath channel: tap-vector length and number of dominant taps."""

    length: int
    dominant_taps: int
    kind: str = "sparse"  # "sparse" or "dense"

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"channel length must be >= 1, got {self.length}")
        if self.kind not in ("sparse", "dense"):
            raise ValueError(f"kind must be 'sparse' or 'dense', got {self.kind!r}")
        if self.kind == "dense" and self.dominant_taps != self.length:
            raise ValueError(
                f"dense channel requires dominant_taps == length "
                f"({self.dominant_taps} != {self.length})"
            )
        if not 1 <= self.dominant_taps <= self.length:
            raise ValueError(
                f"dominant_taps must be in [1, {self.length}], got {self.dominant_taps}"
            )


@dataclass(frozen=True)
class Channel:
    """Complex impulse response on a symbol-spaced delay grid."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.complex128)
        if taps.ndim != 1 or taps.size < 1:
            raise ValueError("taps must be a non-empty 1-D vector")
        object.__setattr__(self, "taps", taps)

    def __len__(self):
        return self.taps.size

    @property
    def support(self):
        """Indices of the nonzero taps."""
        return frozenset(np.flatnonzero(self.taps).tolist())


@dataclass(frozen=True)
class CompositeChannel:
    """Direct link (length L) stacked on top of the cascaded relay link (length L-1)."""

    direct: Channel
    cascaded: Channel

    def __post_init__(self):
        if len(self.cascaded) != len(self.direct) - 1:
            raise ValueError(
                f"cascaded length must be direct length - 1 "
                f"({len(self.cascaded)} != {len(self.direct)} - 1)"
            )

    @property
    def stacked(self):
        """Concatenated tap vector of length 2L - 1, direct part first."""
        return np.concatenate([self.direct.taps, self.cascaded.taps])

    def __len__(self):
        return 2 * len(self.direct) - 1


def gen_channel(spec: ChannelSpec, rng: np.random.Generator) -> Channel:
    """Draw a Rayleigh-fading channel with exactly ``spec.dominant_taps`` nonzero taps.

    Tap positions are uniform without replacement; each nonzero gain is
    circularly symmetric complex Gaussian with variance ``1/K``, so the total
    power is 1 in expectation.
    """
    k = spec.dominant_taps
    if spec.kind == "dense":
        positions = np.arange(spec.length)
    else:
        positions = rng.choice(spec.length, size=k, replace=False)
    gains = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * np.sqrt(0.5 / k)
    taps = np.zeros(spec.length, dtype=np.complex128)
    taps[positions] = gains
    return Channel(taps)


def cascade(h_a: Channel, h_b: Channel) -> Channel:
    """Full linear convolution of two impulse responses (the relayed two-hop channel)."""
    return Channel(np.convolve(h_a.taps, h_b.taps))


def compose(h_direct: Channel, h_cascaded: Channel) -> CompositeChannel:
    """Stack the direct-link and cascaded impulse responses into the estimation target."""
    return CompositeChannel(direct=h_direct, cascaded=h_cascaded)
