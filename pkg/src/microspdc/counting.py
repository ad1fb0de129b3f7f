"""Time-tag synthesis and coincidence analysis for a two-detector setup.

A pair source feeds a balanced splitter: each photon of a pair is
routed independently to channel 1 or 2 (so half of the surviving pairs
produce a cross-channel coincidence), plus independent Poisson
background on each channel. Streams are integer-picosecond timestamp
lists, deterministic for a given seed (numpy PCG64 via
``numpy.random.default_rng``).

Rate algebra on summaries:

    N_a = N1 * N2 * T_c        accidental coincidence rate
    N_r = N_c - N_a            real coincidence rate
    g2(0) = N_c / N_a
    CAR = g2(0) - 1

A coincidence is a cross-channel event pair with |t1 - t2| <= T_c / 2,
so the full window length is T_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TimeTagStream:
    """Ordered detection events on two channels."""

    channels: np.ndarray
    timestamps_ps: np.ndarray
    duration_ps: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=np.uint8)
        self.timestamps_ps = np.asarray(self.timestamps_ps, dtype=np.uint64)
        if self.channels.shape != self.timestamps_ps.shape:
            raise ValueError("channels and timestamps must align")
        if self.channels.size and not np.all(np.isin(self.channels, (1, 2))):
            raise ValueError("channels must be 1 or 2")
        if self.timestamps_ps.size > 1 and np.any(
                np.diff(self.timestamps_ps.astype(np.int64)) < 0):
            raise ValueError("timestamps must be nondecreasing")
        self.duration_ps = int(self.duration_ps)
        if self.duration_ps < 0:
            raise ValueError("duration must be nonnegative")

    def channel_times(self, channel: int) -> np.ndarray:
        """Timestamps (float64 ps) of one channel."""
        return self.timestamps_ps[self.channels == channel].astype(np.float64)

    @property
    def duration_s(self) -> float:
        return self.duration_ps * 1e-12


@dataclass(frozen=True)
class CountSummary:
    """Measured rates and the derived coincidence statistics."""

    n1: float
    n2: float
    nc: float
    t_c_s: float
    n_a: float
    n_r: float
    g2_zero: float
    car: float


@dataclass(frozen=True)
class HbtConfig:
    """Rates and detector parameters of one synthesized measurement."""

    pair_rate: float
    background_rates: tuple = (0.0, 0.0)
    efficiencies: tuple = (1.0, 1.0)
    jitter_sigma_ps: float = 50.0
    window_ps: float = 1000.0
    duration_s: float = 1.0

    def __post_init__(self):
        if self.pair_rate < 0 or min(self.background_rates) < 0:
            raise ValueError("rates must be nonnegative")
        if not all(0.0 <= e <= 1.0 for e in self.efficiencies):
            raise ValueError("efficiencies must lie in [0, 1]")
        if self.jitter_sigma_ps < 0:
            raise ValueError("jitter must be nonnegative")
        if self.window_ps <= 0 or self.duration_s <= 0:
            raise ValueError("window and duration must be positive")


@dataclass
class G2Curve:
    """Cross-correlation histogram normalized by its accidental floor."""

    lag_ps: np.ndarray
    g2: np.ndarray
    counts: np.ndarray
    floor_counts: float


def synthesize_stream(pair_rate: float, background_rates=(0.0, 0.0),
                      efficiencies=(1.0, 1.0), jitter_sigma_ps: float = 0.0,
                      duration_s: float = 1.0, seed=0) -> TimeTagStream:
    """Monte-Carlo detection stream for the splitter-plus-background model.

    Pairs arrive as a Poisson process; each photon of a pair picks a
    channel with probability 1/2, survives with that channel's
    efficiency, and gets Gaussian timestamp jitter. Backgrounds are
    independent Poisson processes per channel (uniform in time, so
    jitter would not change their statistics). Photons jittered outside
    the measurement interval are dropped.
    """
    if pair_rate < 0 or min(background_rates) < 0:
        raise ValueError("rates must be nonnegative")
    if not all(0.0 <= e <= 1.0 for e in efficiencies):
        raise ValueError("efficiencies must lie in [0, 1]")
    if jitter_sigma_ps < 0:
        raise ValueError("jitter must be nonnegative")
    if duration_s <= 0:
        raise ValueError("duration must be positive")

    rng = np.random.default_rng(seed)
    t_total_ps = duration_s * 1e12
    eta = np.asarray(efficiencies, dtype=float)

    n_pairs = rng.poisson(pair_rate * duration_s)
    t_pairs = rng.uniform(0.0, t_total_ps, n_pairs)
    ch_a = rng.integers(1, 3, n_pairs).astype(np.uint8)
    ch_b = rng.integers(1, 3, n_pairs).astype(np.uint8)
    jit_a = rng.normal(0.0, jitter_sigma_ps, n_pairs)
    jit_b = rng.normal(0.0, jitter_sigma_ps, n_pairs)
    keep_a = rng.random(n_pairs) < eta[ch_a - 1]
    keep_b = rng.random(n_pairs) < eta[ch_b - 1]

    parts_t = [t_pairs[keep_a] + jit_a[keep_a],
               t_pairs[keep_b] + jit_b[keep_b]]
    parts_c = [ch_a[keep_a], ch_b[keep_b]]
    for ch, rate in ((1, background_rates[0]), (2, background_rates[1])):
        n_bg = rng.poisson(rate * duration_s)
        parts_t.append(rng.uniform(0.0, t_total_ps, n_bg))
        parts_c.append(np.full(n_bg, ch, dtype=np.uint8))

    times = np.concatenate(parts_t)
    chans = np.concatenate(parts_c)
    inside = (times >= 0.0) & (times <= t_total_ps)
    times = np.rint(times[inside]).astype(np.uint64)
    chans = chans[inside]
    order = np.lexsort((chans, times))
    return TimeTagStream(
        channels=chans[order], timestamps_ps=times[order],
        duration_ps=int(round(t_total_ps)),
        metadata={
            "pair_rate": pair_rate,
            "background_rates": tuple(background_rates),
            "efficiencies": tuple(float(e) for e in eta),
            "jitter_sigma_ps": jitter_sigma_ps,
            "duration_s": duration_s,
            "seed": seed,
            "generator": "numpy default_rng (PCG64)",
        })


def _flat_window_indices(lo, hi):
    # Expand per-event searchsorted windows [lo, hi) into one flat index
    # array without a Python loop.
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64), counts
    starts = np.cumsum(counts) - counts
    flat = np.repeat(lo, counts) + (np.arange(total, dtype=np.int64)
                                    - np.repeat(starts, counts))
    return flat, counts


def count_coincidences(stream: TimeTagStream, window_ps: float) -> int:
    """Number of cross-channel pairs with |t1 - t2| <= window/2."""
    if window_ps <= 0:
        raise ValueError("window must be positive")
    t1 = stream.channel_times(1)
    t2 = stream.channel_times(2)
    if t1.size == 0 or t2.size == 0:
        return 0
    half = window_ps / 2.0
    lo = np.searchsorted(t2, t1 - half, side="left")
    hi = np.searchsorted(t2, t1 + half, side="right")
    return int((hi - lo).sum())


def lag_differences(stream: TimeTagStream, max_lag_ps: float) -> np.ndarray:
    """All cross-channel lags t2 - t1 (ps) with |lag| <= max_lag."""
    t1 = stream.channel_times(1)
    t2 = stream.channel_times(2)
    if t1.size == 0 or t2.size == 0:
        raise ValueError("stream has an empty channel")
    lo = np.searchsorted(t2, t1 - max_lag_ps, side="left")
    hi = np.searchsorted(t2, t1 + max_lag_ps, side="right")
    flat, counts = _flat_window_indices(lo, hi)
    return t2[flat] - np.repeat(t1, counts)


def coincidence_histogram(stream: TimeTagStream, bin_width_ps: float,
                          max_lag_ps: float,
                          jitter_sigma_ps=None) -> G2Curve:
    """g2(tau) from the cross-channel lag histogram.

    The histogram is normalized by its accidental floor: the mean count
    of bins with |tau| beyond 5 times the two-detector lag jitter
    sqrt(2) * sigma (per-detector sigma taken from the stream metadata
    unless given), since the zero-delay peak's width is the quadrature
    sum of both channels' jitters. Lags are binned around tau = 0.
    """
    if bin_width_ps <= 0 or max_lag_ps <= 0:
        raise ValueError("bin width and max lag must be positive")
    if jitter_sigma_ps is None:
        jitter_sigma_ps = float(stream.metadata.get("jitter_sigma_ps", 0.0))
    n_half = int(max_lag_ps // bin_width_ps)
    if n_half < 1:
        raise ValueError("max_lag must cover at least one bin each side")
    centers = np.arange(-n_half, n_half + 1, dtype=float) * bin_width_ps
    edges = np.concatenate([centers - bin_width_ps / 2.0,
                            [centers[-1] + bin_width_ps / 2.0]])
    diffs = lag_differences(stream, max_lag_ps + bin_width_ps)
    counts, _ = np.histogram(diffs, edges)
    floor_sel = np.abs(centers) > 5.0 * math.sqrt(2.0) * jitter_sigma_ps
    if not np.any(floor_sel):
        raise ValueError("max_lag too small to estimate the accidental floor")
    floor = float(counts[floor_sel].mean())
    if floor <= 0:
        raise ValueError("no accidental counts to normalize the histogram")
    return G2Curve(lag_ps=centers, g2=counts / floor,
                   counts=counts, floor_counts=floor)


def summarize(n1: float, n2: float, nc: float, t_c_s: float) -> CountSummary:
    """Coincidence statistics from singles/coincidence rates (1/s)."""
    if t_c_s <= 0:
        raise ValueError("coincidence window must be positive")
    if min(n1, n2, nc) < 0:
        raise ValueError("rates must be nonnegative")
    n_a = n1 * n2 * t_c_s
    if n_a == 0:
        if nc > 0:
            raise ValueError("g2 undefined: zero accidental rate with "
                             "nonzero coincidences")
        g2 = math.nan
        car = math.nan
    else:
        g2 = nc / n_a
        car = g2 - 1.0
    return CountSummary(n1=n1, n2=n2, nc=nc, t_c_s=t_c_s,
                        n_a=n_a, n_r=nc - n_a, g2_zero=g2, car=car)


def measure(stream: TimeTagStream, window_ps: float) -> CountSummary:
    """Estimate rates from a stream and summarize them."""
    duration = stream.duration_s
    if duration <= 0:
        raise ValueError("stream has zero duration")
    n1 = int(np.count_nonzero(stream.channels == 1)) / duration
    n2 = int(np.count_nonzero(stream.channels == 2)) / duration
    nc = count_coincidences(stream, window_ps) / duration
    return summarize(n1, n2, nc, window_ps * 1e-12)


# ---------------------------------------------------------------------------
# analytic expectations for the synthesis model

def expected_singles_rates(pair_rate, background_rates, efficiencies):
    """Expected (N1, N2): each pair contributes one photon per channel
    on average before efficiency."""
    n1 = pair_rate * efficiencies[0] + background_rates[0]
    n2 = pair_rate * efficiencies[1] + background_rates[1]
    return n1, n2


def expected_true_rate(pair_rate, efficiencies):
    """Expected real coincidence rate: routing to opposite channels has
    probability 1/2, then both photons must survive."""
    return 0.5 * efficiencies[0] * efficiencies[1] * pair_rate


def expected_g2_zero(config: HbtConfig) -> float:
    n1, n2 = expected_singles_rates(config.pair_rate,
                                    config.background_rates,
                                    config.efficiencies)
    true = expected_true_rate(config.pair_rate, config.efficiencies)
    return 1.0 + true / (n1 * n2 * config.window_ps * 1e-12)


def pair_rate_for_car(car: float, window_ps: float) -> float:
    """Pair rate giving the requested CAR for unit-efficiency,
    background-free detection: CAR = 1 / (2 R_p T_c)."""
    if car <= 0 or window_ps <= 0:
        raise ValueError("car and window must be positive")
    return 1.0 / (2.0 * car * window_ps * 1e-12)


@dataclass(frozen=True)
class PowerPoint:
    power: float
    summary: CountSummary


def run_hbt(config: HbtConfig, seed=0) -> CountSummary:
    stream = synthesize_stream(config.pair_rate, config.background_rates,
                               config.efficiencies, config.jitter_sigma_ps,
                               config.duration_s, seed)
    return measure(stream, config.window_ps)


def power_sweep(config: HbtConfig, powers, seed=0):
    """Repeat the HBT measurement with pair and background rates scaled
    by each power value (both are pump-driven, hence linear in power)."""
    powers = [float(p) for p in powers]
    if any(p <= 0 for p in powers):
        raise ValueError("powers must be positive")
    children = np.random.SeedSequence(seed).spawn(len(powers))
    points = []
    for p, child in zip(powers, children):
        scaled = HbtConfig(
            pair_rate=config.pair_rate * p,
            background_rates=tuple(b * p for b in config.background_rates),
            efficiencies=config.efficiencies,
            jitter_sigma_ps=config.jitter_sigma_ps,
            window_ps=config.window_ps,
            duration_s=config.duration_s,
        )
        points.append(PowerPoint(power=p, summary=run_hbt(scaled, child)))
    return points


# ---------------------------------------------------------------------------
# time-tag file formats

_BINARY_DTYPE = np.dtype([("channel", "u1"), ("timestamp_ps", "<u8")])
assert _BINARY_DTYPE.itemsize == 9

_CSV_HEADER = "channel,timestamp_ps"


def write_timetags_csv(stream: TimeTagStream, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_CSV_HEADER + "\n")
        for ch, ts in zip(stream.channels, stream.timestamps_ps):
            fh.write(f"{int(ch)},{int(ts)}\n")


def read_timetags_csv(path, duration_ps=None) -> TimeTagStream:
    chans, times = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line == _CSV_HEADER:
                continue
            ch, ts = line.split(",")
            chans.append(int(ch))
            times.append(int(ts))
    times = np.asarray(times, dtype=np.uint64)
    if duration_ps is None:
        duration_ps = int(times[-1]) if times.size else 0
    return TimeTagStream(channels=np.asarray(chans, dtype=np.uint8),
                         timestamps_ps=times, duration_ps=duration_ps,
                         metadata={"source": str(path)})


def write_timetags_binary(stream: TimeTagStream, path) -> None:
    """9-byte records: 1 byte channel + 8-byte little-endian picoseconds."""
    rec = np.empty(stream.channels.size, dtype=_BINARY_DTYPE)
    rec["channel"] = stream.channels
    rec["timestamp_ps"] = stream.timestamps_ps
    rec.tofile(path)


def read_timetags_binary(path, duration_ps=None) -> TimeTagStream:
    rec = np.fromfile(path, dtype=_BINARY_DTYPE)
    times = rec["timestamp_ps"].astype(np.uint64)
    if duration_ps is None:
        duration_ps = int(times[-1]) if times.size else 0
    return TimeTagStream(channels=rec["channel"].astype(np.uint8),
                         timestamps_ps=times, duration_ps=duration_ps,
                         metadata={"source": str(path)})
