"""Event-driven simulation of a 2D ideal gas with selective membranes.

Particles fly ballistically in a ``width x height`` box and never interact
with each other. They bounce off the box walls (specularly, or with a
velocity redrawn from the wall flux distribution at temperature ``T`` when
``thermal_walls`` is on) and off vertical membranes that block a chosen
subset of them. A membrane moving at speed ``u`` reflects a particle
elastically in its own rest frame, ``vx -> 2u - vx``, and the kinetic
energy the particle loses is booked as work done on the membrane.

Since the particles are independent, every particle follows its own exact
event sequence (wall hit, membrane hit, crossing of the mid-line) and the
scheduler advances all of them at once with numpy. Events are merged in
time order only for the ledger.

Energy bookkeeping, with k = m = 1::

    kinetic energy + work (on membranes) + heat (into walls) = const

The un-mixing protocol sweeps one membrane that holds back left-origin
particles from the right wall to the middle, then one that holds back
right-origin particles from the left wall to the middle. The work put in,
divided by ``T``, approaches ``2 N ln 2`` from above as the membranes slow
down.
"""
import hashlib
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.stats import chisquare

from .errors import ConfigError, DomainError, PreconditionError, QuasiStaticityError
from .mixing import et_distribution

__all__ = [
    "LEFT",
    "RIGHT",
    "DemonConfig",
    "Membrane",
    "ParticleEnsemble",
    "EventLedger",
    "DemonResult",
    "init_ensemble",
    "evolve",
    "remove_partition",
    "insert_membrane",
    "selective_sweep",
    "passes_origin",
    "passes_species",
    "passes_all",
    "passes_none",
    "sample_left_counts",
    "left_count_chisquare",
    "run_demon_protocol",
    "measure_mixing_entropy_by_demon",
    "LadderRung",
    "replica_seed",
    "speed_ladder",
]

LEFT, RIGHT = 0, 1

_WALL, _THERMAL, _CROSS, _MEMBRANE, _MARK = range(5)
_KIND_NAMES = ("wall", "thermal_wall", "crossing", "membrane")


@dataclass(frozen=True)
class DemonConfig:
    """Parameters of one demon run.

    ``membrane_speed`` is in units of length per time and must not exceed
    ``quasi_static_limit * sqrt(T)``. ``mixing_time`` defaults to 20 times
    the thermal crossing time of the box width. ``species`` holds the
    species tags of the left and right gas; they never affect the dynamics.
    """

    N_per_side: int = 500
    box: tuple = (1.0, 1.0)
    T: float = 1.0
    membrane_speed: float = 0.005
    seed: int = 0
    thermal_walls: bool = True
    species: tuple = ("A", "A")
    mixing_time: float = None
    quasi_static_limit: float = 0.01

    def __post_init__(self):
        if int(self.N_per_side) != self.N_per_side or self.N_per_side < 0:
            raise ConfigError("N_per_side must be a nonnegative integer", field="N_per_side")
        if len(self.box) != 2 or not all(b > 0 for b in self.box):
            raise ConfigError("box must be two positive lengths", field="box")
        if not self.T > 0:
            raise ConfigError("T must be positive", field="T")
        if not self.membrane_speed > 0:
            raise ConfigError("membrane_speed must be positive", field="membrane_speed")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must fit in 64 unsigned bits", field="seed")
        if self.mixing_time is not None and self.mixing_time < 0:
            raise ConfigError("mixing_time must be >= 0", field="mixing_time")
        if len(self.species) != 2:
            raise ConfigError("species must name the left and right gas", field="species")
        check_quasi_static(self.membrane_speed, self.T, self.quasi_static_limit)

    @property
    def thermal_speed(self):
        return math.sqrt(self.T)

    @property
    def resolved_mixing_time(self):
        if self.mixing_time is not None:
            return float(self.mixing_time)
        return 20.0 * self.box[0] / self.thermal_speed


def check_quasi_static(speed, T, limit):
    if abs(speed) > limit * math.sqrt(T) * (1 + 1e-12):
        raise QuasiStaticityError(
            f"membrane speed {speed} exceeds {limit} * sqrt(T) = {limit * math.sqrt(T)}",
            field="membrane_speed")


@dataclass(eq=False)
class Membrane:
    """A vertical line at ``x0 + u (t - t0)`` that reflects the particles flagged in ``blocks``.

    ``side`` records on which side (-1 left, +1 right) each particle was when
    the membrane was put in; blocked particles never change side.
    """

    x0: float
    u: float
    t0: float
    blocks: np.ndarray
    side: np.ndarray
    name: str = "membrane"
    work: float = 0.0

    def position(self, t):
        return self.x0 + self.u * (t - self.t0)


class EventLedger:
    """Time-ordered record of collision events and protocol markers.

    Each record has ``event_time``, ``event_kind``, ``work_delta`` (work done
    on membranes), ``heat_delta`` (energy given to the walls) and
    ``left_count`` (particles left of the mid-line after the event).
    Mid-line crossings are used to track ``left_count`` but are only written
    out when ``record_crossings`` is set.
    """

    def __init__(self, record_crossings=False):
        self.record_crossings = record_crossings
        self._chunks = []
        self._labels = {}

    def _append(self, times, kinds, work, heat, left):
        if not self.record_crossings:
            keep = kinds != _CROSS
            times, kinds, work, heat, left = times[keep], kinds[keep], work[keep], heat[keep], left[keep]
        if times.size:
            self._chunks.append((times, kinds, work, heat, left))

    def mark(self, time, label, left_count):
        code = self._labels.setdefault(label, 100 + len(self._labels))
        self._chunks.append((np.array([time]), np.array([code]), np.zeros(1), np.zeros(1),
                             np.array([left_count])))

    def __len__(self):
        return sum(c[0].size for c in self._chunks)

    def _kind_name(self, code):
        if code < len(_KIND_NAMES):
            return _KIND_NAMES[code]
        return next(label for label, c in self._labels.items() if c == code)

    def arrays(self):
        if not self._chunks:
            empty = np.zeros(0)
            return empty, np.zeros(0, int), empty, empty, np.zeros(0, int)
        return tuple(np.concatenate([c[i] for c in self._chunks]) for i in range(5))

    def records(self):
        names = {}
        for times, kinds, work, heat, left in self._chunks:
            for t, k, w, q, n in zip(times.tolist(), kinds.tolist(), work.tolist(),
                                     heat.tolist(), left.tolist()):
                if k not in names:
                    names[k] = self._kind_name(k)
                yield {"event_time": t, "event_kind": names[k], "work_delta": w,
                       "heat_delta": q, "left_count": int(n)}

    def write_jsonl(self, fh):
        for r in self.records():
            fh.write('{"event_time":%r,"event_kind":"%s","work_delta":%r,"heat_delta":%r,"left_count":%d}\n'
                     % (r["event_time"], r["event_kind"], r["work_delta"], r["heat_delta"], r["left_count"]))

    def to_jsonl(self):
        buf = io.StringIO()
        self.write_jsonl(buf)
        return buf.getvalue()

    def checksum(self):
        return hashlib.sha256(self.to_jsonl().encode()).hexdigest()


@dataclass(eq=False)
class ParticleEnsemble:
    """Positions, velocities and tags of all particles plus the energy ledgers.

    ``work`` is the cumulative work done on membranes by particle impacts
    and ``heat`` the cumulative energy handed to the thermal walls, so
    ``kinetic_energy() + work + heat`` stays at its initial value.
    """

    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    origin: np.ndarray
    species: np.ndarray
    width: float
    height: float
    T: float
    thermal_walls: bool
    rng: np.random.Generator
    time: float = 0.0
    work: float = 0.0
    heat: float = 0.0
    membranes: list = field(default_factory=list)
    ledger: EventLedger = None
    n_events: int = 0
    samples: list = field(default_factory=list)

    def __post_init__(self):
        self.left = self.x < 0.5 * self.width
        self.initial_energy = self.kinetic_energy()

    @property
    def size(self):
        return self.x.size

    def kinetic_energy(self):
        return 0.5 * math.fsum(self.vx**2 + self.vy**2)

    def left_count(self):
        return int(self.left.sum())

    def energy_residual(self):
        """Relative violation of ``KE + work + heat = KE_0``."""
        total = math.fsum((self.kinetic_energy(), self.work, self.heat, -self.initial_energy))
        return abs(total) / max(self.initial_energy, 1e-300)

    def copy(self):
        """Deep copy, including the random generator state."""
        rng = np.random.Generator(type(self.rng.bit_generator)())
        rng.bit_generator.state = self.rng.bit_generator.state
        new = replace(self, x=self.x.copy(), y=self.y.copy(), vx=self.vx.copy(), vy=self.vy.copy(),
                      origin=self.origin.copy(), species=self.species.copy(), rng=rng,
                      membranes=[replace(m, blocks=m.blocks.copy(), side=m.side.copy())
                                 for m in self.membranes],
                      ledger=None, samples=list(self.samples))
        new.left = self.left.copy()
        new.initial_energy = self.initial_energy
        return new


def _mark(e, label):
    if e.ledger is not None:
        e.ledger.mark(e.time, label, e.left_count())


def init_ensemble(cfg, ledger=None):
    """Place ``N_per_side`` particles uniformly in each half with Maxwellian velocities.

    A partition that blocks every particle sits at mid-width.
    """
    rng = np.random.default_rng(int(cfg.seed))
    n = cfg.N_per_side
    width, height = map(float, cfg.box)
    half = 0.5 * width
    x = np.concatenate([rng.uniform(0.0, half, n), rng.uniform(half, width, n)])
    y = rng.uniform(0.0, height, 2 * n)
    sigma = math.sqrt(cfg.T)
    vx = rng.normal(0.0, sigma, 2 * n)
    vy = rng.normal(0.0, sigma, 2 * n)
    origin = np.repeat(np.array([LEFT, RIGHT], dtype=np.int8), n)
    species = np.repeat(np.array(cfg.species, dtype=object), n)
    e = ParticleEnsemble(x, y, vx, vy, origin, species, width, height, float(cfg.T),
                         bool(cfg.thermal_walls), rng, ledger=ledger)
    insert_membrane(e, half, passes_none, name="partition")
    return e


# -- selectors: which particles a membrane lets through ---------------------

def passes_origin(origin):
    code = {"left": LEFT, "right": RIGHT}.get(origin, origin)
    return lambda e: e.origin == code


def passes_species(name):
    return lambda e: e.species == name


def passes_all(e):
    return np.ones(e.size, dtype=bool)


def passes_none(e):
    return np.zeros(e.size, dtype=bool)


def insert_membrane(e, x, selector, u=0.0, name="membrane"):
    """Put a membrane at ``x`` that is transparent to the particles picked by ``selector``."""
    if not 0.0 <= x <= e.width:
        raise DomainError(f"membrane position {x} outside the box")
    blocks = ~np.asarray(selector(e), dtype=bool)
    side = np.where(e.x < x, -1, 1).astype(np.int8)
    m = Membrane(float(x), float(u), e.time, blocks, side, name)
    e.membranes.append(m)
    return m


def remove_partition(e):
    """Take out the membrane named ``"partition"``."""
    before = len(e.membranes)
    e.membranes = [m for m in e.membranes if m.name != "partition"]
    if len(e.membranes) == before:
        raise PreconditionError("no partition to remove")
    _mark(e, "partition_removed")
    return e


# -- event loop -----------------------------------------------------------

def _next_events(e, idx, tp):
    x, y, vx, vy = e.x[idx], e.y[idx], e.vx[idx], e.vy[idx]
    inf = np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(vx > 0, (e.width - x) / vx, np.where(vx < 0, x / -vx, inf))
        ty = np.where(vy > 0, (e.height - y) / vy, np.where(vy < 0, y / -vy, inf))
        mid = 0.5 * e.width
        left = e.left[idx]
        tc = np.where(left & (vx > 0), (mid - x) / vx,
                      np.where(~left & (vx < 0), (x - mid) / -vx, inf))
        cols = [tx, ty, tc]
        for m in e.membranes:
            blocked = m.blocks[idx]
            rel = vx - m.u
            closing = blocked & (m.side[idx] * rel < 0)
            d = x - m.position(tp)
            cols.append(np.where(closing, -d / rel, inf))
    times = np.maximum(np.stack(cols), 0.0)
    kind = np.argmin(times, axis=0)
    return times[kind, np.arange(idx.size)], kind


def _thermal_redraw(e, n):
    sigma = math.sqrt(e.T)
    return e.rng.rayleigh(sigma, n), e.rng.normal(0.0, sigma, n)


def _advance(e, duration):
    if duration < 0:
        raise DomainError("duration must be >= 0")
    t_end = e.time + duration
    if duration == 0:
        return e
    n = e.size
    tp = np.full(n, e.time)
    idx = np.arange(n)
    record = e.ledger is not None
    log = []
    left_start = e.left_count()
    n_membranes = len(e.membranes)

    while idx.size:
        dt, kind = _next_events(e, idx, tp[idx])
        due = tp[idx] + dt <= t_end
        idx, dt, kind = idx[due], dt[due], kind[due]
        if not idx.size:
            break
        e.x[idx] += e.vx[idx] * dt
        e.y[idx] += e.vy[idx] * dt
        tp[idx] += dt
        e.n_events += idx.size
        work = np.zeros(idx.size)
        heat = np.zeros(idx.size)
        dleft = np.zeros(idx.size, dtype=np.int64)
        codes = np.full(idx.size, _THERMAL if e.thermal_walls else _WALL)

        for axis, pos, vel, length in ((0, e.x, e.vx, e.width), (1, e.y, e.vy, e.height)):
            sel = kind == axis
            if not sel.any():
                continue
            j = idx[sel]
            outward = vel[j] > 0
            pos[j] = np.where(outward, length, 0.0)
            if e.thermal_walls:
                ke_old = 0.5 * (e.vx[j] ** 2 + e.vy[j] ** 2)
                normal, tangent = _thermal_redraw(e, j.size)
                other = e.vy if axis == 0 else e.vx
                vel[j] = np.where(outward, -normal, normal)
                other[j] = tangent
                heat[sel] = ke_old - 0.5 * (e.vx[j] ** 2 + e.vy[j] ** 2)
            else:
                vel[j] = -vel[j]

        sel = kind == 2
        if sel.any():
            j = idx[sel]
            e.x[j] = 0.5 * e.width
            e.left[j] = ~e.left[j]
            dleft[sel] = np.where(e.left[j], 1, -1)
            codes[sel] = _CROSS

        for k in range(n_membranes):
            sel = kind == 3 + k
            if not sel.any():
                continue
            m = e.membranes[k]
            j = idx[sel]
            e.x[j] = m.position(tp[j])
            v_old = e.vx[j]
            v_new = 2.0 * m.u - v_old
            e.vx[j] = v_new
            w = 0.5 * (v_old**2 - v_new**2)
            work[sel] = w
            m.work += math.fsum(w)
            codes[sel] = _MEMBRANE

        e.work += math.fsum(work)
        e.heat += math.fsum(heat)
        if record:
            log.append((tp[idx].copy(), codes, work, heat, dleft))

    rest = t_end - tp
    # no event is due before t_end, so the clip only removes rounding
    np.clip(e.x + e.vx * rest, 0.0, e.width, out=e.x)
    np.clip(e.y + e.vy * rest, 0.0, e.height, out=e.y)
    e.time = t_end

    if record and log:
        times, codes, work, heat, dleft = (np.concatenate([b[i] for b in log]) for i in range(5))
        order = np.argsort(times, kind="stable")
        left = left_start + np.cumsum(dleft[order])
        e.ledger._append(times[order], codes[order], work[order], heat[order], left)
    return e


def _sample(e):
    n = max(e.size, 1)
    e.samples.append((e.time, e.kinetic_energy() / n, e.left_count()))


def evolve(e, duration, chunks=1):
    """Advance the ensemble by ``duration`` (in place; the ensemble is returned).

    The run is split into ``chunks`` equal pieces; after each the time,
    kinetic energy per particle and left count are appended to ``e.samples``.
    """
    if duration < 0:
        raise DomainError("duration must be >= 0")
    if duration == 0:
        return e
    step = duration / chunks
    t_end = e.time + duration
    for i in range(chunks):
        _advance(e, (t_end - e.time) if i == chunks - 1 else step)
        _sample(e)
    return e


def selective_sweep(e, selector, from_x, to_x, speed, membrane=None, quasi_static_limit=0.01,
                    chunks=None):
    """Move a membrane transparent to ``selector`` from ``from_x`` to ``to_x`` at ``speed``.

    Particles that the selector rejects are reflected and push on the
    membrane. When ``membrane`` is given that membrane is moved (it must
    sit at ``from_x``); otherwise a new one is inserted. It stays at
    ``to_x`` afterwards.

    Returns
    -------
    work : float
        Work done on the gas by the membrane, positive for compression.
    e : ParticleEnsemble
        The same ensemble, advanced to the end of the sweep.
    """
    if not e.thermal_walls:
        raise PreconditionError("an isothermal sweep needs thermal walls")
    check_quasi_static(speed, e.T, quasi_static_limit)
    if not (0.0 <= from_x <= e.width and 0.0 <= to_x <= e.width):
        raise DomainError("sweep must stay inside the box")
    distance = to_x - from_x
    if membrane is None:
        membrane = insert_membrane(e, from_x, selector, name="sweep")
    elif not math.isclose(membrane.position(e.time), from_x, abs_tol=1e-12):
        raise PreconditionError("membrane is not at from_x")
    if distance == 0:
        return 0.0, e
    membrane.x0, membrane.t0 = float(from_x), e.time
    membrane.u = math.copysign(speed, distance)
    start_work = membrane.work
    duration = abs(distance) / speed
    _mark(e, f"sweep_start:{membrane.name}")
    evolve(e, duration, chunks or max(1, int(math.ceil(duration))))
    membrane.x0, membrane.u, membrane.t0 = float(to_x), 0.0, e.time
    _mark(e, f"sweep_end:{membrane.name}")
    return -(membrane.work - start_work), e


def sample_left_counts(e, n_samples, interval):
    """Left-half occupation recorded every ``interval`` time units."""
    counts = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        _advance(e, interval)
        counts[i] = e.left_count()
    return counts


def left_count_chisquare(counts, n_particles, min_expected=5.0):
    """Chi-square test of sampled left counts against the binomial law for equal halves.

    Outcomes with small expected frequency are pooled with their neighbours
    (from both tails inward) until every bin expects at least ``min_expected``.

    Returns
    -------
    statistic, pvalue : float
    dof : int
    """
    counts = np.asarray(counts)
    if counts.size == 0:
        raise DomainError("no samples")
    if counts.min() < 0 or counts.max() > n_particles:
        raise DomainError("left counts outside [0, n_particles]")
    expected = et_distribution(n_particles, 1.0, 1.0) * counts.size
    observed = np.bincount(counts, minlength=n_particles + 1).astype(float)
    edges = _pooled_edges(expected, min_expected)
    exp_binned = np.add.reduceat(expected, edges)
    obs_binned = np.add.reduceat(observed, edges)
    # renormalise so both totals agree to rounding
    exp_binned *= obs_binned.sum() / exp_binned.sum()
    stat, pvalue = chisquare(obs_binned, exp_binned)
    return float(stat), float(pvalue), len(edges) - 1


def _pooled_edges(expected, min_expected):
    n = expected.size
    lo, acc = 0, 0.0
    while lo < n - 1 and acc + expected[lo] < min_expected:
        acc += expected[lo]
        lo += 1
    hi, acc = n - 1, 0.0
    while hi > lo and acc + expected[hi] < min_expected:
        acc += expected[hi]
        hi -= 1
    # first bin takes [0, lo], middle bins single outcomes, last bin [hi, n-1]
    edges = [0] + list(range(lo + 1, hi))
    if hi > lo:
        edges.append(hi)
    return np.array(edges)


@dataclass(frozen=True)
class DemonResult:
    N_per_side: int
    T: float
    membrane_speed: float
    work_left: float
    work_right: float
    mean_kinetic_energy: float
    energy_residual: float
    n_events: int

    @property
    def work_total(self):
        return self.work_left + self.work_right

    @property
    def entropy(self):
        """Un-mixing work divided by T."""
        return self.work_total / self.T

    @property
    def target(self):
        return 2.0 * self.N_per_side * math.log(2.0)

    @property
    def relative_deviation(self):
        return (self.entropy - self.target) / self.target if self.target else 0.0

    def summary(self):
        return {
            "n_per_side": self.N_per_side,
            "T": self.T,
            "membrane_speed": self.membrane_speed,
            "work_left": self.work_left,
            "work_right": self.work_right,
            "work_total": self.work_total,
            "work_total_over_T": self.entropy,
            "target": self.target,
            "relative_deviation": self.relative_deviation,
            "mean_kinetic_energy": self.mean_kinetic_energy,
            "energy_residual": self.energy_residual,
            "n_events": self.n_events,
        }


def run_demon_protocol(cfg, ledger=None):
    """Mix two same-species gases, then separate them by origin with two membranes.

    Returns a :class:`DemonResult`; ``entropy`` is the work invested
    divided by ``T``.
    """
    if cfg.species[0] != cfg.species[1]:
        warnings.warn("the demon protocol is meant for one species on both sides", stacklevel=2)
    e = init_ensemble(cfg, ledger=ledger)
    if cfg.N_per_side == 0:
        return DemonResult(0, cfg.T, cfg.membrane_speed, 0.0, 0.0, cfg.T, 0.0, 0)
    width = e.width
    limit = cfg.quasi_static_limit
    remove_partition(e)
    evolve(e, cfg.resolved_mixing_time)
    mixing_samples = len(e.samples)

    hold_left = insert_membrane(e, width, passes_origin(RIGHT), name="left-gas")
    work_left, _ = selective_sweep(e, None, width, 0.5 * width, cfg.membrane_speed,
                                   membrane=hold_left, quasi_static_limit=limit)
    hold_right = insert_membrane(e, 0.0, passes_origin(LEFT), name="right-gas")
    work_right, _ = selective_sweep(e, None, 0.0, 0.5 * width, cfg.membrane_speed,
                                    membrane=hold_right, quasi_static_limit=limit)
    sweep_ke = [s[1] for s in e.samples[mixing_samples:]]
    return DemonResult(cfg.N_per_side, cfg.T, cfg.membrane_speed, work_left, work_right,
                       float(np.mean(sweep_ke)), e.energy_residual(), e.n_events)


def measure_mixing_entropy_by_demon(cfg):
    """Work needed to un-mix by origin, over ``T``; tends to ``2 N ln 2``."""
    return run_demon_protocol(cfg).entropy


class LadderRung(NamedTuple):
    factor: float
    runs: tuple

    @property
    def membrane_speed(self):
        return self.runs[0].membrane_speed

    @property
    def mean_entropy(self):
        return math.fsum(r.entropy for r in self.runs) / len(self.runs)

    @property
    def mean_relative_deviation(self):
        target = self.runs[0].target
        return (self.mean_entropy - target) / target if target else 0.0


def replica_seed(seed, i):
    """Seed of replica ``i``; replica 0 keeps the base seed."""
    if i == 0:
        return int(seed)
    return int(np.random.SeedSequence([int(seed), i]).generate_state(1, np.uint64)[0])


def speed_ladder(cfg, factors=(0.02, 0.01, 0.005), replicas=1):
    """Run the protocol at ``membrane_speed = f * sqrt(T)`` for each factor ``f``.

    Each rung averages ``replicas`` independent runs; the same replica seeds
    are used on every rung. Excess work shrinks roughly in proportion to the
    speed, while the run-to-run scatter from temperature fluctuations of a
    finite gas shrinks only like its square root, so slow rungs need
    replicas to resolve the approach to the target.
    """
    if replicas < 1:
        raise DomainError("replicas must be >= 1")
    rungs = []
    for f in factors:
        runs = tuple(run_demon_protocol(replace(cfg, membrane_speed=f * cfg.thermal_speed,
                                                seed=replica_seed(cfg.seed, i)))
                     for i in range(replicas))
        rungs.append(LadderRung(f, runs))
    return rungs
