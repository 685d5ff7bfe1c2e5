"""Experiment orchestration: Monte Carlo regret curves, cold-start estimation,
the anytime restart wrapper, strict JSON configs, CSV emission, and the
self-check suites behind the verify subcommand."""

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, PreferenceModel, OracleView, GENERIC, USER_STRUCTURE, ITEM_STRUCTURE
from .engine import run_trial
from .baselines import RandomRecommender, OmniscientRecommender
from .cf_user import UserUserParams, NoisyPartitionParams, user_user, noisy_user_user
from .cf_item import ItemItemParams, item_item
from . import regcheck
from .bounds import evaluate_bound, BOUND_KINDS

ALGORITHMS = ("Random", "Omniscient", "UserUser", "UserUserNoisy", "ItemItem")
SCHEDULES = ("PowersOfTwo", "DoubleExponential")

_MODEL_KEYS = {"n_users", "n_user_types", "n_item_types", "noise", "mode", "seed"}
_TOP_KEYS = {"model", "algorithm", "algorithm_params", "horizon", "trials",
             "base_seed", "anytime", "anytime_schedule", "coldstart_gammas",
             "emit_bounds"}
_ALGO_PARAM_KEYS = {
    "Random": set(),
    "Omniscient": {"max_rounds"},
    "UserUser": {"r"},
    "UserUserNoisy": {"r"},
    "ItemItem": {"r", "ell", "m_pool", "c_log", "c_sqrt", "c_pool"},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    model: dict
    algorithm: str
    horizon: int
    base_seed: int = 0
    trials: int = 100
    algorithm_params: dict = field(default_factory=dict)
    anytime: bool = False
    anytime_schedule: str = "PowersOfTwo"
    coldstart_gammas: list = field(default_factory=list)
    emit_bounds: list = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.anytime_schedule not in SCHEDULES:
            raise ConfigError(f"unknown anytime_schedule {self.anytime_schedule!r}")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ConfigError("horizon must be a positive integer")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not isinstance(self.base_seed, int) or self.base_seed < 0:
            raise ConfigError("base_seed must be a nonnegative integer")
        extra = set(self.model) - _MODEL_KEYS
        if extra:
            raise ConfigError(f"unknown model fields: {sorted(extra)}")
        if "n_users" not in self.model:
            raise ConfigError("model.n_users is required")
        if "seed" in self.model:
            warnings.warn("model.seed is overridden per trial by base_seed + k")
        bad = set(self.algorithm_params) - _ALGO_PARAM_KEYS[self.algorithm]
        if bad:
            raise ConfigError(f"unknown algorithm_params for {self.algorithm}: {sorted(bad)}")
        for g in self.coldstart_gammas:
            if not 0.0 < g < 1.0:
                raise ConfigError(f"coldstart threshold {g} outside (0,1)")
        for kind in self.emit_bounds:
            if kind not in BOUND_KINDS:
                raise ConfigError(f"unknown bound kind {kind!r}")
        try:
            self.model_params(seed=0)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid model: {e}") from e

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config root must be an object")
        extra = set(d) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        for key in ("model", "algorithm", "horizon"):
            if key not in d:
                raise ConfigError(f"missing required field {key!r}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        return cls.from_dict(d)

    def model_params(self, seed):
        kw = {k: v for k, v in self.model.items() if k != "seed"}
        return ModelParams(seed=seed, **kw)


@dataclass
class RegretCurve:
    t: np.ndarray
    regret_mean: np.ndarray
    regret_se: np.ndarray
    slope_mean: np.ndarray

    @property
    def horizon(self):
        return len(self.t)

    def validate(self):
        assert np.all(np.diff(self.regret_mean) >= -1e-12)
        assert np.all(self.regret_mean >= -1e-12)
        assert np.all(self.regret_mean <= self.t + 1e-9)
        assert np.all((self.slope_mean >= -1e-12) & (self.slope_mean <= 1 + 1e-12))
        recon = np.cumsum(self.slope_mean)
        assert np.allclose(recon, self.regret_mean, atol=1e-9)


def _algo_seed(trial_seed, stream):
    ss = np.random.SeedSequence([int(trial_seed), 1, int(stream)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _construct(cfg, horizon, seed, model):
    mp = model.params
    a = cfg.algorithm
    ap = cfg.algorithm_params
    if a == "Random":
        return RandomRecommender(mp.n_users, seed=seed)
    if a == "Omniscient":
        return OmniscientRecommender(mp.n_users, OracleView(model), **ap)
    if a == "UserUser":
        p = UserUserParams(horizon=horizon, n_users=mp.n_users,
                           n_user_types=mp.n_user_types, seed=seed, r=ap.get("r"))
        return user_user(p)
    if a == "UserUserNoisy":
        noisy = NoisyPartitionParams.for_run(gamma=mp.noise, n_users=mp.n_users, r=ap.get("r"))
        p = UserUserParams(horizon=horizon, n_users=mp.n_users,
                           n_user_types=mp.n_user_types, seed=seed)
        return noisy_user_user(p, noisy)
    p = ItemItemParams(horizon=horizon, n_users=mp.n_users,
                       n_item_types=mp.n_item_types, seed=seed, **ap)
    return item_item(p)


def epoch_lengths(schedule):
    if schedule == "PowersOfTwo":
        k = 1
        while True:
            yield 2 ** k
            k += 1
    else:
        k = 1
        while True:
            yield 2 ** (2 ** k)
            k += 1


class AnytimeRecommender:
    """Restarts a fixed-horizon recommender on geometrically growing epochs.
    The engine's at-most-once rule spans restarts; inner state does not."""

    def __init__(self, factory, schedule="PowersOfTwo"):
        if schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {schedule!r}")
        self.factory = factory
        self._lengths = epoch_lengths(schedule)
        self.inner = None
        self.epoch_start = 0
        self.epoch_end = 0
        self.epochs_started = 0
        self.last_labels = None
        self._source = None

    def setup(self, source):
        self._source = source

    def step(self, t, view, source):
        if t > self.epoch_end:
            length = next(self._lengths)
            self.epoch_start = self.epoch_end
            self.epoch_end += length
            self.inner = self.factory(length)
            self.epochs_started += 1
            setup = getattr(self.inner, "setup", None)
            if setup is not None:
                setup(source)
        out = self.inner.step(t - self.epoch_start, view, source)
        self.last_labels = getattr(self.inner, "last_labels", None)
        return out

    def observe(self, t, values):
        obs = getattr(self.inner, "observe", None)
        if obs is not None:
            obs(t - self.epoch_start, values)


def build_recommender(cfg, trial_seed, model):
    if not cfg.anytime:
        return _construct(cfg, cfg.horizon, _algo_seed(trial_seed, 0), model)
    counter = itertools.count(1)

    def factory(epoch_len):
        return _construct(cfg, epoch_len, _algo_seed(trial_seed, next(counter)), model)

    return AnytimeRecommender(factory, cfg.anytime_schedule)


def _structure_warnings(mp):
    lg = math.log2(mp.n_users)
    if mp.n_user_types is not None and mp.n_user_types < lg:
        warnings.warn(f"n_user_types={mp.n_user_types} below log2(n_users)={lg:.1f}")
    if mp.n_item_types is not None and mp.n_item_types < lg:
        warnings.warn(f"n_item_types={mp.n_item_types} below log2(n_users)={lg:.1f}")


def run_experiment(cfg, on_trial=None):
    T, R = cfg.horizon, cfg.trials
    _structure_warnings(cfg.model_params(seed=0))
    per_trial = np.empty((R, T), dtype=np.float64)
    for k in range(R):
        trial_seed = cfg.base_seed + k
        model = PreferenceModel(cfg.model_params(seed=trial_seed))
        rec = build_recommender(cfg, trial_seed, model)
        res = run_trial(model, rec, T)
        per_trial[k] = res.cum_regret()
        if on_trial is not None:
            on_trial(k, model, rec, res)
    mean = per_trial.mean(axis=0)
    if R > 1:
        se = per_trial.std(axis=0, ddof=1) / np.sqrt(R)
    else:
        se = np.zeros(T)
    slope = np.diff(mean, prepend=0.0)
    curve = RegretCurve(np.arange(1, T + 1, dtype=np.int64), mean, se, slope)
    curve.validate()
    return curve


def coldstart(curve, gamma):
    if not 0.0 < gamma < 1.0:
        raise ValueError("threshold must lie in (0,1)")
    ratio = curve.regret_mean / curve.t
    hits = np.nonzero(ratio <= gamma)[0]
    return int(hits[0] + 1) if len(hits) else None


def bound_overlays(cfg):
    mp = cfg.model_params(seed=0)
    out = []
    for kind in cfg.emit_bounds:
        out.append(evaluate_bound(kind, cfg.horizon, n_users=mp.n_users,
                                  n_user_types=mp.n_user_types,
                                  n_item_types=mp.n_item_types,
                                  gamma=mp.noise))
    return out


def emit_csv(curve, bound_curves, path):
    for b in bound_curves:
        if len(b.values) != curve.horizon:
            raise ValueError("bound curve horizon mismatch")
    header = ["t", "regret_mean", "regret_se", "slope_mean"]
    header += [b.column_name() for b in bound_curves]
    cols = [curve.regret_mean, curve.regret_se, curve.slope_mean]
    cols += [b.values for b in bound_curves]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(curve.horizon):
            row = [str(int(curve.t[i]))] + ["%.6g" % c[i] for c in cols]
            fh.write(",".join(row) + "\n")


def verify_regularity(seed=0):
    checks = []
    rng = np.random.default_rng(seed)
    hits = sum(regcheck.is_column_regular(rng.choice([-1, 1], size=(4096, 8)).astype(np.int8), 2, 0.5)
               for _ in range(500))
    checks.append(("regular-fraction m=4096 n=8 r=2 eps=0.5",
                   hits / 500 >= 0.99, f"fraction={hits / 500:.3f}"))
    worst = 0.0
    for q in range(1, 13):
        asp = regcheck.all_sign_patterns(q)
        for r in range(1, q + 1):
            worst = max(worst, regcheck.column_deviation(asp, r))
    checks.append(("enumerated-patterns exact regularity q<=12",
                   worst == 0.0, f"max deviation={worst}"))
    kept = 0
    ok = True
    attempts = 0
    while kept < 200 and attempts < 500:
        attempts += 1
        mat = rng.choice([-1, 1], size=(2048, 6)).astype(np.int8)
        d3 = regcheck.column_deviation(mat, 3)
        if d3 <= 0.5:
            kept += 1
            for s in (1, 2):
                ok = ok and regcheck.column_deviation(mat, s) <= 0.5
    checks.append(("sub-subset regularity inherited on 200 regular draws",
                   ok and kept == 200, f"kept={kept}"))
    agree = True
    for _ in range(200):
        m = int(rng.integers(8, 33))
        n = int(rng.integers(3, 6))
        r = int(rng.integers(1, 3))
        mat = rng.choice([-1, 1], size=(m, n)).astype(np.int8)
        for eps in (0.1, 0.3, 0.5, 1.0):
            if regcheck.is_column_regular(mat, r, eps) != regcheck.reference_column_regular(mat, r, eps):
                agree = False
    checks.append(("independent implementations agree on 200 instances", agree, ""))
    return checks


def verify_ballsbins(seed=0, trials=100_000):
    checks = []
    rng = np.random.default_rng(seed)
    wins = sum(regcheck.balls_bins_nonempty(16, 64, rng) >= 8 for _ in range(trials))
    phat = wins / trials
    sigma = math.sqrt(max(phat * (1 - phat), 1e-12) / trials)
    floor = regcheck.occupancy_tail_bound(16, 64) - 3 * sigma
    checks.append(("occupancy tail m=16 n=64", phat >= floor,
                   f"phat={phat:.5f} floor={floor:.5f}"))
    draws = np.array([regcheck.balls_bins_nonempty(10, 10, rng) for _ in range(trials)])
    mean = float(draws.mean())
    se = float(draws.std(ddof=1)) / math.sqrt(trials)
    expect = regcheck.expected_nonempty(10, 10)
    checks.append(("mean nonempty bins n=10 m=10", abs(mean - expect) <= 3 * se,
                   f"mean={mean:.4f} expect={expect:.4f} se={se:.5f}"))
    return checks
