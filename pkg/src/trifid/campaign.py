"""Seeded Monte Carlo verification campaigns.

Every sample draws from its own generator seeded by
``(master_seed, kind, dim, index)``, so a report does not depend on how the
samples are split into blocks or spread over worker processes.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .fidelity import fidelity_from_roots_batch
from .io import num
from .linalg import matrix_sqrt_psd_batch
from .reconstruction import verify_roundtrip
from .states import PureState, random_density_matrix, random_pure_vector, sample_rng
from .triples import lemma3_closed_form, lemma3_numeric_oracle, slack_batch

KINDS = ("pure-triple", "mixed-triple", "roundtrip", "lemma3")
STREAM = {kind: i for i, kind in enumerate(KINDS)}
BLOCK = 2000
SEED_ENV = "TRIFID_SEED"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    kind: str
    dims: tuple
    samples: int
    master_seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        dims = tuple(self.dims)
        if not dims or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
            raise ConfigError("dims must be a nonempty list of integers")
        lowest = 1 if self.kind == "roundtrip" else 2
        if min(dims) < lowest:
            raise ConfigError(f"dims must all be >= {lowest} for kind {self.kind}")
        if not isinstance(self.samples, int) or isinstance(self.samples, bool) or self.samples < 1:
            raise ConfigError("samples must be a positive integer")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        tol = float(self.tolerance)
        if not math.isfinite(tol) or tol < 0:
            raise ConfigError("tolerance must be a nonnegative real")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "tolerance", tol)

    @classmethod
    def from_dict(cls, d: dict, env: dict | None = None) -> "CampaignConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        fields = {"kind", "dims", "samples", "master_seed", "tolerance"}
        unknown = set(d) - fields
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"kind", "dims", "samples"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        d = dict(d)
        env = os.environ if env is None else env
        if env.get(SEED_ENV):
            try:
                d["master_seed"] = int(env[SEED_ENV], 0)
            except ValueError as exc:
                raise ConfigError(f"{SEED_ENV} must be an integer") from exc
        if "tolerance" in d and not isinstance(d["tolerance"], (int, float)):
            raise ConfigError("tolerance must be a number")
        return cls(**d)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["dims"] = list(self.dims)
        out["tolerance"] = num(self.tolerance)
        return out


# --- per-block workers ----------------------------------------------------------
# Each returns (worst, violations) for samples [start, stop) of one dim. For
# triple kinds "worst" is the minimum slack; otherwise it is the maximum error.

def _pure_block(cfg: CampaignConfig, dim: int, start: int, stop: int):
    stream = STREAM[cfg.kind]
    v = np.empty((stop - start, 3, dim), dtype=np.complex128)
    for i in range(start, stop):
        rng = sample_rng(cfg.master_seed, stream, dim, i)
        for s in range(3):
            v[i - start, s] = random_pure_vector(dim, rng)
    f = [np.abs(np.einsum("bi,bi->b", np.conj(v[:, a]), v[:, b])) ** 2 for a, b in ((0, 1), (0, 2), (1, 2))]
    slack = slack_batch(*f)
    return float(np.min(slack)), int(np.sum(slack < -cfg.tolerance))


def _mixed_block(cfg: CampaignConfig, dim: int, start: int, stop: int):
    stream = STREAM[cfg.kind]
    rho = np.empty((3, stop - start, dim, dim), dtype=np.complex128)
    for i in range(start, stop):
        rng = sample_rng(cfg.master_seed, stream, dim, i)
        for s in range(3):
            rho[s, i - start] = random_density_matrix(dim, rng)
    roots = [matrix_sqrt_psd_batch(r) for r in rho]
    f = [fidelity_from_roots_batch(roots[a], roots[b]) for a, b in ((0, 1), (0, 2), (1, 2))]
    slack = slack_batch(*f)
    return float(np.min(slack)), int(np.sum(slack < -cfg.tolerance))


def _roundtrip_block(cfg: CampaignConfig, n: int, start: int, stop: int):
    stream = STREAM[cfg.kind]
    worst, bad = 0.0, 0
    for i in range(start, stop):
        rng = sample_rng(cfg.master_seed, stream, n, i)
        states = [PureState(random_pure_vector(n, rng)) for _ in range(n)]
        err = verify_roundtrip(states).gram_err
        worst = max(worst, err)
        bad += err > cfg.tolerance
    return worst, bad


def _lemma3_block(cfg: CampaignConfig, dim: int, start: int, stop: int):
    stream = STREAM[cfg.kind]
    worst, bad = 0.0, 0
    for i in range(start, stop):
        f, g, a = supremum_sample(cfg.master_seed, dim, i, stream)
        t = min(1.0, abs(complex(np.vdot(f.amplitudes, g.amplitudes))))
        err = abs(lemma3_numeric_oracle(f, g, a) - lemma3_closed_form(t, a))
        worst = max(worst, err)
        bad += err > cfg.tolerance
    return worst, bad


def supremum_sample(master_seed: int, dim: int, index: int, stream: int = STREAM["lemma3"]):
    """Random unit ``f, g`` in ``C^dim`` and ``a`` uniform on ``[|<f,g>|, 1]``."""
    rng = sample_rng(master_seed, stream, dim, index)
    f = PureState(random_pure_vector(dim, rng))
    g = PureState(random_pure_vector(dim, rng))
    t = min(1.0, abs(complex(np.vdot(f.amplitudes, g.amplitudes))))
    return f, g, t + (1.0 - t) * float(rng.random())


WORKERS = {
    "pure-triple": _pure_block,
    "mixed-triple": _mixed_block,
    "roundtrip": _roundtrip_block,
    "lemma3": _lemma3_block,
}


def _run_block(args):
    cfg, dim, start, stop = args
    return dim, WORKERS[cfg.kind](cfg, dim, start, stop)


def _blocks(cfg: CampaignConfig):
    for dim in cfg.dims:
        for start in range(0, cfg.samples, BLOCK):
            yield cfg, dim, start, min(cfg.samples, start + BLOCK)


def run_campaign(cfg: CampaignConfig, jobs: int = 1, progress=None) -> dict:
    """Run every sample and aggregate a report.

    The report carries the config echo, one entry per dim, the total
    violation count and the wall time. Everything except ``wall_time`` is a
    pure function of the config.
    """
    t0 = time.perf_counter()
    slack_kind = cfg.kind in ("pure-triple", "mixed-triple")
    acc = {d: [math.inf if slack_kind else 0.0, 0] for d in cfg.dims}
    blocks = list(_blocks(cfg))
    if jobs > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_block, blocks))
    else:
        results = []
        for b in blocks:
            results.append(_run_block(b))
            if progress:
                progress(b[1], b[3])
    for dim, (worst, bad) in results:
        entry = acc[dim]
        entry[0] = min(entry[0], worst) if slack_kind else max(entry[0], worst)
        entry[1] += bad
    key = "worst_slack" if slack_kind else "worst_error"
    per_dim = [{"dim": d, key: num(acc[d][0]), "samples": cfg.samples, "violations": acc[d][1]} for d in cfg.dims]
    return {
        "config": cfg.to_dict(),
        "results": per_dim,
        "samples": cfg.samples * len(cfg.dims),
        "violations": sum(r["violations"] for r in per_dim),
        "wall_time": num(time.perf_counter() - t0),
    }
