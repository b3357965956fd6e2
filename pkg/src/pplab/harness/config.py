"""Experiment configuration: a single versioned JSON document.

Example::

    {
      "schema_version": 1,
      "gamma": 0.85, "v": 0.75,
      "T": {"logspace": [100, 10000, 9]},
      "sellers": [
        {"label": "monotone", "kind": "monotone", "beta": "auto"},
        {"label": "pfs", "kind": "pfs", "r": "ceil-log-T"}
      ],
      "buyer": {"kind": "grid", "grid_step": 0.03},
      "output": {"csv": "out/fig2.csv", "svg": "out/fig2.svg"}
    }

See ``docs/config.schema.json`` for every field.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..analysis import r_star
from ..buyers import BUYER_KINDS, BuyerSpec
from ..game import ConfigurationError
from ..sellers import SELLER_KINDS, SEMANTICS, SellerSpec, ceil_log

SCHEMA_VERSION = 1
R_POLICIES = ("ceil-log-T", "auto")
AXES = ("log-log", "linear")


def auto_beta(T: int, gamma: float) -> float:
    """``1 - 1/sqrt(T * T_gamma)``."""
    return 1.0 - 1.0 / math.sqrt(T / (1.0 - gamma))


def auto_r(T: int, gamma0: float) -> int:
    # the closed form is only guaranteed on (1/2, 1) and T > 4
    method = "closed-form" if gamma0 > 0.5 and T > 4 else "scan"
    return r_star(gamma0, T, method).r_star


@dataclass(frozen=True)
class SellerEntry:
    """One seller series; ``beta``/``r`` may be numbers or policy names."""

    label: str
    kind: str
    beta: float | str | None = None
    r: int | str | None = None
    prices: tuple[float, ...] | None = None
    semantics: str | None = None   # falls back to the experiment-wide value

    def resolve(self, T: int, gamma: float, gamma0: float | None, semantics: str) -> SellerSpec:
        beta = self.beta
        if beta == "auto":
            beta = auto_beta(T, gamma)
        r = self.r
        if r == "ceil-log-T":
            r = ceil_log(T)
        elif r == "auto":
            r = auto_r(T, gamma0)
        return SellerSpec(self.kind, beta=beta, prices=self.prices, r=r,
                          semantics=self.semantics or semantics)


def _resolve_T(spec) -> tuple[int, ...]:
    if isinstance(spec, dict):
        if set(spec) != {"logspace"}:
            raise ConfigurationError(f"T must be a list or {{'logspace': [lo, hi, n]}}, got {spec!r}")
        lo, hi, n = spec["logspace"]
        if not (1 <= lo <= hi) or int(n) < 1:
            raise ConfigurationError(f"bad logspace {spec['logspace']!r}")
        pts = np.logspace(math.log10(lo), math.log10(hi), int(n))
        return tuple(sorted({int(round(x)) for x in pts}))
    if isinstance(spec, int):
        spec = [spec]
    out = []
    for T in spec:
        if isinstance(T, bool) or int(T) != T or T < 1:
            raise ConfigurationError(f"horizons must be positive integers, got {T!r}")
        out.append(int(T))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float
    v: float
    sellers: tuple[SellerEntry, ...]
    T: tuple[int, ...] = ()
    gamma0: float | None = None
    buyer: BuyerSpec = field(default_factory=BuyerSpec)
    semantics: str = "strict"
    csv: str | None = None
    svg: str | None = None
    axes: str = "log-log"
    workers: int = 1
    seed: int = 0
    timing: bool = False     # wall_ms column; off keeps the CSV byte-reproducible
    name: str = "experiment"
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigurationError(
                f"unsupported schema_version {self.schema_version!r}; this build reads {SCHEMA_VERSION}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1), got {self.gamma!r}")
        if not 0.0 <= self.v <= 1.0:
            raise ConfigurationError(f"v must lie in [0, 1], got {self.v!r}")
        if self.gamma0 is not None and not 0.0 < self.gamma0 < 1.0:
            raise ConfigurationError(f"gamma0 must lie in (0, 1), got {self.gamma0!r}")
        if self.semantics not in SEMANTICS:
            raise ConfigurationError(f"semantics must be one of {SEMANTICS}")
        if self.axes not in AXES:
            raise ConfigurationError(f"axes must be one of {AXES}")
        if self.buyer.kind not in BUYER_KINDS or self.buyer.kind == "scripted":
            raise ConfigurationError("sweep buyer must be one of truthful, dp, grid, brute-force")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        labels = [s.label for s in self.sellers]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"seller labels must be unique, got {labels}")
        for s in self.sellers:
            self._check_seller(s)
        object.__setattr__(self, "T", _resolve_T(self.T))

    def _check_seller(self, s: SellerEntry):
        where = f"seller {s.label!r}"
        if s.kind not in SELLER_KINDS:
            raise ConfigurationError(f"{where}: unknown kind {s.kind!r}")
        if s.semantics is not None and s.semantics not in SEMANTICS:
            raise ConfigurationError(f"{where}: semantics must be one of {SEMANTICS}")
        if s.kind == "monotone":
            if s.beta is None:
                raise ConfigurationError(f"{where}: monotone needs beta (number or 'auto')")
            if isinstance(s.beta, str) and s.beta != "auto":
                raise ConfigurationError(f"{where}: beta policy must be a number or 'auto'")
        if s.kind == "pfs":
            if s.r is None:
                raise ConfigurationError(f"{where}: pfs needs r (integer, 'ceil-log-T' or 'auto')")
            if isinstance(s.r, str):
                if s.r not in R_POLICIES:
                    raise ConfigurationError(f"{where}: unknown r policy {s.r!r}")
                if s.r == "auto" and self.gamma0 is None:
                    raise ConfigurationError(f"{where}: r policy 'auto' requires gamma0")
            elif int(s.r) != s.r or s.r < 1:
                raise ConfigurationError(f"{where}: r must be a positive integer")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__} | {"output"}
        extra = set(d) - known
        if extra:
            raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
        for key in ("gamma", "v", "sellers"):
            if key not in d:
                raise ConfigurationError(f"config is missing {key!r}")
        out = d.pop("output", None) or {}
        for k in ("csv", "svg", "axes"):
            if k in out:
                d.setdefault(k, out[k])
        sellers = []
        for s in d["sellers"]:
            s = dict(s)
            s.setdefault("label", s.get("kind"))
            if s.get("prices") is not None:
                s["prices"] = tuple(s["prices"])
            try:
                sellers.append(SellerEntry(**s))
            except TypeError as exc:
                raise ConfigurationError(f"bad seller entry {s!r}: {exc}") from None
        d["sellers"] = tuple(sellers)
        try:
            d["buyer"] = BuyerSpec.from_dict(d.get("buyer", {}))
        except TypeError as exc:
            raise ConfigurationError(f"bad buyer entry: {exc}") from None
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["T"] = list(self.T)
        return d

    def override(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentConfig.from_dict(data)
