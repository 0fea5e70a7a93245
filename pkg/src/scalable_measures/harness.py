"""Empirical tests of 1-scalability on concrete states.

A measure passes if its N-copy value is reproduced by a candidate function
of the single-copy value alone, and if that candidate composes correctly,
``E_N(e) = E_{N/K}(E_K(e))``, for copy counts in ``{1, a, a**2, ...}``.
A finite test can only fail to refute scalability, hence the verdict
``consistent-with-1S`` rather than a positive claim.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .series import ScaledSeries, SeedSeries, evaluate, scale_coefficients
from .states import (
    MAX_KRON_ROWS,
    DensityMatrix,
    brute_force_coherence,
    l1_coherence,
    l1_n_copies_closed,
    l2_coherence,
    l2_n_copies_closed,
    purity,
    random_state,
    state_to_json,
)

__all__ = [
    "CONSISTENT",
    "NOT_1S",
    "MeasureUnderTest",
    "Collision",
    "DefinitionResult",
    "CompositionResidual",
    "Check",
    "SuiteConfig",
    "ScalabilityReport",
    "builtin_measure",
    "series_predictor",
    "collision_partner",
    "test_definition",
    "test_composition",
    "run_suite",
]

CONSISTENT = "consistent-with-1S"
NOT_1S = "not-1S"
COLLISION_ETOL = 1e-9

Predictor = Callable[[float, int], float]


@dataclass
class MeasureUnderTest:
    """A resource quantifier together with its candidate N-copy law.

    Attributes
    ----------
    single_copy : callable
        ``rho -> e``.
    n_copy_true : callable
        ``(rho, N) -> value on N copies``, usually brute force.
    n_copy_predicted : callable
        ``(e, N) -> E_N(e)``; must satisfy ``E_1(e) = e``.
    predictor_for : callable, optional
        ``rho -> predictor`` for candidates that are only defined within
        a stratum of states, e.g. the l2 law at a fixed purity.  The
        stratum is read off the state; the returned predictor is still a
        function of ``(e, N)`` alone.
    base : int
        Copy counts used for composition checks are powers of `base`.
    """

    name: str
    single_copy: Callable[[DensityMatrix], float]
    n_copy_true: Callable[[DensityMatrix, int], float]
    n_copy_predicted: Predictor
    predictor_for: Callable[[DensityMatrix], Predictor] | None = None
    base: int = 2

    def predictor(self, rho) -> Predictor:
        if self.predictor_for is None:
            return self.n_copy_predicted
        return self.predictor_for(rho)


def _fixed_purity_l2(p0: float) -> Predictor:
    def predict(e, N):
        if N == 1:
            return e
        return p0**N - (p0 - e) ** N
    return predict


def _pure_l2(e, N):
    if N == 1:
        return e
    return -math.expm1(N * math.log1p(-e)) if e < 1 else 1.0 - (1.0 - e) ** N


def builtin_measure(name: str, truth: str = "brute") -> MeasureUnderTest:
    """One of ``"l1"``, ``"l2"`` or ``"l2-pure"``.

    ``truth="closed"`` replaces the brute-force N-copy values by the
    closed formulas (no size limit, but no longer an independent check).
    """
    if truth not in ("brute", "closed"):
        raise InvalidArgumentError(f"truth must be 'brute' or 'closed', got {truth!r}")
    if name == "l1":
        if truth == "brute":
            true = lambda rho, N: brute_force_coherence(rho, N, "l1")  # noqa: E731
        else:
            true = lambda rho, N: l1_n_copies_closed(l1_coherence(rho), N)  # noqa: E731
        return MeasureUnderTest("l1", l1_coherence, true, l1_n_copies_closed)
    if name in ("l2", "l2-pure"):
        if truth == "brute":
            true = lambda rho, N: brute_force_coherence(rho, N, "l2")  # noqa: E731
        else:
            true = lambda rho, N: l2_n_copies_closed(l2_coherence(rho), purity(rho), N)  # noqa: E731
        if name == "l2-pure":
            return MeasureUnderTest("l2-pure", l2_coherence, true, _pure_l2)
        return MeasureUnderTest(
            "l2", l2_coherence, true, _pure_l2,
            predictor_for=lambda rho: _fixed_purity_l2(purity(rho)),
        )
    raise InvalidArgumentError(f"unknown built-in measure {name!r}")


def series_predictor(seed: SeedSeries) -> Predictor:
    """Candidate law ``E_N`` generated from a seed by the recurrence.

    Only copy counts in ``{1, a, a**2, ...}`` are supported; scaled
    series are cached per exponent.
    """
    cache: dict[int, ScaledSeries] = {}

    def predict(e, N):
        n = round(math.log(N, seed.base)) if N > 1 else 0
        if seed.base**n != N:
            raise InvalidArgumentError(f"N = {N} is not a power of {seed.base}")
        if n not in cache:
            cache[n] = scale_coefficients(seed, n)
        return evaluate(cache[n], e, radius_hint=None)

    return predict


def collision_partner(rho: DensityMatrix, tol: float = 1e-12) -> DensityMatrix | None:
    """A state with the same off-diagonal entries but a different diagonal.

    Moves diagonal weight from the smallest to the largest population as
    far as positivity allows, so every off-diagonal functional (l1, l2)
    is unchanged while the purity grows.  For a qubit the result is the
    pure state with the same coherence.  Returns None if no move keeps
    the matrix positive semidefinite (e.g. for pure input).
    """
    m = np.array(rho.entries)
    diag = m.diagonal().real
    hi, lo = int(np.argmax(diag)), int(np.argmin(diag))
    if hi == lo:
        lo = (hi + 1) % m.shape[0]
    shift = np.zeros_like(m)
    shift[hi, hi], shift[lo, lo] = 1.0, -1.0

    def psd(t):
        return np.linalg.eigvalsh(m + t * shift).min() >= 0.0

    ok, bad = 0.0, float(diag[lo])
    if psd(bad):
        ok = bad
    else:
        for _ in range(60):
            mid = 0.5 * (ok + bad)
            if psd(mid):
                ok = mid
            else:
                bad = mid
    if ok <= tol:
        return None
    return DensityMatrix(m + ok * shift)


@dataclass
class Collision:
    state_a: str
    state_b: str
    N: int
    e_a: float
    e_b: float
    true_a: float
    true_b: float

    @property
    def gap(self) -> float:
        return abs(self.true_a - self.true_b)


@dataclass
class DefinitionResult:
    residuals: list[tuple[str, int, float]]
    collisions: list[Collision]

    @property
    def max_residual(self) -> float:
        return max((r for _, _, r in self.residuals), default=0.0)


@dataclass
class CompositionResidual:
    state_id: str
    N: int
    K: int
    true: float
    composed: float

    @property
    def residual(self) -> float:
        return abs(self.true - self.composed)


def _ids(states, ids):
    if ids is None:
        return [f"s{i:03d}" for i in range(len(states))]
    if len(ids) != len(states):
        raise InvalidArgumentError("state_ids must match states")
    return list(ids)


def test_definition(
    m: MeasureUnderTest,
    states: Sequence[DensityMatrix],
    Ns: Sequence[int],
    tol: float = 1e-9,
    state_ids: Sequence[str] | None = None,
) -> DefinitionResult:
    """Residuals ``|true(rho, N) - E_N(e(rho))|`` and collision evidence.

    A collision is a pair of states whose single-copy values agree within
    1e-9 while their true N-copy values differ by more than `tol`; no
    function of `e` alone can reproduce both.
    """
    ids = _ids(states, state_ids)
    es = [m.single_copy(rho) for rho in states]
    residuals = []
    trues: dict[int, list[float]] = {}
    for N in Ns:
        row = []
        for sid, rho, e in zip(ids, states, es):
            true = m.n_copy_true(rho, N)
            row.append(true)
            residuals.append((sid, N, abs(true - m.predictor(rho)(e, N))))
        trues[N] = row

    collisions = []
    order = sorted(range(len(states)), key=lambda i: es[i])
    for pos, i in enumerate(order):
        for j in order[pos + 1:]:
            if es[j] - es[i] > COLLISION_ETOL:
                break
            for N in Ns:
                a, b = (i, j) if ids[i] < ids[j] else (j, i)
                if abs(trues[N][a] - trues[N][b]) > tol:
                    collisions.append(
                        Collision(ids[a], ids[b], N, es[a], es[b], trues[N][a], trues[N][b])
                    )
    collisions.sort(key=lambda c: (c.state_a, c.state_b, c.N))
    return DefinitionResult(residuals, collisions)


def test_composition(
    m: MeasureUnderTest,
    states: Sequence[DensityMatrix],
    n: int,
    k: int,
    state_ids: Sequence[str] | None = None,
) -> list[CompositionResidual]:
    """Compare ``true(rho, a**n)`` with ``E_{a**(n-k)}(E_{a**k}(e))``."""
    if not 0 < k < n:
        raise InvalidArgumentError(f"need 0 < k < n, got n={n}, k={k}")
    a = m.base
    N, K = a**n, a**k
    out = []
    for sid, rho in zip(_ids(states, state_ids), states):
        predict = m.predictor(rho)
        e = m.single_copy(rho)
        composed = predict(predict(e, K), N // K)
        out.append(CompositionResidual(sid, N, K, m.n_copy_true(rho, N), composed))
    return out


# test_* names are part of the public API, not pytest tests
test_definition.__test__ = False
test_composition.__test__ = False


@dataclass
class SuiteConfig:
    """Parameters of :func:`run_suite`; mirrors the JSON config file."""

    measure: str = "l1"
    dim: int = 2
    family: str = "mixed"
    samples: int = 100
    seed: int = 0
    Ns: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    Ks: list[int] = field(default_factory=lambda: [2, 4])
    tolerance: float = 1e-9
    base: int = 2
    collision_pairs: int | None = None
    truth: str = "brute"
    witnesses: int = 3

    _ALIASES = {"N": "Ns", "N_list": "Ns", "K": "Ks", "K_list": "Ks", "tol": "tolerance",
                "dimension": "dim", "kind": "family", "rng_seed": "seed", "sample_count": "samples"}

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        known = {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        kwargs = {}
        for key, value in data.items():
            name = cls._ALIASES.get(key, key)
            if name not in known:
                raise ConfigError(key, "unknown field")
            kwargs[name] = value
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "SuiteConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def validate(self, custom_measure: bool = False):
        def need_int(name, lo):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise ConfigError(name, f"must be an integer >= {lo}, got {v!r}")

        if not custom_measure and self.measure not in ("l1", "l2", "l2-pure"):
            raise ConfigError("measure", f"unknown measure {self.measure!r}")
        need_int("dim", 2)
        need_int("samples", 1)
        need_int("base", 2)
        need_int("witnesses", 0)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed", "must be an integer")
        if self.family not in ("pure", "mixed"):
            raise ConfigError("family", f"must be 'pure' or 'mixed', got {self.family!r}")
        if self.truth not in ("brute", "closed"):
            raise ConfigError("truth", f"must be 'brute' or 'closed', got {self.truth!r}")
        for name in ("Ns", "Ks"):
            v = getattr(self, name)
            if not isinstance(v, list) or not all(
                isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in v
            ):
                raise ConfigError(name, "must be a list of positive integers")
        if not self.Ns:
            raise ConfigError("Ns", "must not be empty")
        if self.truth == "brute" and not custom_measure:
            too_big = [N for N in self.Ns if self.dim**N > MAX_KRON_ROWS]
            if too_big:
                raise ConfigError("Ns", f"dim**N exceeds {MAX_KRON_ROWS} rows for N in {too_big}; "
                                        "lower N or use truth='closed'")
        for K in self.Ks:
            if _log_base(K, self.base) is None or K == 1:
                raise ConfigError("Ks", f"{K} is not a power of {self.base} greater than 1")
        try:
            tol = float(self.tolerance)
        except (TypeError, ValueError):
            raise ConfigError("tolerance", "must be a number") from None
        if not tol > 0:
            raise ConfigError("tolerance", "must be positive")
        if self.collision_pairs is not None:
            need_int("collision_pairs", 0)

    def composition_pairs(self) -> list[tuple[int, int]]:
        """``(N, K)`` with both powers of the base and ``1 < K < N``."""
        pairs = []
        for N in sorted(set(self.Ns)):
            if _log_base(N, self.base) is None:
                continue
            for K in sorted(set(self.Ks)):
                if 1 < K < N and N % K == 0:
                    pairs.append((N, K))
        return pairs

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if not k.startswith("_")}


def _log_base(x: int, a: int) -> int | None:
    n = 0
    while x > 1 and x % a == 0:
        x //= a
        n += 1
    return n if x == 1 else None


@dataclass
class Check:
    state_id: str
    N: int
    K: int | None
    residual_definition: float | None
    residual_composition: float | None


@dataclass
class ScalabilityReport:
    measure: str
    family: str
    tolerance: float
    checks: list[Check]
    max_residual_definition: float
    max_residual_composition: float
    verdict: str
    witnesses: list[dict]
    collisions: list[Collision]
    config: dict

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "family": self.family,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "max_residual_definition": self.max_residual_definition,
            "max_residual_composition": self.max_residual_composition,
            "witnesses": self.witnesses,
            "collisions": [dict(asdict(c), gap=c.gap) for c in self.collisions],
            "checks": [asdict(c) for c in self.checks],
            "config": self.config,
        }

    def to_table(self) -> str:
        lines = [
            f"measure   {self.measure}",
            f"family    {self.family}",
            f"tolerance {self.tolerance:.1e}",
            f"max definition residual   {self.max_residual_definition:.3e}",
            f"max composition residual  {self.max_residual_composition:.3e}",
            f"collisions                {len(self.collisions)}",
            f"verdict   {self.verdict}",
        ]
        if self.witnesses:
            lines.append("")
            lines.append(f"{'state':<14}{'kind':<13}{'N':>5}{'K':>5}{'e':>14}{'residual':>14}")
            for w in self.witnesses:
                K = "-" if w["K"] is None else str(w["K"])
                lines.append(
                    f"{w['state_id']:<14}{w['kind']:<13}{w['N']:>5}{K:>5}"
                    f"{w['single_copy']:>14.6g}{w['residual']:>14.3e}"
                )
        if self.collisions:
            lines.append("")
            lines.append(f"{'state a':<14}{'state b':<14}{'N':>5}{'true a':>14}{'true b':>14}")
            for c in self.collisions[:10]:
                lines.append(f"{c.state_a:<14}{c.state_b:<14}{c.N:>5}{c.true_a:>14.6g}{c.true_b:>14.6g}")
        return "\n".join(lines)


def _suite_states(cfg: SuiteConfig):
    rng = np.random.default_rng(cfg.seed)
    states = [random_state(cfg.dim, cfg.family, rng) for _ in range(cfg.samples)]
    ids = [f"s{i:03d}" for i in range(cfg.samples)]
    pairs = cfg.collision_pairs
    if pairs is None:
        pairs = min(10, cfg.samples) if cfg.family == "mixed" else 0
    for i in range(min(pairs, cfg.samples)):
        partner = collision_partner(states[i])
        if partner is not None:
            states.append(partner)
            ids.append(f"{ids[i]}-partner")
    return states, ids


def run_suite(config: SuiteConfig | dict, measure: MeasureUnderTest | None = None) -> ScalabilityReport:
    """Generate a state family and run definition and composition checks.

    `measure` overrides ``config.measure`` with a user-supplied plug-in.
    The result depends only on the configuration (including its seed).
    """
    cfg = config if isinstance(config, SuiteConfig) else SuiteConfig.from_dict(config)
    cfg.validate(custom_measure=measure is not None)
    m = measure if measure is not None else builtin_measure(cfg.measure, cfg.truth)
    if m.base != cfg.base:
        raise ConfigError("base", f"measure uses base {m.base}, config says {cfg.base}")
    tol = float(cfg.tolerance)
    states, ids = _suite_states(cfg)
    by_id = dict(zip(ids, states))
    es = {sid: m.single_copy(rho) for sid, rho in by_id.items()}

    definition = test_definition(m, states, sorted(set(cfg.Ns)), tol, ids)
    checks = [Check(sid, N, None, r, None) for sid, N, r in definition.residuals]
    for N, K in cfg.composition_pairs():
        n, k = _log_base(N, cfg.base), _log_base(K, cfg.base)
        for res in test_composition(m, states, n, k, ids):
            checks.append(Check(res.state_id, N, K, None, res.residual))
    checks.sort(key=lambda c: (c.state_id, c.N, c.K or 0))

    max_def = max((c.residual_definition for c in checks if c.residual_definition is not None),
                  default=0.0)
    max_comp = max((c.residual_composition for c in checks if c.residual_composition is not None),
                   default=0.0)
    verdict = NOT_1S if max(max_def, max_comp) > tol else CONSISTENT

    ranked = sorted(
        checks,
        key=lambda c: -(c.residual_composition if c.residual_composition is not None
                        else c.residual_definition),
    )
    witnesses, seen = [], set()
    for c in ranked:
        if len(witnesses) >= cfg.witnesses:
            break
        if c.state_id in seen:
            continue
        seen.add(c.state_id)
        comp = c.residual_composition is not None
        witnesses.append({
            "state_id": c.state_id,
            "kind": "composition" if comp else "definition",
            "N": c.N,
            "K": c.K,
            "single_copy": es[c.state_id],
            "purity": purity(by_id[c.state_id]),
            "residual": c.residual_composition if comp else c.residual_definition,
            "state": state_to_json(by_id[c.state_id]),
        })

    family = f"{cfg.samples} random {cfg.family} states, d={cfg.dim}, seed={cfg.seed}"
    return ScalabilityReport(
        measure=m.name,
        family=family,
        tolerance=tol,
        checks=checks,
        max_residual_definition=max_def,
        max_residual_composition=max_comp,
        verdict=verdict,
        witnesses=witnesses,
        collisions=definition.collisions,
        config=cfg.to_dict(),
    )
