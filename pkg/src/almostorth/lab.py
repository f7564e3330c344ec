"""Family generators, randomized verification suites and the two experiments.

Randomness: every generator is a ``numpy`` PCG64 seeded from
``SeedSequence(seed, spawn_key=keys)``. :func:`run_suite` gives trial ``t`` the
stream ``spawn_key=(t,)``, so any single trial can be replayed on its own and
results do not depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .blockop import assemble_P
from .bounds import (
    OperatorFamily,
    VerificationResult,
    abs_norm_identity_check,
    absolute_value_bound,
    as_family,
    cotlar_stein_bound,
    full_report,
    half_power_inequality_check,
    improved_bound,
    mixed_schwarz_check,
    positive_sum_bound,
)
from .config import DEFAULT, Tolerances
from .fileio import family_to_dict
from .linalg import DomainError, abs_value, abs_values, adjoint, op_norm

KINDS = ("general", "psd", "near_orthogonal", "orthogonal", "scalar")
SUITES = (
    "all", "half_power", "positive_sum", "abs_value", "norm_identity",
    "mixed_schwarz", "improved", "cotlar_stein", "chain",
)
NEAR_ORTHOGONAL_EPS = 0.05


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(keys))))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, (d, d)))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


# -- generators ---------------------------------------------------------------


def scalar_family(n: int, dim: int = 1) -> OperatorFamily:
    """``T_1 = I`` and ``T_k = I / n`` for ``k >= 2``."""
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be positive")
    eye = np.eye(dim, dtype=np.complex128)
    return OperatorFamily(tuple([eye] + [eye / n] * (n - 1)), f"scalar n={n} dim={dim}")


def orthogonal_family(
    n: int, block_dim: int, norms: Sequence[float], rng: np.random.Generator | None = None
) -> OperatorFamily:
    """Block-diagonal family on dimension ``n * block_dim``.

    Member ``k`` lives in diagonal block ``k`` as ``norms[k] * U_k``, where ``U_k``
    is the identity, or a random unitary when ``rng`` is given. Cross products
    ``T_j^* T_k`` and ``T_j T_k^*`` are exactly zero for ``j != k``.
    """
    norms = [float(v) for v in norms]
    if n < 1 or block_dim < 1:
        raise ValueError("n and block_dim must be positive")
    if len(norms) != n:
        raise ValueError(f"expected {n} norms, got {len(norms)}")
    if any(v < 0 or not np.isfinite(v) for v in norms):
        raise DomainError(f"norms must be finite and nonnegative: {norms}")
    total = n * block_dim
    members = []
    for k, v in enumerate(norms):
        t = np.zeros((total, total), dtype=np.complex128)
        u = np.eye(block_dim) if rng is None else random_unitary(block_dim, rng)
        sl = slice(k * block_dim, (k + 1) * block_dim)
        t[sl, sl] = v * u
        members.append(t)
    return OperatorFamily(tuple(members), f"orthogonal n={n} block_dim={block_dim}")


def _generate(n: int, dim: int, kind: str, rng: np.random.Generator, eps: float) -> OperatorFamily:
    if kind == "general":
        members = [complex_gaussian(rng, (dim, dim)) / np.sqrt(dim) for _ in range(n)]
    elif kind == "psd":
        members = []
        for _ in range(n):
            g = complex_gaussian(rng, (dim, dim)) / np.sqrt(dim)
            members.append(g.conj().T @ g)
    elif kind in ("near_orthogonal", "orthogonal"):
        norms = rng.uniform(0.5, 2.0, size=n)
        base = orthogonal_family(n, dim, norms, rng)
        if kind == "orthogonal":
            return base
        total = n * dim
        members = [
            t + eps * v * complex_gaussian(rng, (total, total)) / np.sqrt(total)
            for t, v in zip(base.members, norms)
        ]
    elif kind == "scalar":
        return scalar_family(n, dim)
    else:
        raise ValueError(f"unknown family kind {kind!r}; expected one of {KINDS}")
    return OperatorFamily(tuple(members), f"{kind} n={n} dim={dim}")


def random_family(
    n: int, dim: int, seed: int, kind: str = "general", eps: float = NEAR_ORTHOGONAL_EPS
) -> OperatorFamily:
    """Seeded random family.

    ``general``: complex Gaussian entries scaled by ``1/sqrt(dim)``.
    ``psd``: ``G^* G`` for such a ``G``.
    ``near_orthogonal``: an :func:`orthogonal_family` with ``dim`` as the block
    size (norms uniform in [0.5, 2], random unitary blocks) plus complex
    Gaussian noise of relative size ``eps``; the result has dimension ``n * dim``.
    """
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be positive")
    return _generate(n, dim, kind, make_rng(seed), eps)


# -- suites -------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteConfig:
    dims: tuple[int, int] = (1, 8)
    counts: tuple[int, int] = (1, 12)
    seed: int = 0
    kind: str = "general"
    eps: float = NEAR_ORTHOGONAL_EPS
    tol: Tolerances = DEFAULT
    # per-check slack overrides, keyed by check name
    overrides: dict[str, float] = field(default_factory=dict)


@dataclass
class _Trial:
    index: int
    family: OperatorFamily
    x: np.ndarray
    y: np.ndarray


def _draw_trial(config: SuiteConfig, t: int) -> _Trial:
    rng = make_rng(config.seed, t)
    d = int(rng.integers(config.dims[0], config.dims[1] + 1))
    n = int(rng.integers(config.counts[0], config.counts[1] + 1))
    fam = _generate(n, d, config.kind, rng, config.eps)
    x = complex_gaussian(rng, fam.dim)
    y = complex_gaussian(rng, fam.dim)
    return _Trial(t, fam, x, y)


def _positive_members(fam: OperatorFamily, kind: str) -> list[np.ndarray]:
    return list(fam.members) if kind == "psd" else [abs_value(t) for t in fam]


def _trial_checks(suite: str, config: SuiteConfig, tr: _Trial) -> list[VerificationResult]:
    tol = config.tol
    fam = tr.family
    out: list[VerificationResult] = []

    def add(name, lhs, rhs, kind, relation="le"):
        if name in config.overrides:
            slack = config.overrides[name] * (1.0 + abs(rhs))
        else:
            slack = tol.slack(kind, rhs)
        out.append(VerificationResult.compare(name, lhs, rhs, slack, relation))

    want = (lambda s: True) if suite == "all" else (lambda s: s == suite)

    if want("half_power"):
        pos = _positive_members(fam, config.kind)
        a, b = pos[0], (pos[-1] if config.kind == "psd" else abs_value(adjoint(fam[-1])))
        r = half_power_inequality_check(a, b, tol)
        add("half_power", r.lhs, r.rhs, "single")
    if want("positive_sum"):
        pos = _positive_members(fam, config.kind)
        add("positive_sum", op_norm(sum(pos)), positive_sum_bound(pos, tol), "single")
    if want("abs_value"):
        lhs_sq = op_norm(fam.total()) ** 2
        add("absolute_value", lhs_sq, absolute_value_bound(fam), "single")
        scale = sum(op_norm(t) for t in fam)
        min_eig = assemble_P(fam).min_eigenvalue()
        # -min_eig <= 0 within tol.positivity * (1 + sum ||T_k||)
        out_slack = config.overrides.get("P_positive", tol.positivity) * (1.0 + scale)
        out.append(VerificationResult.compare("P_positive", -min_eig, 0.0, out_slack))
    if want("norm_identity"):
        r = abs_norm_identity_check(fam[0], fam[-1], tol)
        add("norm_identity", r.lhs, r.rhs, "equality", "eq")
    if want("mixed_schwarz"):
        r = mixed_schwarz_check(fam, tr.x, tr.y, tol)
        add("mixed_schwarz", r.lhs, r.rhs, "single")
    if want("improved"):
        add("improved", op_norm(fam.total()) ** 2, improved_bound(fam), "single")
    if want("cotlar_stein"):
        add("cotlar_stein", op_norm(fam.total()) ** 2, cotlar_stein_bound(fam), "single")
    if want("chain"):
        rep = full_report(fam, tol)
        for s in rep.steps:
            add(f"chain:{s.check_name}", s.lhs, s.rhs, "chain")
        if config.kind == "orthogonal":
            add("tight_orthogonal", rep.lhs_sq, rep.cotlar_stein, "equality", "eq")
        if config.kind == "scalar":
            add("tight_scalar", rep.lhs_sq, rep.improved, "equality", "eq")

    for r in out:
        r.seed = config.seed
        r.trial = tr.index
        if not r.passed:
            w = family_to_dict(replace(fam, label=f"{r.check_name} seed={config.seed} trial={tr.index}"))
            w["vectors"] = {
                "x": [[float(z.real), float(z.imag)] for z in tr.x],
                "y": [[float(z.real), float(z.imag)] for z in tr.y],
            }
            r.witness = w
    return out


def run_suite(suite: str, trials: int, config: SuiteConfig = SuiteConfig()) -> list[VerificationResult]:
    """Run ``suite`` for ``trials`` seeded trials; results ordered by (trial, check name)."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if config.kind not in KINDS:
        raise ValueError(f"unknown family kind {config.kind!r}")
    lo, hi = config.dims
    clo, chi = config.counts
    if not (1 <= lo <= hi and 1 <= clo <= chi):
        raise ValueError("dims and counts must be ranges of positive integers")
    results = []
    for t in range(trials):
        checks = _trial_checks(suite, config, _draw_trial(config, t))
        results.extend(sorted(checks, key=lambda r: r.check_name))
    return results


def summarize(results: Iterable[VerificationResult]) -> dict[str, tuple[int, int]]:
    """``{check_name: (passed, total)}`` in sorted name order."""
    counts: dict[str, list[int]] = {}
    for r in results:
        c = counts.setdefault(r.check_name, [0, 0])
        c[0] += r.passed
        c[1] += 1
    return {k: (v[0], v[1]) for k, v in sorted(counts.items())}


# -- experiments --------------------------------------------------------------


@dataclass(frozen=True)
class GapRow:
    n: int
    lhs_sq: float
    improved: float
    cotlar_stein: float
    ratio_cs_over_improved: float


def gap_experiment(
    n_values: Iterable[int],
    family: str = "scalar",
    dim: int = 1,
    custom: Callable[[int], OperatorFamily] | None = None,
    tol: Tolerances = DEFAULT,
) -> list[GapRow]:
    """Compare the row-sum bound with the spectral-norm bound as the family grows."""
    if family == "scalar":
        make = lambda n: scalar_family(n, dim)  # noqa: E731
    elif family == "custom":
        if custom is None:
            raise ValueError("family='custom' needs a custom generator")
        make = custom
    else:
        raise ValueError(f"unknown gap family {family!r}")
    rows = []
    for n in n_values:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        rep = full_report(make(n), tol)
        rows.append(GapRow(n, rep.lhs_sq, rep.improved, rep.cotlar_stein, rep.cotlar_stein / rep.improved))
    return rows


@dataclass(frozen=True)
class TailRow:
    m: int
    n: int
    tail_norm_sq: float
    cauchy_bound: float

    def holds(self, tol: Tolerances = DEFAULT) -> bool:
        return self.tail_norm_sq <= self.cauchy_bound + tol.slack("chain", self.cauchy_bound)


def tail_cauchy_check(f, x, m: int, n: int) -> TailRow:
    """``||sum_{k=m}^n T_k x||^2 <= sum_{k=m}^n <|T_k| x, x> * ||sum_{k=m}^n |T_k^*|||`` (1-based window)."""
    f = as_family(f)
    if not 1 <= m <= n <= f.n:
        raise IndexError(f"window [{m}, {n}] outside 1..{f.n}")
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.shape != (f.dim,):
        raise ValueError(f"vector has length {x.size}, expected {f.dim}")
    w = np.stack(f.members[m - 1:n])
    tail = float(np.linalg.norm(w.sum(axis=0) @ x) ** 2)
    diag = float(np.vdot(x, abs_values(w).sum(axis=0) @ x).real)
    adj = op_norm(abs_values(w.conj().transpose(0, 2, 1)).sum(axis=0))
    return TailRow(m, n, tail, diag * adj)


def epsilon_uniform_check(f, trials: int, seed: int, tol: Tolerances = DEFAULT) -> VerificationResult:
    """``||sum eps_k T_k|| <= sqrt(improved_bound)`` over random unimodular ``eps``.

    The first trial uses ``eps_k = 1``. ``lhs`` reports the largest signed-sum norm seen.
    """
    f = as_family(f)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = make_rng(seed)
    bound = float(np.sqrt(improved_bound(f)))
    worst = 0.0
    for t in range(trials):
        eps = np.ones(f.n) if t == 0 else np.exp(2j * np.pi * rng.random(f.n))
        worst = max(worst, op_norm(f.scaled(eps).total()))
    r = VerificationResult.compare("epsilon_uniform", worst, bound, tol.slack("single", bound))
    r.seed = seed
    return r
