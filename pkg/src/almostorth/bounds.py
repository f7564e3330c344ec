"""Operator-norm bounds for a finite family ``T_1, ..., T_n`` and the lemma checks behind them.

Bounds on ``||sum T_k||`` are reported on the squared scale, except
:func:`positive_sum_bound`, which bounds ``||sum A_k||`` itself.

The chain verified by :func:`full_report` is::

    ||sum T_k||^2 <= ||sum |T_k||| ||sum |T_k^*|||        (absolute_value)
                  <= ||(|||T_j|^½ |T_k|^½||)|| ||(...*)|| (refined)
                  <= ||(a_jk)|| ||(b_jk)||                (improved)
                  <= (max_j sum_k a_jk)(max_j sum_k b_jk) (cotlar_stein)

with ``a_jk = ||T_j T_k^*||^½`` and ``b_jk = ||T_j^* T_k||^½``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .linalg import (
    DimensionError,
    abs_value,
    abs_values,
    adjoint,
    as_matrix,
    op_norm,
    psd_sqrt,
)


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    members: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        members = tuple(as_matrix(m) for m in self.members)
        if not members:
            raise DimensionError("an operator family needs at least one member")
        d = members[0].shape[0]
        for k, m in enumerate(members):
            if m.shape != (d, d):
                raise DimensionError(f"member {k} has shape {m.shape}, expected ({d}, {d})")
            m.setflags(write=False)
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    @property
    def n(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.members)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.members[k]

    def total(self) -> np.ndarray:
        return np.sum(self.members, axis=0)

    def scaled(self, coefficients) -> "OperatorFamily":
        """Family ``(c_k T_k)``; a scalar applies to every member."""
        c = np.broadcast_to(np.asarray(coefficients, dtype=np.complex128), (self.n,))
        return OperatorFamily(tuple(ck * t for ck, t in zip(c, self.members)), self.label)

    def permuted(self, order: Sequence[int]) -> "OperatorFamily":
        return OperatorFamily(tuple(self.members[k] for k in order), self.label)

    def window(self, m: int, n: int) -> "OperatorFamily":
        """Members ``m..n`` inclusive, 1-based."""
        return OperatorFamily(self.members[m - 1:n], self.label)


def as_family(f) -> OperatorFamily:
    return f if isinstance(f, OperatorFamily) else OperatorFamily(tuple(f))


@dataclass
class VerificationResult:
    """One pass/fail verdict for an inequality (``relation='le'``) or equality (``'eq'``)."""

    check_name: str
    passed: bool
    lhs: float
    rhs: float
    slack_used: float
    relation: str = "le"
    seed: int | None = None
    trial: int | None = None
    witness: dict[str, Any] | None = None

    @classmethod
    def compare(cls, name: str, lhs: float, rhs: float, slack: float, relation: str = "le", **kw):
        lhs, rhs, slack = float(lhs), float(rhs), float(slack)
        if relation == "le":
            passed = lhs <= rhs + slack
        elif relation == "eq":
            passed = abs(lhs - rhs) <= slack
        else:
            raise ValueError(f"unknown relation {relation!r}")
        return cls(name, bool(passed), lhs, rhs, slack, relation, **kw)


@dataclass
class BoundReport:
    lhs_norm: float
    lhs_sq: float
    absolute_value: float
    refined: float
    improved: float
    cotlar_stein: float
    schur_factor_a: float
    schur_factor_b: float
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    abs_sum_norm: float
    abs_adj_sum_norm: float
    refined_factor_a: float
    refined_factor_b: float
    chain_ok: bool
    steps: list[VerificationResult] = field(default_factory=list)

    @property
    def slacks(self) -> list[float]:
        return [s.rhs - s.lhs for s in self.steps]

    def scalars(self) -> dict[str, float]:
        return {
            k: getattr(self, k)
            for k in (
                "lhs_norm", "lhs_sq", "absolute_value", "refined", "improved", "cotlar_stein",
                "schur_factor_a", "schur_factor_b", "abs_sum_norm", "abs_adj_sum_norm",
                "refined_factor_a", "refined_factor_b",
            )
        }


def _pair_norm_matrix(left: Sequence[np.ndarray], right: Sequence[np.ndarray], power: float) -> np.ndarray:
    """Symmetric matrix ``||left_j right_k||**power``, assuming ``(j, k)`` and ``(k, j)`` agree."""
    n = len(left)
    j, k = np.triu_indices(n)
    products = np.stack(left)[j] @ np.stack(right)[k]
    norms = np.linalg.svd(products, compute_uv=False)[:, 0] ** power
    out = np.zeros((n, n))
    out[j, k] = norms
    out[k, j] = norms
    return out


def a_matrix(f) -> np.ndarray:
    """``a_jk = sqrt(||T_j T_k^*||)``."""
    f = as_family(f)
    return _pair_norm_matrix(f.members, [adjoint(t) for t in f], 0.5)


def b_matrix(f) -> np.ndarray:
    """``b_jk = sqrt(||T_j^* T_k||)``."""
    f = as_family(f)
    return _pair_norm_matrix([adjoint(t) for t in f], f.members, 0.5)


def _max_row_sum(m: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(m), axis=1)))


def schur_test_bound(m) -> float:
    """``sqrt(max row abs sum * max column abs sum)``, an upper bound for ``||M||``."""
    m = as_matrix(m)
    a = np.abs(m)
    return float(np.sqrt(np.max(a.sum(axis=1)) * np.max(a.sum(axis=0))))


def cotlar_stein_bound(f) -> float:
    f = as_family(f)
    return _max_row_sum(b_matrix(f)) * _max_row_sum(a_matrix(f))


def improved_bound(f) -> float:
    f = as_family(f)
    return op_norm(a_matrix(f)) * op_norm(b_matrix(f))


def _half_power_factor(roots: Sequence[np.ndarray]) -> float:
    return op_norm(_pair_norm_matrix(roots, roots, 1.0))


def _roots_of_abs(members, tol: Tolerances) -> tuple[list, list]:
    abs_t = [abs_value(t) for t in members]
    abs_ts = [abs_value(adjoint(t)) for t in members]
    return [psd_sqrt(a, tol) for a in abs_t], [psd_sqrt(b, tol) for b in abs_ts]


def refined_bound(f, tol: Tolerances = DEFAULT) -> float:
    f = as_family(f)
    ra, rb = _roots_of_abs(f.members, tol)
    return _half_power_factor(ra) * _half_power_factor(rb)


def absolute_value_bound(f) -> float:
    f = as_family(f)
    return op_norm(sum(abs_value(t) for t in f)) * op_norm(sum(abs_value(adjoint(t)) for t in f))


def positive_sum_bound(f, tol: Tolerances = DEFAULT) -> float:
    """``||( ||A_j A_k||^{1/2} )||`` for PSD members (unsquared)."""
    f = as_family(f)
    for a in f:
        psd_sqrt(a, tol)  # raises NotPSDError on a non-PSD member
    return op_norm(_pair_norm_matrix(f.members, f.members, 0.5))


def half_power_inequality_check(a, b, tol: Tolerances = DEFAULT) -> VerificationResult:
    """``||A^{1/2} B^{1/2}|| <= ||AB||^{1/2}`` for PSD ``A``, ``B``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    lhs = op_norm(psd_sqrt(a, tol) @ psd_sqrt(b, tol))
    rhs = np.sqrt(op_norm(a @ b))
    return VerificationResult.compare("half_power", lhs, rhs, tol.slack("single", rhs))


def abs_norm_identity_check(t, s, tol: Tolerances = DEFAULT) -> VerificationResult:
    """``|| |T| |S| || == ||T S^*||``."""
    t, s = as_matrix(t), as_matrix(s)
    if t.shape != s.shape:
        raise DimensionError(f"shapes differ: {t.shape} vs {s.shape}")
    lhs = op_norm(abs_value(t) @ abs_value(s))
    rhs = op_norm(t @ adjoint(s))
    return VerificationResult.compare("norm_identity", lhs, rhs, tol.slack("equality", rhs), "eq")


def _vector(x, dim: int) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape != (dim,):
        raise DimensionError(f"vector has length {v.size}, expected {dim}")
    return v


def mixed_schwarz_check(f, x, y, tol: Tolerances = DEFAULT) -> VerificationResult:
    """``|<sum T_k x, y>|^2 <= <sum |T_k| x, x> <sum |T_k^*| y, y>``."""
    f = as_family(f)
    x, y = _vector(x, f.dim), _vector(y, f.dim)
    lhs = abs(np.vdot(y, f.total() @ x)) ** 2
    abs_sum = sum(abs_value(t) for t in f)
    abs_adj_sum = sum(abs_value(adjoint(t)) for t in f)
    rhs = np.vdot(x, abs_sum @ x).real * np.vdot(y, abs_adj_sum @ y).real
    return VerificationResult.compare("mixed_schwarz", lhs, rhs, tol.slack("single", rhs))


def full_report(f, tol: Tolerances = DEFAULT) -> BoundReport:
    """Every bound for ``f`` plus the verified inequality chain."""
    f = as_family(f)
    members = f.members
    adjs = [adjoint(t) for t in members]
    lhs_norm = op_norm(f.total())
    lhs_sq = lhs_norm**2

    abs_t = list(abs_values(members))
    abs_ts = list(abs_values(adjs))
    abs_sum_norm = op_norm(sum(abs_t))
    abs_adj_sum_norm = op_norm(sum(abs_ts))
    absolute_value = abs_sum_norm * abs_adj_sum_norm

    refined_a = _half_power_factor([psd_sqrt(a, tol) for a in abs_t])
    refined_b = _half_power_factor([psd_sqrt(b, tol) for b in abs_ts])
    refined = refined_a * refined_b

    am = _pair_norm_matrix(members, adjs, 0.5)
    bm = _pair_norm_matrix(adjs, members, 0.5)
    improved = op_norm(am) * op_norm(bm)
    sa, sb = _max_row_sum(am), _max_row_sum(bm)
    cotlar_stein = sa * sb

    def step(name, lhs, rhs):
        return VerificationResult.compare(name, lhs, rhs, tol.slack("chain", rhs))

    steps = [
        step("lhs_sq<=absolute_value", lhs_sq, absolute_value),
        step("abs_sum<=refined_factor_a", abs_sum_norm, refined_a),
        step("abs_adj_sum<=refined_factor_b", abs_adj_sum_norm, refined_b),
        step("absolute_value<=refined", absolute_value, refined),
        step("refined<=improved", refined, improved),
        step("improved<=cotlar_stein", improved, cotlar_stein),
    ]
    return BoundReport(
        lhs_norm=lhs_norm,
        lhs_sq=lhs_sq,
        absolute_value=absolute_value,
        refined=refined,
        improved=improved,
        cotlar_stein=cotlar_stein,
        schur_factor_a=sa,
        schur_factor_b=sb,
        a_matrix=am,
        b_matrix=bm,
        abs_sum_norm=abs_sum_norm,
        abs_adj_sum_norm=abs_adj_sum_norm,
        refined_factor_a=refined_a,
        refined_factor_b=refined_b,
        chain_ok=all(s.passed for s in steps),
        steps=steps,
    )
