"""Operator matrices: block assembly, flattening and the positivity facts they carry."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .linalg import DimensionError, abs_value, adjoint, as_matrix, op_norm, psd_sqrt


class BlockMatrix:
    """A grid of matrices whose row/column slot dimensions line up.

    Ragged grids are rejected at construction.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[Sequence]):
        grid = tuple(tuple(as_matrix(b) for b in row) for row in blocks)
        if not grid or not grid[0]:
            raise DimensionError("block matrix needs at least one block")
        ncols = len(grid[0])
        for i, row in enumerate(grid):
            if len(row) != ncols:
                raise DimensionError(f"block row {i} has {len(row)} blocks, expected {ncols}")
        rows = [row[0].shape[0] for row in grid]
        cols = [b.shape[1] for b in grid[0]]
        for i, row in enumerate(grid):
            for j, b in enumerate(row):
                if b.shape != (rows[i], cols[j]):
                    raise DimensionError(
                        f"block ({i}, {j}) has shape {b.shape}, expected {(rows[i], cols[j])}"
                    )
        self.blocks = grid

    def __repr__(self) -> str:
        return f"BlockMatrix({self.block_rows}x{self.block_cols}, rows={self.block_dim_rows}, cols={self.block_dim_cols})"

    @property
    def block_rows(self) -> int:
        return len(self.blocks)

    @property
    def block_cols(self) -> int:
        return len(self.blocks[0])

    @property
    def block_dim_rows(self) -> tuple[int, ...]:
        return tuple(row[0].shape[0] for row in self.blocks)

    @property
    def block_dim_cols(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.blocks[0])

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    def flatten(self) -> np.ndarray:
        return np.block([list(row) for row in self.blocks])

    @classmethod
    def from_flat(cls, m, block_dim_rows: Sequence[int], block_dim_cols: Sequence[int]) -> "BlockMatrix":
        """Slice ``m`` back into blocks of the given slot sizes."""
        m = as_matrix(m)
        if m.shape != (sum(block_dim_rows), sum(block_dim_cols)):
            raise DimensionError(
                f"matrix shape {m.shape} does not match slot sizes "
                f"{tuple(block_dim_rows)} x {tuple(block_dim_cols)}"
            )
        r_off = np.concatenate([[0], np.cumsum(block_dim_rows)])
        c_off = np.concatenate([[0], np.cumsum(block_dim_cols)])
        return cls(
            [
                [m[r_off[i]:r_off[i + 1], c_off[j]:c_off[j + 1]] for j in range(len(block_dim_cols))]
                for i in range(len(block_dim_rows))
            ]
        )

    def adjoint(self) -> "BlockMatrix":
        return BlockMatrix(
            [[adjoint(self.blocks[i][j]) for i in range(self.block_rows)] for j in range(self.block_cols)]
        )

    def __matmul__(self, other: "BlockMatrix") -> "BlockMatrix":
        if self.block_dim_cols != other.block_dim_rows:
            raise DimensionError("inner block dimensions do not match")
        return BlockMatrix(
            [
                [
                    sum(self.blocks[i][k] @ other.blocks[k][j] for k in range(self.block_cols))
                    for j in range(other.block_cols)
                ]
                for i in range(self.block_rows)
            ]
        )

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        if (self.block_dim_rows, self.block_dim_cols) != (other.block_dim_rows, other.block_dim_cols):
            raise DimensionError("block layouts differ")
        return BlockMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.blocks, other.blocks)]
        )

    def norm(self) -> float:
        return op_norm(self.flatten())

    def min_eigenvalue(self) -> float:
        f = self.flatten()
        return float(np.linalg.eigvalsh((f + f.conj().T) / 2)[0])


def _psd_roots(family, tol: Tolerances) -> list[np.ndarray]:
    members = [as_matrix(a) for a in family]
    if not members:
        raise DimensionError("family must have at least one member")
    d = members[0].shape
    for k, a in enumerate(members):
        if a.shape != d or d[0] != d[1]:
            raise DimensionError(f"member {k} has shape {a.shape}, expected square {d}")
    return [psd_sqrt(a, tol) for a in members]


def row_operator(family, tol: Tolerances = DEFAULT) -> BlockMatrix:
    """The 1 x n row ``[A_1^{1/2} ... A_n^{1/2}]`` mapping ``H^n -> H``."""
    return BlockMatrix([_psd_roots(family, tol)])


def gram_block(family, tol: Tolerances = DEFAULT) -> BlockMatrix:
    """n x n block matrix with ``(j, k)`` block ``A_j^{1/2} A_k^{1/2}``, i.e. ``R^* R``."""
    roots = _psd_roots(family, tol)
    return BlockMatrix([[rj @ rk for rk in roots] for rj in roots])


def entrywise_norm_matrix(b: BlockMatrix) -> np.ndarray:
    """Scalar matrix of block operator norms (complex dtype, zero imaginary part)."""
    return np.array(
        [[op_norm(b.block(i, j)) for j in range(b.block_cols)] for i in range(b.block_rows)],
        dtype=np.complex128,
    )


def positive_block(t) -> BlockMatrix:
    """``[[|T|, T^*], [T, |T^*|]]``, positive because it factors as ``C C^*``
    with ``C = [|T|^{1/2}; V |T|^{1/2}]`` for the polar decomposition ``T = V|T|``."""
    t = as_matrix(t)
    if t.shape[0] != t.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {t.shape}")
    return BlockMatrix([[abs_value(t), adjoint(t)], [t, abs_value(adjoint(t))]])


def assemble_P(family) -> BlockMatrix:
    """Sum of :func:`positive_block` over the family."""
    blocks = [positive_block(t) for t in family]
    if not blocks:
        raise DimensionError("family must have at least one member")
    if len({b.block_dim_rows for b in blocks}) != 1:
        raise DimensionError("family members must share one dimension")
    total = blocks[0]
    for b in blocks[1:]:
        total = total + b
    return total
