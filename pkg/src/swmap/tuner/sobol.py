"""Sobol points by index (natural order, not Gray-code order).

Direction numbers are the first entries of Joe & Kuo's ``new-joe-kuo-6.21201``
table; dimension 1 is the van der Corput sequence.
"""

from __future__ import annotations

BITS = 32

# (degree s, coefficient a, initial m_1..m_s) for dimensions 2, 3, ...
_JOE_KUO = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
    (5, 4, (1, 1, 5, 5, 5)),
    (5, 7, (1, 1, 7, 11, 19)),
    (5, 11, (1, 1, 5, 1, 1)),
    (5, 13, (1, 1, 1, 3, 11)),
    (5, 14, (1, 3, 5, 5, 31)),
)

MAX_DIM = len(_JOE_KUO) + 1


def _directions(s: int, a: int, m: tuple[int, ...]) -> list[int]:
    mm = list(m)
    for i in range(s, BITS):
        val = mm[i - s] ^ (mm[i - s] << s)
        for k in range(1, s):
            if (a >> (s - 1 - k)) & 1:
                val ^= mm[i - k] << k
        mm.append(val)
    return [mm[i] << (BITS - 1 - i) for i in range(BITS)]


_V = [[1 << (BITS - 1 - i) for i in range(BITS)]] + [_directions(*row) for row in _JOE_KUO]


def sobol_point(index: int, dim: int) -> list[float]:
    """Coordinates in [0, 1) of the ``index``-th point of a ``dim``-dimensional sequence."""
    if dim > MAX_DIM:
        raise ValueError(f"at most {MAX_DIM} dimensions supported")
    if index < 0 or index >= 1 << BITS:
        raise ValueError("index out of range")
    out = []
    for d in range(dim):
        v = _V[d]
        x = 0
        i, bit = index, 0
        while i:
            if i & 1:
                x ^= v[bit]
            i >>= 1
            bit += 1
        out.append(x / float(1 << BITS))
    return out
