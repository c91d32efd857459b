"""Reproducible randomness.

All sampling consumes uniforms through a buffered stream so that the
compiled and pure-Python kernels read exactly the same values in the
same order from a given seed.  The generator is numpy's PCG64; per-run
streams for a master seed are derived with numpy's SeedSequence
(documented, stable mixing).
"""
from __future__ import annotations

import numpy as np

GENERATOR_NAME = "numpy.PCG64"


def make_rng(seed: int, stream_key: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream_key)])))


class UniformStream:
    """Block-buffered uniform [0,1) doubles from a Generator."""

    __slots__ = ("_rng", "buf", "pos")

    def __init__(self, rng: np.random.Generator, block: int = 8192):
        self._rng = rng
        self.buf = rng.random(block)
        self.pos = 0

    def refill(self) -> None:
        self._rng.random(out=self.buf)
        self.pos = 0

    def next(self) -> float:
        if self.pos >= self.buf.shape[0]:
            self.refill()
        v = self.buf[self.pos]
        self.pos += 1
        return v
