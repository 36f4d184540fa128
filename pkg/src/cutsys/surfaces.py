"""Finite-type surfaces and compact exhaustions of the infinite-type catalog.

Infinite-type surfaces appear only through their exhaustions by compact
subsurfaces: every curve and every path in the complexes lives in some finite
stage, and "room at infinity" is consumed by stabilizing to the next stage.
The catalog is fixed: the Loch Ness monster, Jacob's ladder, and the blooming
Cantor tree (every end accumulated by genus).
"""

from __future__ import annotations

from dataclasses import dataclass


class InvalidStage(ValueError):
    pass


class NoRoom(RuntimeError):
    """A construction needed genus from a non-planar end that is not there."""


CATALOG = ("loch_ness", "jacobs_ladder", "cantor_tree_nonplanar")


@dataclass(frozen=True)
class SurfaceSpec:
    kind: str  # "finite" | "catalog"
    genus: int = 0
    boundary: int = 0
    catalog: str | None = None

    def __post_init__(self):
        if self.kind == "finite":
            if self.genus < 0 or self.boundary < 0:
                raise ValueError("finite surface needs genus >= 0, boundary >= 0")
        elif self.kind == "catalog":
            if self.catalog not in CATALOG:
                raise ValueError(f"unknown catalog surface: {self.catalog!r}")
        else:
            raise ValueError(f"unknown kind: {self.kind!r}")

    @property
    def infinite(self):
        return self.kind == "catalog"

    def to_json(self):
        if self.kind == "finite":
            return {"kind": "finite", "genus": self.genus, "boundary": self.boundary}
        return {"kind": "catalog", "name": self.catalog}

    @classmethod
    def from_json(cls, obj):
        if obj["kind"] == "finite":
            return cls("finite", genus=obj["genus"], boundary=obj["boundary"])
        return cls("catalog", catalog=obj["name"])


@dataclass(frozen=True)
class FiniteApprox:
    """One compact stage of an exhaustion."""

    genus: int
    boundary: int
    stage_index: int
    spec: SurfaceSpec

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("negative genus")


def _schedule(spec, n):
    if spec.catalog == "loch_ness":
        return n, 1
    if spec.catalog == "jacobs_ladder":
        return 2 * n, 2
    # blooming Cantor tree: binary tree of handles, 2^n boundary circles
    return 2**n - 1, 2**n


def exhaust(spec, n):
    """Stage n of the exhaustion; a finite surface is its own stage."""
    if n <= 0:
        raise InvalidStage(f"stages are numbered from 1, got {n}")
    if spec.kind == "finite":
        return FiniteApprox(spec.genus, spec.boundary, n, spec)
    g, b = _schedule(spec, n)
    return FiniteApprox(g, b, n, spec)


def stabilize(approx):
    """The next stage; strictly more genus.  Finite surfaces have no next."""
    if approx.spec.kind == "finite":
        raise NoRoom(
            "finite surface has no non-planar end to draw genus from"
        )
    return exhaust(approx.spec, approx.stage_index + 1)


@dataclass
class Exhaustion:
    """Lazily materialized increasing chain of compact stages."""

    spec: SurfaceSpec

    def stage(self, n):
        return exhaust(self.spec, n)

    def stages(self, upto):
        return [exhaust(self.spec, n) for n in range(1, upto + 1)]
