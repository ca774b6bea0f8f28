"""Rectangular beam geometry and bending-axis selection.

The cross-section is a ``w x t`` rectangle (width in the wafer plane,
thickness out of it).  Bending "in plane" deflects along the width, so the
second moment of area is ``t*w^3/12``; bending "out of plane" deflects along
the thickness and uses ``w*t^3/12``.  ``weakest`` picks whichever is smaller,
which is the direction a compressed beam actually buckles in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import ValidationError

BENDING_AXES = ("in_plane", "out_of_plane", "weakest")


@dataclass(frozen=True)
class BeamGeometry:
    """Clamped-clamped beam geometry, SI units.

    Attributes:
        length_m: initial beam length L.
        width_m: in-plane width w.
        thickness_m: out-of-plane thickness t.
        bending_axis: one of ``in_plane``, ``out_of_plane``, ``weakest``.
    """

    length_m: float
    width_m: float
    thickness_m: float
    bending_axis: str = "weakest"

    def __post_init__(self):
        for name in ("length_m", "width_m", "thickness_m"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise ValidationError(f"geometry.{name} must be > 0, got {value!r}")
        if self.bending_axis not in BENDING_AXES:
            raise ValidationError(
                f"geometry.bending_axis must be one of {BENDING_AXES}, "
                f"got {self.bending_axis!r}"
            )
        if self.length_m < 10.0 * max(self.width_m, self.thickness_m):
            warnings.warn(
                "beam is short relative to its cross-section; slender-beam "
                "theory may be inaccurate",
                stacklevel=2,
            )

    @property
    def area_m2(self) -> float:
        """Cross-section area A = w*t."""
        return self.width_m * self.thickness_m

    @property
    def inertia_m4(self) -> float:
        """Second moment of area for the selected bending direction."""
        i_in = self.thickness_m * self.width_m**3 / 12.0
        i_out = self.width_m * self.thickness_m**3 / 12.0
        if self.bending_axis == "in_plane":
            return i_in
        if self.bending_axis == "out_of_plane":
            return i_out
        return min(i_in, i_out)
