"""Shared fixtures: the reference beam and materials used across the suite."""

import pytest

from microbeam import BeamGeometry, constant_material, default_material

# reference beam: 100 um x 1 um x 1.5 um, bending along the width
REF_E_PA = 150e9
REF_NU = 0.22
REF_CTE = 21.6e-6
REF_T0 = 20.0


@pytest.fixture
def geom():
    return BeamGeometry(100e-6, 1e-6, 1.5e-6, "in_plane")


@pytest.fixture
def const_mat():
    return constant_material(REF_E_PA, REF_CTE, nu=REF_NU, T_0_c=REF_T0)


@pytest.fixture
def tdep_mat():
    return default_material()
