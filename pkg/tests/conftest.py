import math

import numpy as np
import pytest

from bergmann2d import grating, media

ANGLES_37 = np.radians(np.linspace(-175.0, 175.0, 37))


@pytest.fixture(scope="session")
def gauss_tm():
    return media.to_alpha_beta(media.gaussian_test_medium(1.0), media.ModeKind.TM)


@pytest.fixture(scope="session")
def gauss_te_nonmagnetic():
    return media.to_alpha_beta(media.gaussian_exp(0.4, 0.0, kappa=1.0, L=5.0), media.ModeKind.TE)


@pytest.fixture(scope="session")
def brewster_grating():
    return grating.GratingSpec(10.58, 0.07, math.pi, 0.1)


@pytest.fixture(scope="session")
def vacuum_tm():
    return media.to_alpha_beta(media.slab(0.0, 0.0), media.ModeKind.TM)
