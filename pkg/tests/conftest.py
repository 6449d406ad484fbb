import pytest

from subradiance import EnsembleInput, derive_params


@pytest.fixture(scope="session")
def crystal_input():
    """Rare-earth crystal working point used throughout the suite."""
    return EnsembleInput(
        wavelength=606e-9,
        sample_length=5e-3,
        excited_lifetime=164e-6,
        beam_diameter=100e-6,
        atom_count=1e7,
        inhomogeneous_linewidth=1e5,
    )


@pytest.fixture(scope="session")
def params(crystal_input):
    return derive_params(crystal_input)
