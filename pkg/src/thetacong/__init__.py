"""Theta series of even lattices and their level-one congruences modulo primes."""

from .lattice import (
    BinaryForm,
    DiscriminantGroup,
    Lattice,
    binary_to_lattice,
    direct_sum,
    discriminant_group,
    gauss_sum,
    load_lattice,
    make_lattice,
    milgram_residual,
    weight_residue,
)
from .congruence import find_congruent_form
from .fixtures import FIXTURES, load_fixture
from .lifting import hat_lattice, main_theorem_pipeline
from .modforms import extremal_form
from .qseries import QSeries
from .theta import brute_force_counts, coset_theta, theta_series

__version__ = "0.1.0"
