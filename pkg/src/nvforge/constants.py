"""Physical constants (CODATA 2018, SI) and a few unit helpers."""

HBAR = 1.054571817e-34  # J s
H_PLANCK = 6.62607015e-34  # J s
EPS0 = 8.8541878128e-12  # F m^-1
C_LIGHT = 2.99792458e8  # m s^-1
K_B = 1.380649e-23  # J K^-1
E_CHARGE = 1.602176634e-19  # C
M_ELECTRON_EV = 0.51099895000e6  # eV
AMU_EV = 931.49410242e6  # eV
N_AVOGADRO = 6.02214076e23  # mol^-1
BOHR_NM = 5.29177210903e-2  # nm
E2_EV_NM = 1.439964548  # e^2 / (4 pi eps0) in eV nm

UM = 1e-6
NM = 1e-9
CM = 1e-2
