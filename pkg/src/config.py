import os

# --- PATHS ---
# config.py lives in <root>/src, data and logs sit next to src
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

DATA_DIR = os.path.join(BASE_DIR, "data")
OUTPUT_DIR = os.path.join(DATA_DIR, "output")

os.makedirs(OUTPUT_DIR, exist_ok=True)

# --- LINEAR NETWORK ---
NETWORK_CONFIG = {
    'unitarity_tol': 1e-12,      # per-entry tolerance of U^H U = 1
    'transmission_tol': 1e-15,   # slack allowed on the [0, 1] range check
}

# --- CLICK MODEL ---
# Uniform trapezoid rule on [0, 2pi): spectrally accurate for the smooth
# periodic no-click integrand
QUADRATURE_CONFIG = {
    'nodes': 256,
    'min_nodes': 16,
}

# --- WITNESS OPTIMIZER ---
# Magnitudes are searched on a log grid plus the vacuum point, then refined
# with bounded Brent in log-magnitude
OPTIMIZER_CONFIG = {
    'magnitude_cap': 8.0,        # starting cap, scaled by 1/sqrt of the weakest coupling
    'magnitude_floor': 1e-5,
    'grid_points': 64,
    'xatol': 1e-10,
    'cap_margin': 1e-6,          # relative distance below which an optimum sits on the cap
    'cap_growth': 8.0,           # cap multiplier while the optimum stays on it
    'max_cap_factor': 4096.0,    # largest cap relative to the starting one
    'limit_tol': 1e-12,          # W change between caps accepted as the infinite-intensity limit
    'tie_tol': 1e-12,
    'coordinate_sweeps': 6,      # two-input refinement passes
    'strict_bounds': True,
}

# --- A-SWEEP ---
SWEEP_CONFIG = {
    'a_min': 1e-2,               # |a| range, a itself is negative
    'a_max': 1e6,
    'a_points': 200,
    'min_points': 50,
    'parallel': True,
    'max_workers': 4,
}

# --- POWER LAW FIT ---
FIT_CONFIG = {
    'window': (1e-8, 1e-4),
    'min_points': 5,
    'max_residual': 0.05,        # max relative deviation accepted by `fit`
}

# --- CLASSIFICATION / CRITICAL RATIO ---
CLASSIFY_CONFIG = {
    'margin_tol': 1e-13,         # absolute slack on the envelope comparison
    'relative_tol': 1e-9,        # slack relative to the envelope value
}

CRITICAL_RATIO_CONFIG = {
    'eta': 1e-3,
    'ratio_min': 1e-3,           # scan range of eta / nbar
    'ratio_max': 1e4,
    'rel_tol': 1e-3,
    'max_iter': 80,
    'difference_mode': 'absolute',   # 'absolute' or 'log10'
}

# --- FOCK ORACLE ---
ORACLE_CONFIG = {
    'cutoff': 8,
    'min_cutoff': 4,
    'tail_tol': 1e-12,
    'prune_tol': 1e-16,          # branches lighter than this are dropped and counted as tail
}

# --- SOURCE DEFAULTS ---
SOURCE_DEFAULTS = {
    'eta': 0.1,
    'nbar': 0.001,
    'signal_coherence': 1.0,
    'noise_coherence': 0.0,
    'indistinguishability': 1.0,
}

# --- FIGURE PRESETS ---
# Settings of the published figure families; eta grid of the critical-nbar curves
FIGURE_PRESETS = {
    'fig3a': {'layout': 'mz', 't1': 0.5, 't2_values': [0.55, 0.6, 0.7, 0.8], 'signal_coherence': 1.0},
    'fig3b': {'layout': 'mz', 't1': 0.5, 't2_values': [0.55, 0.6, 0.7, 0.8], 'signal_coherence': 0.0},
    'fig3c': {'layout': 'mz', 't1': 0.5, 't2_values': [0.52, 0.55, 0.6, 0.65, 0.7, 0.8, 0.9]},
    'fig4a': {'layout': 'twocopy', 't_values': [0.3, 0.5, 0.7, 0.9], 'indistinguishability': 1.0},
    'fig4b': {'layout': 'twocopy', 't_values': [0.3, 0.5, 0.7, 0.9], 'indistinguishability': 0.0},
    'fig4c': {'layout': 'twocopy', 't_values': [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]},
}

FIGURE_SWEEP_CONFIG = {
    'eta_min': 1e-4,
    'eta_max': 1e-2,
    'eta_points': 9,
}

# --- EXPORT ---
EXPORT_CONFIG = {
    'sci_threshold': 1e-3,       # |x| below this (and non-zero) goes to scientific notation
    'sci_format': '{:.10e}',
    'fixed_format': '{:.12f}',
}

# --- LOGGING ---
LOGGING_CONFIG = {
    'log_dir': os.path.join(BASE_DIR, 'logs'),
    'days_to_keep': 7,
    'level': 'INFO'
}

os.makedirs(LOGGING_CONFIG['log_dir'], exist_ok=True)
