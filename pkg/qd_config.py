"""
Loewner QD Configuration Settings
Centralized numerical defaults for the driving-function toolkit.
"""

# Stepper Settings
STEPPER = {
    'h': 1e-4,              # capacity-time step
    'order': 4,             # Taylor order M
    'startup_s': 1e-6,      # capacity-time of the straight-slit startup
    'grading': 0.1,         # step <= grading * (t - t_launch) near a launch
    'grading_window': 1e-2,  # steps reach h this long after a launch
    'startup_rows': 8,      # rows emitted inside every startup interval
    'max_steps': 2_000_000,
    'max_order': 8,
}

# Tolerances
TOLERANCES = {
    'constraint': 1e-6,
    'newton': 1e-13,
    'collision': 1e-9,
    'startup': 1e-2,        # relative to the base gap c_plus - c_minus
    'startup_floor': 1e-14,
    'imaginary_drift': 1e-8,
    'loop_threshold': 1e4,
    'loop_ratio': 20.0,     # |xi'| growth over the second half of an arc
}

# Newton Settings
NEWTON = {
    'max_iter': 50,
    'damping_halvings': 30,
    'tip_chart_radius': 0.1,  # fraction of sqrt(t_raw) around the tip
}

# Oracle Settings
ORACLE = {
    'n_subdiv': 64,
    'refine': 8,            # rows per elementary slit
    'capacity_radius': 1e3,   # height at which z (z - F(z)) is read
}

# Multi-slit Settings
MULTI = {
    'mode': 'derived',      # 'derived' or 'printed'
}

# Radial Settings
RADIAL = {
    'mode': 'residue',      # 'residue', 'origin' or 'printed'
    'calibration_iter': 8,
}

# Output Settings
OUTPUT = {
    'svg_size': (960, 420),
    'png_size': (960, 420),
    'margin': 40,
    'slit_color': '#1f4e79',
    'driving_colors': ['#c0392b', '#27ae60', '#8e44ad', '#d35400'],
    'axis_color': '#555555',
}

# Logging Settings
LOGGING = {
    'env_var': 'LOEWNER_QD_LOG',
    'levels': {'off': None, 'info': 'INFO', 'debug': 'DEBUG'},
    'format': '%(asctime)s %(name)s %(levelname)s %(message)s',
}
