"""
Constants for reflx
"""

# Assignment symbols: 0 is BLANK, real symbols are 1-based.
BLANK = 0
NODE_OUT = 1
NODE_IN = 2

# Supported Sudoku sizes
SUDOKU_SIDES = [4, 9]

# Consistency measurement
UNIT_POINT = 1
CONSISTENCY_BONUS = 10
SET_BONUS_PER_NODE = 10

# Model defaults
SUDOKU_DIM = 96
GRAPH_DIM = 64
MESSAGE_ROUNDS = 8
DEGREE_CAP = 24

# Optimizer defaults
ADAM_LR = 1e-3
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# Training defaults
LOSS_ALPHA = 1.0
LOSS_BETA = 1.0
SIZE_THRESHOLD_C = 0.8
BASELINE_DECAY = 0.99

# Flag decision threshold at inference
FLAG_THRESHOLD = 0.5

# Checkpoint format
CHECKPOINT_MAGIC = "REFLX1"

# Oracle size guards
ORACLE_MAX_NODES = 40
EXHAUSTIVE_MAX_NODES = 16

# Zeroth-order selection search shape
ZEROTH_RESTARTS_PER_SIZE = 20
ZEROTH_MAX_STEPS = 10
ZEROTH_NEIGHBOR_SAMPLES = 8

# Generation
GENERATION_RETRY_BUDGET = 50

# Data files
SUDOKU_CSV_HEADER = ["quizzes", "solutions"]
MANIFEST_SUFFIX = ".manifest.json"
EDGE_LIST_SUFFIX = ".edges"
