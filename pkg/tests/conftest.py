import sys
from pathlib import Path

# Tests import helper modules (oracle_interp, minilang_strategies) directly.
sys.path.insert(0, str(Path(__file__).parent))
