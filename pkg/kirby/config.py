"""
Configuration
Settings are read from the environment (optionally a .env file)
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# --- Paths ---
REPO_ROOT = Path(__file__).resolve().parent.parent
TEMPLATES_DIR = Path(os.getenv("KIRBY_TEMPLATES_DIR", str(REPO_ROOT / "data" / "templates")))

# --- Randomized checks ---
DEFAULT_SEED = int(os.getenv("KIRBY_SEED", "0"))
DEFAULT_SAMPLES = int(os.getenv("KIRBY_SAMPLES", "100"))

# --- Logging ---
LOG_LEVEL = os.getenv("KIRBY_LOG_LEVEL", "WARNING").upper()

# --- API server ---
API_HOST = os.getenv("KIRBY_API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("KIRBY_API_PORT", "8080"))
