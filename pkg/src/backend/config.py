"""
Конфигурация проекта. Загрузка из .env файла.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent.parent
ENV_PATH = BASE_DIR / ".env"
load_dotenv(ENV_PATH)

# Backend
API_HOST: str = os.getenv("API_HOST", "0.0.0.0")
API_PORT: int = int(os.getenv("API_PORT", "8080"))

# Paths
DATA_DIR = Path(os.getenv("DATA_DIR", str(BASE_DIR / "data")))
DATA_DIR.mkdir(parents=True, exist_ok=True)

# Database
DATABASE_URL: str = os.getenv("DATABASE_URL", f"sqlite:///{DATA_DIR / 'steinerkit.db'}")

# Logging
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()

# Фрактал и решатель
DEFAULT_LAMBDA: float = float(os.getenv("STEINERKIT_LAMBDA", str(1 / 301)))
DEFAULT_DEPTH: int = int(os.getenv("STEINERKIT_DEPTH", "6"))
DEFAULT_TOLERANCE: float = float(os.getenv("STEINERKIT_TOL", "1e-12"))
SOLVER_JOBS: int = int(os.getenv("STEINERKIT_JOBS", "1"))  # 0 — все ядра
SOLVER_CHUNK_SIZE: int = int(os.getenv("STEINERKIT_CHUNK", "2048"))

# SVG: пикселей на единицу длины
SVG_SCALE: float = float(os.getenv("STEINERKIT_SVG_SCALE", "500"))
