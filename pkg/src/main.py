"""
Главная точка входа. Команды:
1. generate / render — построение и рисунок Σ(λ)
2. solve / theorem — точное дерево Штейнера
3. verify / dimension — численная проверка лемм и размерности
4. serve — FastAPI Backend
"""
import sys
import os
import logging

# Добавляем корень проекта и src/ в sys.path
# (корень — для src.*, src/ — для SteinerKit.*)
_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
_src = os.path.join(_root, "src")
for _p in (_root, _src):
    if _p not in sys.path:
        sys.path.insert(0, _p)

from src.backend.config import DATA_DIR, LOG_LEVEL
from src.cli.commands import run

# Настройка логирования
logging.basicConfig(
    level=LOG_LEVEL,
    format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
    handlers=[
        logging.StreamHandler(sys.stderr),
        logging.FileHandler(str(DATA_DIR / "steinerkit.log"), encoding="utf-8"),
    ]
)


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
