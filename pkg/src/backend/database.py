"""
Архив отчетов верификации (SQLAlchemy + SQLite).
"""
from __future__ import annotations

import datetime
import json
import logging
from contextlib import contextmanager
from enum import Enum as PyEnum

from sqlalchemy import create_engine, Column, Integer, Float, Text, DateTime, Boolean, Enum, Index
from sqlalchemy.orm import declarative_base, sessionmaker, Session

from .config import DATABASE_URL

logger = logging.getLogger("backend.database")

engine = create_engine(DATABASE_URL, echo=False, connect_args={"check_same_thread": False})
SessionLocal = sessionmaker(bind=engine, autoflush=False, autocommit=False)
Base = declarative_base()


# ---------- Enums ----------

class ReportKind(PyEnum):
    VERIFY = "verify"       # пакет проверок лемм для одного λ
    THEOREM = "theorem"     # усечение Σ(λ) против точного решения
    LEMMA0 = "lemma0"       # только неравенства леммы 0


# ---------- Models ----------

class ReportRecord(Base):
    """Сохраненный отчет проверки."""
    __tablename__ = "reports"

    id = Column(Integer, primary_key=True, autoincrement=True)
    kind = Column(Enum(ReportKind), nullable=False)
    lam = Column(Float, nullable=False)
    # Глубина (theorem) или число точек в шаре (verify)
    depth = Column(Integer, nullable=True)
    passed = Column(Boolean, default=False, nullable=False)
    # Полный отчет (JSON)
    payload = Column(Text, default="{}")
    created_at = Column(DateTime, default=datetime.datetime.utcnow)

    __table_args__ = (
        Index("ix_reports_lookup", "kind", "lam", "depth"),
    )

    def get_payload(self) -> dict:
        try:
            return json.loads(self.payload or "{}")
        except json.JSONDecodeError:
            return {}

    def set_payload(self, data: dict):
        self.payload = json.dumps(data, ensure_ascii=False)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "lambda": self.lam,
            "depth": self.depth,
            "pass": self.passed,
            "payload": self.get_payload(),
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }

    def __repr__(self):
        return f"<ReportRecord {self.id} {self.kind.value} λ={self.lam} depth={self.depth} pass={self.passed}>"


# ---------- Helpers ----------

def init_db():
    """Создать все таблицы."""
    Base.metadata.create_all(bind=engine)


@contextmanager
def get_session() -> Session:
    """Контекстный менеджер для сессии: commit при успехе, rollback при ошибке."""
    session = SessionLocal()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def save_report(kind: ReportKind, lam: float, payload: dict, passed: bool, depth: int | None = None) -> dict:
    """Сохранить отчет и вернуть его запись в виде словаря."""
    with get_session() as session:
        record = ReportRecord(kind=kind, lam=lam, depth=depth, passed=passed)
        record.set_payload(payload)
        session.add(record)
        session.flush()
        result = record.to_dict()
    logger.info(f"Отчет #{result['id']} ({kind.value}, λ={lam}) сохранен")
    return result


def find_report(kind: ReportKind, lam: float, depth: int | None = None) -> dict | None:
    """Последний отчет с теми же параметрами или None."""
    with get_session() as session:
        query = session.query(ReportRecord).filter(ReportRecord.kind == kind, ReportRecord.lam == lam)
        query = query.filter(ReportRecord.depth.is_(None) if depth is None else ReportRecord.depth == depth)
        record = query.order_by(ReportRecord.id.desc()).first()
        return record.to_dict() if record else None


def list_reports(limit: int = 50) -> list[dict]:
    with get_session() as session:
        records = session.query(ReportRecord).order_by(ReportRecord.id.desc()).limit(limit).all()
        return [r.to_dict() for r in records]


def get_report(report_id: int) -> dict | None:
    with get_session() as session:
        record = session.get(ReportRecord, report_id)
        return record.to_dict() if record else None
