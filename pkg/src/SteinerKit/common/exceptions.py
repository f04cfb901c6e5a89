"""
В данном модуле описаны все кастомные исключения, используемые в пакете SteinerKit.
"""
from __future__ import annotations


class SteinerKitError(Exception):
    """
    Базовое исключение пакета SteinerKit.
    """

    def short_str(self) -> str:
        return str(self)


class InvalidInputError(SteinerKitError):
    """
    Исключение, которое возбуждается, если входные данные нарушают предусловия операции
    (совпадающие точки, λ вне допустимого диапазона, неверная глубина и т.п.).
    """

    def __init__(self, message: str, field: str | None = None, value: object = None):
        """
        :param message: описание нарушения.
        :param field: имя параметра, который не прошел проверку.
        :param value: полученное значение.
        """
        super(InvalidInputError, self).__init__(message)
        self.message = message
        self.field = field
        self.value = value

    def short_str(self):
        return self.message

    def __str__(self):
        if self.field is None:
            return self.message
        return f"{self.message} (параметр {self.field}={self.value!r})"


class DivergenceError(InvalidInputError):
    """
    Исключение, которое возбуждается, если запрошена бесконечная сумма расходящегося ряда
    (длина Σ(Λ) при 2λ ≥ 1).
    """

    def __init__(self, lam: float):
        super(DivergenceError, self).__init__("Ряд длин расходится: 2λ ≥ 1", "lambda", lam)
        self.lam = lam

    def short_str(self):
        return f"Длина Σ(λ) бесконечна при λ={self.lam}"


class SolverFailureError(SteinerKitError):
    """
    Исключение, которое возбуждается, если ни одна топология не сошлась за отведенное число итераций.
    """

    def __init__(self, n_terminals: int, n_topologies: int, max_iterations: int):
        self.n_terminals = n_terminals
        self.n_topologies = n_topologies
        self.max_iterations = max_iterations

    def short_str(self):
        return f"Решатель не сошелся ни для одной из {self.n_topologies} топологий."

    def __str__(self):
        return f"Решатель не сошелся: терминалов {self.n_terminals}, " \
               f"топологий {self.n_topologies}, лимит итераций {self.max_iterations}."


class VerificationFailedError(SteinerKitError):
    """
    Исключение, которое возбуждается, если одна или несколько проверок не прошли.
    """

    def __init__(self, failed_checks: list[str], report: dict | None = None):
        """
        :param failed_checks: имена непрошедших проверок.
        :param report: сериализованный отчет (если есть).
        """
        self.failed_checks = failed_checks
        self.report = report

    def short_str(self):
        return f"Не прошли проверки: {', '.join(self.failed_checks)}"

    def __str__(self):
        return self.short_str()
