"""
Módulo de configuração de logging estruturado do simulador HDVP.

Gera logs em JSON (um objeto por linha) com timestamp, nível, módulo,
função, mensagem e detalhes, com rotação automática de arquivos.
Os logs são apenas diagnóstico: os artefatos determinísticos da simulação
(event log, métricas, resumo) são escritos por `relatorios`.
"""

import json
import logging
import os
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Carregar variáveis de ambiente do diretório do script
load_dotenv(dotenv_path=Path(__file__).parent / ".env", override=False)

NOME_LOGGER = "hdvp"


class StructuredFormatter(logging.Formatter):
    """
    Formatter que gera logs em formato JSON estruturado.
    """

    def format(self, record: logging.LogRecord) -> str:
        """
        Formata o registro de log em JSON estruturado.

        Args:
            record: Registro de log a ser formatado

        Returns:
            String JSON com os dados estruturados do log
        """
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            # Os helpers informam quem chamou; sem eles vale o registro cru
            "module": getattr(record, "modulo", record.module),
            "function": getattr(record, "funcao", record.funcName),
            "message": record.getMessage(),
        }

        if hasattr(record, "details"):
            log_data["details"] = record.details

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, ensure_ascii=False, default=str)


def configurar_logging(
    log_dir: Optional[str] = None,
    log_file: str = "hdvp.log",
    max_bytes: int = 10 * 1024 * 1024,  # 10 MB
    backup_count: int = 5,
    level: Optional[int] = None,
) -> logging.Logger:
    """
    Configura o logger `hdvp` com rotação de arquivos.

    Args:
        log_dir: Diretório dos logs (padrão: HDVP_LOG_DIR ou "logs")
        log_file: Nome do arquivo de log
        max_bytes: Tamanho máximo do arquivo antes de rotacionar (padrão: 10MB)
        backup_count: Número de arquivos de backup a manter (padrão: 5)
        level: Nível mínimo de log (padrão: HDVP_LOG_LEVEL ou INFO)

    Returns:
        Logger configurado
    """
    if log_dir is None:
        log_dir = os.getenv("HDVP_LOG_DIR", "logs")
    if level is None:
        level = logging.getLevelName(os.getenv("HDVP_LOG_LEVEL", "INFO").upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger = logging.getLogger(NOME_LOGGER)
    logger.setLevel(level)

    # Evitar duplicação de handlers
    if logger.handlers:
        return logger

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    file_handler = RotatingFileHandler(
        filename=log_path / log_file,
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(StructuredFormatter())
    logger.addHandler(file_handler)

    # Console apenas para warnings e erros
    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING)
    console_handler.setFormatter(StructuredFormatter())
    logger.addHandler(console_handler)

    return logger


def _extra(modulo: str, funcao: str, detalhes: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    extra: Dict[str, Any] = {"modulo": modulo, "funcao": funcao}
    if detalhes:
        extra["details"] = detalhes
    return extra


def registrar_erro(
    mensagem: str,
    modulo: str,
    funcao: str,
    detalhes: Optional[Dict[str, Any]] = None,
    exc_info: bool = False,
) -> None:
    """
    Registra um erro no log.

    Args:
        mensagem: Mensagem descritiva do erro
        modulo: Nome do módulo onde o erro ocorreu
        funcao: Nome da função onde o erro ocorreu
        detalhes: Informações adicionais sobre o erro
        exc_info: Se True, inclui a exceção do contexto atual
    """
    logging.getLogger(NOME_LOGGER).error(
        mensagem, extra=_extra(modulo, funcao, detalhes), exc_info=exc_info
    )


def registrar_aviso(
    mensagem: str,
    modulo: str,
    funcao: str,
    detalhes: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Registra um aviso no log.

    Args:
        mensagem: Mensagem descritiva do aviso
        modulo: Nome do módulo onde o aviso foi gerado
        funcao: Nome da função onde o aviso foi gerado
        detalhes: Informações adicionais
    """
    logging.getLogger(NOME_LOGGER).warning(mensagem, extra=_extra(modulo, funcao, detalhes))


def registrar_info(
    mensagem: str,
    modulo: str,
    funcao: str,
    detalhes: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Registra uma informação no log.

    Args:
        mensagem: Mensagem informativa
        modulo: Nome do módulo
        funcao: Nome da função
        detalhes: Informações adicionais
    """
    logging.getLogger(NOME_LOGGER).info(mensagem, extra=_extra(modulo, funcao, detalhes))


# Inicializar logger ao importar o módulo
_logger = configurar_logging()
