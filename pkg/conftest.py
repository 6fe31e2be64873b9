"""Configuração global do pytest: módulos planos no path e logs em diretório temporário."""

import os
import sys
import tempfile
from pathlib import Path

RAIZ = Path(__file__).parent

if str(RAIZ) not in sys.path:
    sys.path.insert(0, str(RAIZ))

# Antes de qualquer import de logging_config
os.environ.setdefault("HDVP_LOG_DIR", tempfile.mkdtemp(prefix="hdvp-logs-"))
