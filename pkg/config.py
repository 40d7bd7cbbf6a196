import os


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name, "").strip()
    try:
        return int(raw) if raw else default
    except ValueError:
        return default


class Config:
    # --- Execução ---
    # Limite de workers para segmentação/integração (0 = os.cpu_count())
    THREADS = _env_int("NTX_THREADS", 0)
    LOG_LEVEL = os.environ.get("NTX_LOG_LEVEL", "INFO").upper()
    # --- Cargas ---
    # Aviso quando o total de um campo (hole/particle) foge de 1 ± tolerância
    NORMALIZATION_TOLERANCE = 0.05
    # Destaque na comparação power x gradiente (pontos percentuais)
    COMPARE_THRESHOLD_PP = 2.0
    # --- Transferência ---
    TRANSFER_MISMATCH_TOL = 1e-6
    QP_KKT_TOL = 1e-10
    # --- Diagramas (px) ---
    DIAGRAM_WIDTH = 640
    DIAGRAM_HEIGHT = 420
    DIAGRAM_GAP = 12
    # Conectores abaixo de 0,1 p.p. não são desenhados (continuam no JSON)
    DIAGRAM_EPSILON = 0.1
