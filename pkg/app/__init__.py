import logging
import os

from flask import Flask

"""Aplicação principal e fábrica Flask.

Blueprints são importados dentro de create_app para evitar ciclos de
importação. Não há rotas HTTP: os blueprints carregam os comandos de CLI.
"""

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | int = "INFO") -> logging.Logger:
    """Handler único (stderr) no logger 'ntx'; chamadas repetidas só ajustam o nível."""
    logger = logging.getLogger("ntx")
    if not any(getattr(h, "_ntx", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        handler._ntx = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logger.setLevel(level)
    return logger


def create_app(config_object=None):
    app = Flask(__name__, instance_relative_config=True)

    # Config padrão base
    app.config.from_object("config.Config")

    # Override opcional
    if config_object:
        app.config.from_object(config_object)

    # NTX_THREADS no ambiente vale mesmo após o import de config
    raw_threads = os.environ.get("NTX_THREADS", "").strip()
    if raw_threads.isdigit() and not app.config.get("TESTING"):
        app.config["THREADS"] = int(raw_threads)

    configure_logging(app.config.get("LOG_LEVEL", "INFO"))

    # Importa e registra blueprints tardiamente
    from .cli.cli import cli_bp  # noqa: WPS433

    app.register_blueprint(cli_bp)

    return app
