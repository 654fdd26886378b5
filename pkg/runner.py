import sys
import signal
import logging

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

from motherbody.config import get_settings


def signal_handler(signum, frame):
    """Stop on SIGTERM / SIGINT; artifacts already written stay on disk"""
    logger.info(f"🛑 Received signal {signum}, stopping")
    sys.exit(130 if signum == signal.SIGINT else 143)


if __name__ == "__main__":
    logger.info("=" * 60)
    logger.info("🎬 MOTHERBODY - two point charges toolkit")
    logger.info("=" * 60)

    signal.signal(signal.SIGTERM, signal_handler)
    signal.signal(signal.SIGINT, signal_handler)

    settings = get_settings()
    logger.info(
        f"🔧 solver tol={settings.solver.tol:g}, threads={settings.runtime.threads}, "
        f"extra dps={settings.runtime.extra_dps}"
    )
    if settings.runtime.threads > 1:
        logger.info(f"   ladder instances run in up to {settings.runtime.threads} worker processes")

    from motherbody.cli import main

    try:
        main()
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 0
        if code:
            logger.warning(f"⚠️  exited with code {code}")
        raise
