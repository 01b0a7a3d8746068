import time
from typing import Any, Dict

from celery import Celery

from core.config import get_settings
from core.exceptions import CountTimeout, DimacsParseError
from core.logger_config import logger
from models.formula import parse_dimacs
from services.counter import BceMode, count

settings = get_settings()

celery_app = Celery(
    'projcount_worker',
    broker=settings.broker_url,
    backend=settings.result_backend
)


def _report(task, current: int, status: str) -> None:
    # eager and direct calls have no result backend to report to
    if task.request.called_directly or task.request.is_eager:
        return
    task.update_state(state='PROGRESS', meta={'current': current, 'total': 100, 'status': status})


@celery_app.task(bind=True, name="tasks.count_dimacs")
def count_dimacs_task(self, content_bytes: bytes, filename: str, mode: str = "dyn",
                      timeout: float = None) -> Dict[str, Any]:
    start_time = time.time()
    _report(self, 0, 'Parsing DIMACS...')

    summary = {
        "filename": filename,
        "file_size": f"{len(content_bytes) / 1024:.2f} KB",
        "mode": mode,
    }
    try:
        formula = parse_dimacs(content_bytes)
        summary.update({"variables": formula.num_vars, "clauses": len(formula.clauses),
                        "projected": len(formula.projection)})

        _report(self, 20, 'Counting...')
        result = count(formula, BceMode(mode), timeout=timeout)
    except DimacsParseError as e:
        logger.error(f"[WORKER] {filename}: {e}")
        return {"summary": summary, "error": str(e)}
    except CountTimeout as e:
        logger.warning(f"[WORKER] {filename}: {e}")
        return {"summary": summary, "error": "TIMEOUT"}

    summary["processing_time"] = f"{round(time.time() - start_time, 2)}s"
    logger.info(f"[WORKER] {filename}: count {result.count} in {summary['processing_time']}")
    return {"summary": summary, "result": result.as_dict()}
