from celery.result import AsyncResult
from fastapi import APIRouter, File, HTTPException, Query, UploadFile

from celery_worker import celery_app, count_dimacs_task
from core.exceptions import CountTimeout, DimacsParseError
from models.formula import parse_dimacs
from services.counter import BceMode, count

router = APIRouter()

# synchronous counting is meant for small instances only
SYNC_COUNT_TIMEOUT = 10.0


@router.post("/upload")
async def upload_file(file: UploadFile = File(...), mode: BceMode = Query(BceMode.DYN)):
    """
    Receives a DIMACS file, starts an async count, returns the task id immediately.
    """
    content = await file.read()
    task = count_dimacs_task.delay(content, file.filename, mode.value)
    return {"task_id": task.id, "message": "File uploaded. Counting started."}


@router.post("/count")
async def count_file(file: UploadFile = File(...), mode: BceMode = Query(BceMode.DYN)):
    """
    Counts a small instance inside the request.
    """
    content = await file.read()
    try:
        formula = parse_dimacs(content)
    except DimacsParseError as e:
        raise HTTPException(status_code=400, detail=str(e))
    try:
        result = count(formula, mode, timeout=SYNC_COUNT_TIMEOUT)
    except CountTimeout as e:
        raise HTTPException(status_code=408, detail=f"{e}; use /upload for large instances")
    return result.as_dict()


@router.get("/status/{task_id}")
async def get_status(task_id: str):
    """
    Checks the status of a specific counting task.
    """
    task_result = AsyncResult(task_id, app=celery_app)

    if task_result.state == 'PENDING':
        return {"state": "PENDING", "current": 0, "total": 100, "status": "Pending in queue..."}

    elif task_result.state == 'PROGRESS':
        return {
            "state": "PROGRESS",
            "current": task_result.info.get('current', 0),
            "total": task_result.info.get('total', 100),
            "status": task_result.info.get('status', "Counting...")
        }

    elif task_result.state == 'SUCCESS':
        return {"state": "SUCCESS", "current": 100, "total": 100, "status": "Complete",
                "result": task_result.result}

    else:
        return {"state": task_result.state, "current": 100, "total": 100, "status": "Failed",
                "error": str(task_result.info)}
