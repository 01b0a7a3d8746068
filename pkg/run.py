import os
import sys

import uvicorn

# Add the project root to the Python path to allow for module imports
sys.path.insert(0, os.path.dirname(__file__))

from core.config import get_settings  # noqa: E402

if __name__ == "__main__":
    settings = get_settings()
    uvicorn.run("main:app", host=settings.api_host, port=settings.api_port)
