from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from api.endpoints import router as api_router

app = FastAPI(
    title="ProjCount API",
    description="Projected model counting with dynamic blocked-clause elimination.",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(api_router)


@app.get("/")
async def read_root():
    """Names the service and the counting modes it accepts."""
    return {"service": "ProjCount", "modes": ["off", "pre", "dyn"]}
