"""
FastAPI server for the contact Kirby calculus engine.
This module contains the main API endpoints for:
- Diagram invariants (linking data, d3, delta)
- Standard moves (Schur checks, template application, independence rank)
- Twist-word certificate replay
"""

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from kirby import config

from . import invariants, mcg, moves

app = FastAPI(
    title="Contact Kirby Calculus API",
    description="Exact contact surgery invariants and verified Kirby moves",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(invariants.router)
app.include_router(moves.router)
app.include_router(mcg.router)


@app.on_event("startup")
async def startup_event():
    print(f"Loading move templates from {config.TEMPLATES_DIR}...")


@app.get("/")
async def root():
    return {"message": "Contact Kirby Calculus API is running"}


@app.get("/health", summary="Health check for all subsystems")
async def health_check():
    health = {}

    # Template assets parse and realize their block data
    try:
        from kirby.templates import check_templates
        bad = [t.name for t in check_templates() if not t.ok]
        health["templates"] = "ok" if not bad else f"fail: {', '.join(bad)}"
    except Exception as e:
        health["templates"] = f"fail: {e}"

    # Exact linear algebra
    try:
        from kirby.linalg import determinant, signature
        ok = determinant([[2, 1], [1, 2]]) == 3 and signature([[-2, 1], [1, -2]]) == -2
        health["linalg"] = "ok" if ok else "fail: self-check mismatch"
    except Exception as e:
        health["linalg"] = f"fail: {e}"

    # Word certificates
    try:
        from kirby.mcg import certificates, replay
        for cert in certificates().values():
            replay(cert)
        health["mcg_certificates"] = "ok"
    except Exception as e:
        health["mcg_certificates"] = f"fail: {e}"

    overall = all(v == "ok" for v in health.values())
    return {
        "status": "ok" if overall else "degraded",
        "details": health
    }

if __name__ == "__main__":
    import uvicorn
    uvicorn.run("api.main:app", host=config.API_HOST, port=config.API_PORT)
