"""FastAPI application wrapping the analysis package."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..errors import GbmDeskError
from . import api, schemas

app = FastAPI(
    title="gbmdesk",
    version=__version__,
    description=(
        "GBM suitability testing, parameter estimation, price forecasting "
        "and backtesting for equity closing-price series."
    ),
)


@app.exception_handler(GbmDeskError)
async def domain_error_handler(request: Request, exc: GbmDeskError):
    return JSONResponse(
        status_code=400,
        content=schemas.ErrorModel(error=type(exc).__name__, detail=str(exc)).model_dump(),
    )


@app.get("/health", response_model=schemas.HealthModel)
def health():
    return schemas.HealthModel(status="ok", version=__version__)


@app.post("/battery", response_model=schemas.AssumptionsModel)
def battery(req: schemas.BatteryRequest):
    return api.battery(req)


@app.post("/fit", response_model=schemas.ParamsModel)
def fit(req: schemas.FitRequest):
    return api.fit(req)


@app.post("/forecast", response_model=schemas.ForecastResponse)
def forecast(req: schemas.ForecastRequest):
    return api.forecast_series(req)


@app.post("/backtest", response_model=schemas.BacktestResponse)
def backtest(req: schemas.BacktestRequest):
    return api.backtest_series(req)


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimulateRequest):
    return api.simulate_series(req)


@app.post("/report", response_model=schemas.ReportModel)
def report(req: schemas.ReportRequest):
    return api.report(req)


@app.post("/plotdata", response_class=PlainTextResponse)
def plotdata(req: schemas.PlotDataRequest):
    return PlainTextResponse(api.plotdata(req), media_type="text/csv")
