"""Command-line client for the analysis service.

Subcommands map one-to-one onto service endpoints.  File access stays on
the client: input CSVs are parsed locally into request payloads, and
responses are written locally.  By default requests are served by the
in-process service layer; --server routes them to a running instance
instead.  Reports and plot data are emitted as canonical JSON/CSV so that
identical inputs and options always produce identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx
from pydantic import ValidationError

from .errors import GbmDeskError
from .ingest import Frequency, PriceSeries, load_prices
from .pipeline import AnalysisOptions, EquityReport, dumps_canonical, to_jsonable
from .service import api, schemas


class CliFailure(Exception):
    """A per-input failure; carries the message shown to the user."""


# ---------------------------------------------------------------------------
# Transport backends
# ---------------------------------------------------------------------------

_ROUTES = {
    "/battery": (schemas.BatteryRequest, api.battery),
    "/fit": (schemas.FitRequest, api.fit),
    "/forecast": (schemas.ForecastRequest, api.forecast_series),
    "/backtest": (schemas.BacktestRequest, api.backtest_series),
    "/simulate": (schemas.SimulateRequest, api.simulate_series),
    "/report": (schemas.ReportRequest, api.report),
    "/plotdata": (schemas.PlotDataRequest, api.plotdata),
}


class LocalBackend:
    """Serve requests by calling the service layer in process."""

    def post(self, path: str, payload: dict):
        model_cls, fn = _ROUTES[path]
        try:
            response = fn(model_cls.model_validate(payload))
        except ValidationError as exc:
            raise CliFailure(f"invalid request: {exc.errors()[0]['msg']}") from exc
        except GbmDeskError as exc:
            raise CliFailure(f"{type(exc).__name__}: {exc}") from exc
        if isinstance(response, str):
            return response
        return response.model_dump(mode="json")


class HttpBackend:
    """Serve requests over HTTP from a running service."""

    def __init__(self, base_url: str):
        self._client = httpx.Client(base_url=base_url, timeout=120.0)

    def post(self, path: str, payload: dict):
        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliFailure(f"request to {path} failed: {exc}") from exc
        if resp.status_code != 200:
            try:
                body = resp.json()
                message = f"{body.get('error', 'error')}: {body.get('detail', resp.text)}"
            except ValueError:
                message = resp.text
            raise CliFailure(f"{path} returned {resp.status_code}: {message}")
        if resp.headers.get("content-type", "").startswith("text/csv"):
            return resp.text
        return resp.json()


# ---------------------------------------------------------------------------
# Payload construction
# ---------------------------------------------------------------------------

def _series_payload(prices: PriceSeries) -> dict:
    return {
        "ticker": prices.ticker,
        "frequency": prices.frequency.value,
        "observations": [
            {"date": d.isoformat(), "close": c} for d, c in prices.observations
        ],
    }


def _load_series(path: str, frequency: Frequency) -> PriceSeries:
    try:
        return load_prices(path, ticker=Path(path).stem, frequency=frequency)
    except (GbmDeskError, OSError) as exc:
        raise CliFailure(f"{type(exc).__name__}: {exc}") from exc


# ---------------------------------------------------------------------------
# Configuration resolution: flags win over the key=value config file
# ---------------------------------------------------------------------------

_CONFIG_CASTS = {
    "alpha": float,
    "level": float,
    "split": float,
    "hurst_band": float,
    "dt": float,
    "seed": int,
    "horizon": int,
    "paths": int,
    "port": int,
    "freq": str,
    "kind": str,
    "out": str,
    "server": str,
    "host": str,
    "force_fit": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
}

_DEFAULTS = {
    "alpha": 0.05,
    "level": 0.95,
    "split": 0.7,
    "hurst_band": 0.1,
    "seed": 0,
    "horizon": 3,
    "paths": 10000,
    "dt": None,
    "force_fit": False,
    "server": None,
    "out": None,
    "host": "127.0.0.1",
    "port": 8000,
}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliFailure(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_CASTS:
            raise CliFailure(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_CASTS[key](value.strip())
        except ValueError as exc:
            raise CliFailure(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, default in _DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, file_values.get(key, default))
    # store_true flags: a config file can switch them on when absent on the CLI
    if hasattr(args, "force_fit") and args.force_fit is False:
        args.force_fit = bool(file_values.get("force_fit", False))
    if getattr(args, "freq", None) is None and "freq" in file_values:
        args.freq = file_values["freq"]
    if getattr(args, "kind", None) is None and "kind" in file_values:
        args.kind = file_values["kind"]
    return args


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _backend(args):
    return HttpBackend(args.server) if args.server else LocalBackend()


def _frequency(args) -> Frequency:
    if not getattr(args, "freq", None):
        raise CliFailure("--freq is required (weekly or monthly)")
    try:
        return Frequency(args.freq)
    except ValueError:
        raise CliFailure(f"unknown frequency {args.freq!r}; use weekly or monthly") from None


def _for_each_input(args, handler) -> tuple[list, int]:
    """Run handler(path) per input; collect results, never abort the batch."""
    results = []
    status = 0
    frequency = _frequency(args)
    for path in args.input:
        ticker = Path(path).stem
        try:
            results.append(handler(path, ticker, frequency))
        except CliFailure as exc:
            results.append({"ticker": ticker, "error": str(exc)})
            status = 1
    return results, status


def _emit_json(args, results, suffix: str) -> None:
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for entry in results:
            target = out_dir / f"{entry['ticker']}.{suffix}.json"
            target.write_text(dumps_canonical(entry) + "\n", encoding="utf-8")
    else:
        print(dumps_canonical(results))


def _cmd_test(args) -> int:
    backend = _backend(args)

    def handler(path, ticker, frequency):
        prices = _load_series(path, frequency)
        payload = {
            "series": _series_payload(prices),
            "alpha": args.alpha,
            "hurst_band": args.hurst_band,
        }
        return {"ticker": ticker, "error": None, "battery": backend.post("/battery", payload)}

    results, status = _for_each_input(args, handler)
    _emit_json(args, results, "battery")
    return status


def _cmd_fit(args) -> int:
    backend = _backend(args)

    def handler(path, ticker, frequency):
        prices = _load_series(path, frequency)
        payload = {"series": _series_payload(prices)}
        return {"ticker": ticker, "error": None, "params": backend.post("/fit", payload)}

    results, status = _for_each_input(args, handler)
    _emit_json(args, results, "fit")
    return status


def _cmd_forecast(args) -> int:
    backend = _backend(args)

    def handler(path, ticker, frequency):
        prices = _load_series(path, frequency)
        payload = {
            "series": _series_payload(prices),
            "horizon": args.horizon,
            "level": args.level,
            "current_price": args.price,
        }
        response = backend.post("/forecast", payload)
        return {"ticker": ticker, "error": None, **response}

    results, status = _for_each_input(args, handler)
    _emit_json(args, results, "forecast")
    return status


def _cmd_backtest(args) -> int:
    backend = _backend(args)

    def handler(path, ticker, frequency):
        prices = _load_series(path, frequency)
        payload = {
            "series": _series_payload(prices),
            "split_fraction": args.split,
            "level": args.level,
        }
        response = backend.post("/backtest", payload)
        return {"ticker": ticker, "error": None, **response}

    results, status = _for_each_input(args, handler)
    _emit_json(args, results, "backtest")
    return status


def _cmd_simulate(args) -> int:
    backend = _backend(args)

    def handler(path, ticker, frequency):
        prices = _load_series(path, frequency)
        payload = {
            "series": _series_payload(prices),
            "paths": args.paths,
            "seed": args.seed,
            "dt_total": args.dt,
            "current_price": args.price,
            "include_terminal_prices": False,
        }
        response = backend.post("/simulate", payload)
        return {"ticker": ticker, "error": None, **response}

    results, status = _for_each_input(args, handler)
    _emit_json(args, results, "simulate")
    return status


def _cmd_report(args) -> int:
    backend = _backend(args)
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    frequency = _frequency(args)
    options = AnalysisOptions(
        alpha=args.alpha,
        level=args.level,
        split_fraction=args.split,
        horizon=args.horizon,
        seed=args.seed,
        force_fit=args.force_fit,
        hurst_band=args.hurst_band,
    )
    status = 0
    for path in args.input:
        ticker = Path(path).stem
        try:
            prices = _load_series(path, frequency)
            payload = {
                "series": _series_payload(prices),
                "alpha": args.alpha,
                "level": args.level,
                "split_fraction": args.split,
                "horizon": args.horizon,
                "seed": args.seed,
                "force_fit": args.force_fit,
                "hurst_band": args.hurst_band,
            }
            report = backend.post("/report", payload)
        except CliFailure as exc:
            # ingestion failed client-side: emit an error report with the
            # same schema the service would have produced
            report = to_jsonable(
                EquityReport(
                    ticker=ticker,
                    frequency=frequency,
                    options=options,
                    error=str(exc),
                )
            )
        target = out_dir / f"{ticker}.report.json"
        target.write_text(dumps_canonical(report) + "\n", encoding="utf-8")
        if report.get("error"):
            print(f"{ticker}: error: {report['error']}")
            status = 1
        elif report.get("params") is None:
            print(f"{ticker}: gated (assumptions not met), report written to {target}")
        else:
            print(f"{ticker}: ok, report written to {target}")
    return status


def _cmd_plotdata(args) -> int:
    backend = _backend(args)
    if not args.kind:
        raise CliFailure("--kind is required (trend, histogram or qq)")
    frequency = _frequency(args)
    status = 0
    for path in args.input:
        ticker = Path(path).stem
        try:
            prices = _load_series(path, frequency)
            payload = {"series": _series_payload(prices), "kind": args.kind}
            csv_text = backend.post("/plotdata", payload)
        except CliFailure as exc:
            print(f"{ticker}: error: {exc}", file=sys.stderr)
            status = 1
            continue
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            target = out_dir / f"{ticker}.{args.kind}.csv"
            target.write_text(csv_text, encoding="utf-8")
        else:
            sys.stdout.write(csv_text)
    return status


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("gbmdesk.service.app:app", host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sub, inputs: bool = True):
    sub.add_argument("--config", help="key=value config file; flags win over file entries")
    sub.add_argument("--server", default=None, help="base URL of a running service; default runs in process")
    if inputs:
        sub.add_argument("--input", nargs="+", required=True, metavar="PATH",
                         help="input CSV file(s), one equity each, header 'date,close'")
        sub.add_argument("--freq", choices=["weekly", "monthly"], default=None,
                         help="sampling frequency of the input files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbmdesk",
        description="GBM suitability testing, fitting, forecasting and backtesting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the four-part assumption battery")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None, help="significance level (default 0.05)")
    p.add_argument("--hurst-band", dest="hurst_band", type=float, default=None,
                   help="random-walk band half-width around 0.5 (default 0.1)")
    p.add_argument("--out", default=None, help="directory for per-equity JSON output")
    p.set_defaults(fn=_cmd_test)

    p = sub.add_parser("fit", help="estimate annualized drift and volatility")
    _add_common(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("forecast", help="forecast prices with confidence intervals")
    _add_common(p)
    p.add_argument("--horizon", type=int, default=None, help="steps ahead (default 3)")
    p.add_argument("--level", type=float, default=None, help="confidence level (default 0.95)")
    p.add_argument("--price", type=float, default=None,
                   help="current price override (default: last close)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_forecast)

    p = sub.add_parser("backtest", help="hold out the tail of the series and score forecasts")
    _add_common(p)
    p.add_argument("--split", type=float, default=None, help="train fraction (default 0.7)")
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_backtest)

    p = sub.add_parser("simulate", help="Monte Carlo terminal prices at one horizon")
    _add_common(p)
    p.add_argument("--paths", type=int, default=None, help="number of paths (default 10000)")
    p.add_argument("--seed", type=int, default=None, help="generator seed (default 0)")
    p.add_argument("--dt", type=float, default=None,
                   help="horizon in years (default: one sampling step)")
    p.add_argument("--price", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("report", help="full pipeline: battery, gate, fit, forecast, backtest")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--split", type=float, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--force-fit", dest="force_fit", action="store_true", default=False,
                   help="fit even when the assumption battery fails (recorded in warnings)")
    p.add_argument("--hurst-band", dest="hurst_band", type=float, default=None)
    p.add_argument("--out", default=None, help="directory for <ticker>.report.json (default .)")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("plotdata", help="emit plot-ready CSV for returns")
    _add_common(p)
    p.add_argument("--kind", choices=["trend", "histogram", "qq"], default=None)
    p.add_argument("--out", default=None, help="directory for <ticker>.<kind>.csv")
    p.set_defaults(fn=_cmd_plotdata)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_common(p, inputs=False)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        return args.fn(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
