from os import environ

import click
import uvicorn


@click.command()
@click.option(
    "--env",
    type=click.Choice(["development", "production"]),
    default="development",
)
@click.option("--host", type=str, default="127.0.0.1")
@click.option("--port", type=int, default=int(environ.get("D2DSIM_PORT", "8080")))
@click.option(
    "--workers",
    type=int,
    default=1,
    help="Uvicorn workers; sweeps run inside requests, so each worker holds one.",
)
def main(env: str, host: str, port: int, workers: int) -> None:
    """Serve the simulator API."""
    click.echo(f"Serving the D2D simulator on {host}:{port} ({workers} worker(s), {env}).")
    environ["DEBUG"] = "false" if env == "production" else environ.get("DEBUG", "true")

    uvicorn.run(
        app="src.api.main:app",
        host=host,
        port=port,
        reload=env != "production",
        workers=workers,
        log_level="warning" if env == "production" else "info",
    )


if __name__ == "__main__":
    main()
