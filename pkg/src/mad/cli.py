"""Command-line interface: corpus evaluation, headless decompilation, view
inspection, and the HTTP service."""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click

from .evalharness import (
    CorpusManifest,
    RecordedOutcomeStore,
    render_report,
    run_ablation,
    run_corpus,
)
from .llm import FixtureStore, ModelConfig
from .prompts.engine import ARM_NAMES, arm_config, default_asset_dir, load_prompt_assets
from .verifier import ToolchainConfig

log = logging.getLogger(__name__)


def _model_config(backend: str, model: str | None, fixtures: str | None):
    store = FixtureStore(fixtures) if fixtures else None
    if backend == "remote":
        cfg = ModelConfig.from_env(backend="remote", **({"model_id": model} if model else {}))
    else:
        cfg = ModelConfig(backend=backend, **({"model_id": model} if model else {}))
    return cfg, store


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--backend", type=click.Choice(["recorded", "mock", "remote"]), default="mock")
@click.option("--arm", type=click.Choice(list(ARM_NAMES)), default="full")
@click.option("--toolchain", "toolchain_cmd", default=None,
              help="Build command template (e.g. 'sui move build'); default from MAD_TOOLCHAIN_CMD.")
@click.option("--outcomes", "outcomes_path", default=None, type=click.Path(exists=True),
              help="Recorded recompilation outcomes JSON (replaces the live toolchain).")
@click.option("--ablation", is_flag=True, help="Run all four prompt arms.")
@click.option("--outcomes-dir", default=None, type=click.Path(exists=True),
              help="Directory with outcomes_<arm>.json files for --ablation.")
@click.option("--fixtures", default=None, type=click.Path(),
              help="Fixture store directory for the recorded backend.")
@click.option("--record", "record_dir", default=None, type=click.Path(),
              help="Record completions into this fixture store.")
@click.option("--model", default=None, help="Model id override.")
@click.option("--prompts", "prompts_dir", default=None, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv"]), default="markdown")
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--unit-tests", is_flag=True, help="Also run original unit tests where packages exist.")
def eval(manifest_path, backend, arm, toolchain_cmd, outcomes_path, ablation,
         outcomes_dir, fixtures, record_dir, model, prompts_dir, fmt, out_path,
         unit_tests):
    """Run the pipeline over a corpus manifest and report success rates."""
    manifest = CorpusManifest.load(manifest_path)
    assets = load_prompt_assets(prompts_dir or default_asset_dir())
    model_cfg, store = _model_config(backend, model, fixtures)
    record_to = FixtureStore(record_dir) if record_dir else None

    toolchain = None
    if outcomes_path:
        toolchain = RecordedOutcomeStore.load(outcomes_path)
    elif toolchain_cmd:
        toolchain = ToolchainConfig(command=toolchain_cmd)
    else:
        toolchain = ToolchainConfig.from_env()

    started = time.monotonic()
    if ablation:
        outcome_stores = None
        if outcomes_dir:
            outcome_stores = {}
            for arm_name in ARM_NAMES:
                p = Path(outcomes_dir) / f"outcomes_{arm_name}.json"
                if p.is_file():
                    outcome_stores[arm_name] = RecordedOutcomeStore.load(p)
        rows = run_ablation(manifest, model_cfg, toolchain, assets,
                            store=store, outcome_stores=outcome_stores)
        text = render_report(rows, fmt)
    else:
        prompt_cfg = arm_config(arm, assets)
        report = run_corpus(manifest, model_cfg, prompt_cfg, toolchain, assets,
                            store=store, record_to=record_to,
                            with_unit_tests=unit_tests)
        text = render_report(report, fmt)
    elapsed = time.monotonic() - started

    if out_path:
        Path(out_path).write_text(text, "utf-8")
        click.echo(f"wrote {out_path} ({elapsed:.1f}s)")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--low-level", "low_level_path", required=True, type=click.Path(exists=True))
@click.option("--disassembly", "disassembly_path", default=None, type=click.Path(exists=True))
@click.option("--bytecode", "bytecode_path", default=None, type=click.Path(exists=True),
              help="Raw module bytecode; stored base64 as the bytecode view.")
@click.option("--backend", type=click.Choice(["recorded", "mock", "remote"]), default="mock")
@click.option("--arm", type=click.Choice(list(ARM_NAMES)), default="full")
@click.option("--fixtures", default=None, type=click.Path())
@click.option("--model", default=None)
@click.option("--cache", "cache_dir", default=".mad-cache", type=click.Path())
@click.option("--prompts", "prompts_dir", default=None, type=click.Path(exists=True))
def decompile(low_level_path, disassembly_path, bytecode_path, backend, arm,
              fixtures, model, cache_dir, prompts_dir):
    """Headless submit: decompile local files and cache all five views."""
    import base64

    from .service.core import DecompilerService, ServiceConfig, UploadedModule

    service = DecompilerService(ServiceConfig(
        cache_dir=cache_dir,
        backend=backend,
        model_id=model,
        arm=arm,
        prompts_dir=prompts_dir,
        fixture_dir=fixtures,
        workers=1,
    ))
    bytecode_b64 = ""
    if bytecode_path:
        bytecode_b64 = base64.b64encode(Path(bytecode_path).read_bytes()).decode()
    module = UploadedModule(
        low_level=Path(low_level_path).read_text("utf-8"),
        disassembly=Path(disassembly_path).read_text("utf-8") if disassembly_path else "",
        bytecode_b64=bytecode_b64,
    )
    job = service.submit_uploads([module], arm=arm)
    while service.job(job.job_id).state not in ("complete", "failed"):
        time.sleep(0.05)
    job = service.job(job.job_id)
    if job.state == "failed":
        click.echo(f"failed: {job.reason}", err=True)
        sys.exit(1)
    click.echo(json.dumps({
        "package_id": job.package_id,
        "cache_key": job.cache_key,
        "modules": service.modules_of(job.package_id),
        "cache_dir": str(cache_dir),
    }, indent=2))


@main.command()
@click.option("--cache", "cache_dir", required=True, type=click.Path(exists=True))
@click.option("--package", "package_id", default="local")
@click.option("--module", "module_name", required=True)
@click.option("--view", "view_name", required=True,
              type=click.Choice(["bytecode", "disassembly", "low_level", "interface", "decompiled"]))
def view(cache_dir, package_id, module_name, view_name):
    """Print one cached view (mirror of the HTTP view endpoint)."""
    from .service.core import DecompilerService, ServiceConfig

    service = DecompilerService(ServiceConfig(cache_dir=cache_dir, workers=1))
    click.echo(service.get_view(package_id, module_name, view_name), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--backend", type=click.Choice(["recorded", "mock", "remote"]), default="mock")
@click.option("--arm", type=click.Choice(list(ARM_NAMES)), default="full")
@click.option("--cache", "cache_dir", default=".mad-cache", type=click.Path())
@click.option("--fixtures", default=None, type=click.Path())
@click.option("--model", default=None)
@click.option("--prompts", "prompts_dir", default=None, type=click.Path(exists=True))
@click.option("--static", "static_dir", default=None, type=click.Path(),
              help="Serve a built web UI from this directory.")
@click.option("--workers", default=2, type=int)
@click.option("--recompile", "run_recompile", is_flag=True,
              help="Run the MAD_TOOLCHAIN_CMD recompilation check in verification.")
def serve(host, port, backend, arm, cache_dir, fixtures, model, prompts_dir,
          static_dir, workers, run_recompile):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app
    from .service.core import ServiceConfig

    config = ServiceConfig.from_env(
        cache_dir=cache_dir,
        backend=backend,
        model_id=model,
        arm=arm,
        prompts_dir=prompts_dir,
        fixture_dir=fixtures,
        workers=workers,
        run_recompile=run_recompile,
    )
    app = create_app(config, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
