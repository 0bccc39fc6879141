import glob
import json
import logging
import os
from typing import Dict, List, Optional

import pandas as pd
from tqdm import tqdm

from src.data_loader import read_definition
from src.pipeline import CommandPipeline
from src.utils import OpkitError

logger = logging.getLogger(__name__)


def default_command(pipeline: CommandPipeline, path: str):
    """diag-check for bisimplicial fixtures (up to their cap), check for everything else."""
    definition = read_definition(path)
    if definition.kind == "bisimplicial":
        caps = definition.construction.params.get("caps", [2, 2])
        return pipeline.diag_check(path, min(caps))
    return pipeline.check(path)


def process_fixtures(
    data_dir: str = "data", output_file: Optional[str] = "data/batch_results.json", progress: bool = True
) -> List[Dict]:
    paths = sorted(glob.glob(os.path.join(data_dir, "*.def")))
    logger.info(f"Running {len(paths)} fixtures from {data_dir}")
    results = []
    for path in tqdm(paths, desc="fixtures", disable=not progress):
        pipeline = CommandPipeline()
        try:
            report = default_command(pipeline, path)
            record = {"fixture": os.path.basename(path), "verdict": report.verdict, "report": report.model_dump()}
        except OpkitError as e:
            logger.error(f"Fixture {path} failed to run: {e}")
            record = {"fixture": os.path.basename(path), "verdict": "ERROR", "error": f"{type(e).__name__}: {e}"}
        results.append(record)

    summary = pd.DataFrame([{"fixture": r["fixture"], "verdict": r["verdict"]} for r in results])
    if len(summary):
        logger.info("\n" + summary.to_string(index=False))
    if output_file:
        with open(output_file, "w") as f:
            json.dump({"fixtures": len(results), "results": results}, f, indent=2, sort_keys=True, default=str)
        print(f"Results for {len(results)} fixtures saved to {output_file}")
    return results


if __name__ == "__main__":
    process_fixtures()
