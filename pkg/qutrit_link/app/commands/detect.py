import os
from typing import Callable, Dict


def create_detect_command(*, pipeline_module, exports_module, get_default_workers: Callable[[], int]) -> Dict[str, Callable]:
    def detect(config, out_dir: str, fmt: str) -> int:
        workers = config.detection.workers or get_default_workers()
        summary = pipeline_module.run_detect(config, workers)
        exports_module.write_json(os.path.join(out_dir, "detect.json"), summary, config=config.to_dict())
        return 0

    return {"detect": detect}
