import logging
import os
from typing import Callable, Dict

logger = logging.getLogger("commands.sender")

EXIT_OK = 0
EXIT_VIOLATED = 2


def create_sender_commands(*, pipeline_module, exports_module) -> Dict[str, Callable]:
    def validate(config, out_dir: str, fmt: str) -> int:
        report = pipeline_module.run_validate(config)
        exports_module.write_json(os.path.join(out_dir, "validate.json"), report.to_dict(), config=config.to_dict())
        if report.violated:
            names = ", ".join(check.name for check in report.violated)
            logger.error("regime checks violated: %s", names)
            return EXIT_VIOLATED
        return EXIT_OK

    def sender(config, out_dir: str, fmt: str) -> int:
        stage = pipeline_module.run_sender(config)
        exports_module.write_json(os.path.join(out_dir, "sender.json"), stage.summary(), config=config.to_dict())
        if fmt == "csv":
            exports_module.write_csv(
                os.path.join(out_dir, "sender_waveforms.csv"),
                exports_module.SENDER_HEADER,
                exports_module.sender_rows(stage.result, stage.wavepacket),
                config=config.to_dict(),
            )
        return EXIT_OK

    return {"validate": validate, "sender": sender}
