import logging
import os
from typing import Callable, Dict

logger = logging.getLogger("commands.receiver")

EXIT_OK = 0
EXIT_INCOMPLETE = 2


def create_receiver_commands(*, pipeline_module, exports_module) -> Dict[str, Callable]:
    def solve_pulse(config, out_dir: str, fmt: str) -> int:
        stage = pipeline_module.run_sender(config)
        plan = pipeline_module.plan_receiver(config, stage)
        exports_module.write_json(os.path.join(out_dir, "plan.json"), plan.to_json_dict(), config=config.to_dict())
        return EXIT_OK

    def receiver(config, out_dir: str, fmt: str) -> int:
        stage = pipeline_module.run_sender(config)
        result = pipeline_module.run_receiver(config, stage)
        exports_module.write_json(os.path.join(out_dir, "receiver.json"), result.summary(), config=config.to_dict())
        if fmt == "csv":
            exports_module.write_csv(
                os.path.join(out_dir, "receiver_trajectories.csv"),
                exports_module.RECEIVER_HEADER,
                exports_module.receiver_rows(result.result),
                config=config.to_dict(),
            )
        return EXIT_OK

    def entangle(config, out_dir: str, fmt: str) -> int:
        stage, receiver_stage, joint = pipeline_module.run_entangle(config)
        payload = {
            "joint_state": joint.to_dict(),
            "sender": stage.summary(),
            "receiver": receiver_stage.summary(),
        }
        exports_module.write_json(os.path.join(out_dir, "entangle.json"), payload, config=config.to_dict())
        if fmt == "csv":
            exports_module.write_csv(
                os.path.join(out_dir, "receiver_trajectories.csv"),
                exports_module.RECEIVER_HEADER,
                exports_module.receiver_rows(receiver_stage.result),
                config=config.to_dict(),
            )
        if not joint.is_complete:
            logger.error("absorption incomplete (residuals eta=%.3g zeta=%.3g)", *joint.residuals)
            return EXIT_INCOMPLETE
        return EXIT_OK

    return {"solve-pulse": solve_pulse, "receiver": receiver, "entangle": entangle}
