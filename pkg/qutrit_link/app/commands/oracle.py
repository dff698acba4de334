import os
from typing import Callable, Dict


def create_oracle_command(*, pipeline_module, exports_module) -> Dict[str, Callable]:
    def oracle(config, out_dir: str, fmt: str) -> int:
        run = pipeline_module.run_oracle(config)
        absorbed_1ph, absorbed_2ph = run.branches.absorbed
        closed_absorbed = None
        if run.closed is not None:
            closed_absorbed = {"gamma_00": run.closed.absorbed[0], "gamma_m10": run.closed.absorbed[1]}
        payload = {
            "phi2": run.branches.phi2,
            "absorbed": {"d2": absorbed_1ph, "c4": absorbed_2ph},
            "areas": {"eta_inf": run.area.eta_inf, "zeta_inf": run.area.zeta_inf},
            "norm_drift": run.branches.max_norm_drift(),
            "closed_form_absorbed": closed_absorbed,
            "approximation": None if run.report is None else run.report.to_dict(),
            "theta_crosscheck": run.crosscheck.to_dict(),
            "plan": run.plan.to_json_dict(),
        }
        exports_module.write_json(os.path.join(out_dir, "oracle.json"), payload, config=config.to_dict())
        if fmt == "csv":
            exports_module.write_csv(
                os.path.join(out_dir, "oracle_trajectories.csv"),
                exports_module.ORACLE_HEADER,
                exports_module.oracle_rows(run.branches),
                config=config.to_dict(),
            )
        return 0

    return {"oracle": oracle}
