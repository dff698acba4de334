from typing import Callable, Dict

# formats each subcommand accepts; the first is used when a format is not applicable
COMMAND_FORMATS = {
    "validate": ("json",),
    "sender": ("json", "csv"),
    "solve-pulse": ("json",),
    "receiver": ("json", "csv"),
    "oracle": ("json", "csv"),
    "entangle": ("json", "csv"),
    "detect": ("json",),
    "table1": ("json", "csv", "xlsx"),
    "robustness": ("json", "csv"),
}


def register_commands(
    *,
    create_sender_commands,
    create_receiver_commands,
    create_oracle_command,
    create_detect_command,
    create_table_commands,
    pipeline_module,
    exports_module,
    excel_export_module,
    get_default_workers,
) -> Dict[str, Callable]:
    registry: Dict[str, Callable] = {}
    registry.update(create_sender_commands(pipeline_module=pipeline_module, exports_module=exports_module))
    registry.update(create_receiver_commands(pipeline_module=pipeline_module, exports_module=exports_module))
    registry.update(create_oracle_command(pipeline_module=pipeline_module, exports_module=exports_module))
    registry.update(
        create_detect_command(
            pipeline_module=pipeline_module,
            exports_module=exports_module,
            get_default_workers=get_default_workers,
        )
    )
    registry.update(
        create_table_commands(
            pipeline_module=pipeline_module,
            exports_module=exports_module,
            excel_export_module=excel_export_module,
        )
    )
    return registry
