from app.validators.run_config_validator import RunConfigValidator

__all__ = ["RunConfigValidator"]
