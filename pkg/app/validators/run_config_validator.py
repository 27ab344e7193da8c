from app.models.encoder import SolverMode
from app.schemas import RunConfig


class RunConfigValidator:
    @staticmethod
    def validate(config: RunConfig) -> dict:
        """
        Cross-field rules for a run configuration.

        Rules:
        1. solve: exactly one of lambda / alpha_tol
        2. sweep: at most one of lambda / lambda grid, never alpha_tol
        3. alpha_tol needs epsilon, epsilon needs alpha_tol
        4. Kernel settings only in kernel mode
        5. Evaluation needs a test set (test file or train fraction)
        6. Lambda grid values in [0, 1]
        """
        errors = []

        targets = [name for name, value in (
            ("lambda", config.lam),
            ("lambda_grid", config.lambda_grid),
            ("alpha_tol", config.alpha_tol),
        ) if value is not None]

        if config.command == "solve" and len(targets) != 1:
            errors.append(f"solve needs exactly one of --lambda or --alpha-tol, got {len(targets)}")
        if config.command == "solve" and config.lambda_grid is not None:
            errors.append("solve takes a single --lambda, not a grid")
        if config.command == "sweep":
            if config.alpha_tol is not None:
                errors.append("sweep does not take --alpha-tol")
            if config.lam is not None and config.lambda_grid is not None:
                errors.append("sweep takes either --lambda or --grid, not both")

        if (config.alpha_tol is None) != (config.epsilon is None):
            errors.append("--alpha-tol and --epsilon must be given together")

        if config.kernel is not None and config.mode != SolverMode.KERNEL:
            errors.append("Kernel settings are only valid with --mode kernel")

        if config.evaluate and config.test_path is None and config.train_fraction is None:
            errors.append("--evaluate needs a test set (--test or --train-fraction)")

        if config.lambda_grid is not None:
            if not config.lambda_grid:
                errors.append("Lambda grid is empty")
            bad = [v for v in config.lambda_grid if not 0.0 <= v <= 1.0]
            if bad:
                errors.append(f"Lambda grid values must lie in [0, 1], got {bad}")

        return {
            "valid": len(errors) == 0,
            "errors": errors,
            "targets": targets,
        }
