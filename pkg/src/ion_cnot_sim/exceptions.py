class IonCnotSimException(RuntimeError):
    exit_code = -1


class FaultToleranceViolation(IonCnotSimException):
    exit_code = 1

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ConfigError(IonCnotSimException):
    exit_code = 2


class InfeasibleTolerance(IonCnotSimException):
    exit_code = 3

    def __init__(self, message, achieved_coverage: float):
        super().__init__(message)
        self.achieved_coverage = achieved_coverage


class CircuitContractError(IonCnotSimException, ValueError):
    pass


class ScheduleViolation(IonCnotSimException):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)
