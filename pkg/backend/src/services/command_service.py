"""
Command service: builds the service graph and runs one command per RunConfig.
"""
from pathlib import Path
from typing import Dict, List, Optional

import structlog
from pydantic import BaseModel, Field

from ..config import Settings, get_settings
from ..errors import InvalidInputError
from ..models.kernel_value import TruncationPolicy
from ..models.measure import RegularityLevel
from ..models.run_config import RunConfig
from ..models.spectrum import ClassPoint, GroupSpectrum
from ..utils.formatting import to_csv, to_json
from .asymptotics_service import AsymptoticsService
from .exponent_service import ExponentService
from .kernel_service import KernelService
from .measure_service import MeasureService
from .operator_service import OperatorService
from .selfcheck_service import SelfcheckService
from .series_service import SeriesService
from .spectrum_service import SpectrumService

logger = structlog.get_logger(__name__)


class CommandResult(BaseModel):
    """Primary output, extra files keyed by path, and the exit code."""

    output: str
    files: Dict[str, str] = Field(default_factory=dict)
    exit_code: int = 0
    payload: Optional[dict] = None


class CommandService:
    """Owns one instance of every service and maps commands onto them."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.spectrum_service = SpectrumService(self.settings)
        self.exponent_service = ExponentService(self.settings)
        self.series_service = SeriesService(self.spectrum_service, self.settings)
        self.measure_service = MeasureService(self.spectrum_service, self.exponent_service, self.series_service,
                                              self.settings)
        self.kernel_service = KernelService(self.spectrum_service, self.series_service, self.measure_service,
                                            self.settings)
        self.operator_service = OperatorService(self.spectrum_service, self.exponent_service, self.measure_service,
                                                self.settings)
        self.asymptotics_service = AsymptoticsService(self.spectrum_service, self.exponent_service,
                                                      self.series_service, self.measure_service,
                                                      self.kernel_service, self.settings)
        self.selfcheck_service = SelfcheckService(self.spectrum_service, self.exponent_service,
                                                  self.measure_service, self.kernel_service, self.operator_service,
                                                  self.asymptotics_service, self.settings)

    def run(self, config: RunConfig) -> CommandResult:
        handlers = {
            "spectrum": self.cmd_spectrum,
            "kernel": self.cmd_kernel,
            "classify": self.cmd_classify,
            "fit": self.cmd_fit,
            "selfcheck": self.cmd_selfcheck,
            "explore": self.cmd_explore,
        }
        if config.command not in handlers:
            raise InvalidInputError(f"command {config.command!r} is not run through the command service")
        logger.info("running command", command=config.command, group=config.group, exponent=config.exponent)
        return handlers[config.command](config)

    # ---------------------------------------------------------------- helpers

    def _spectrum(self, config: RunConfig) -> GroupSpectrum:
        return self.spectrum_service.parse_group_spec(config.group, config.file)

    def _exponent(self, config: RunConfig):
        if not config.exponent:
            raise InvalidInputError(f"{config.command} needs --exponent")
        return self.exponent_service.parse_exponent(config.exponent)

    @staticmethod
    def _policy(config: RunConfig) -> TruncationPolicy:
        return TruncationPolicy(target_tail=config.tail, hard_max_terms=config.max_terms)

    def _points(self, spectrum: GroupSpectrum, config: RunConfig) -> List[ClassPoint]:
        if not config.points:
            return [self.spectrum_service.identity_point(spectrum)]
        return [self.spectrum_service.class_point(spectrum, p) for p in config.points]

    @property
    def digits(self) -> int:
        return self.settings.float_digits

    # --------------------------------------------------------------- commands

    def cmd_spectrum(self, config: RunConfig) -> CommandResult:
        """``index,dim,casimir`` rows of the enumerated irreps."""
        spectrum = self._spectrum(config)
        listing = self.spectrum_service.enumerate_irreps(spectrum, max_casimir=config.max_casimir,
                                                         max_count=config.count)
        rows = [(r.label(), r.dim, r.casimir) for r in listing]
        if config.as_json:
            payload = {
                "group": spectrum.describe(),
                "truncated": listing.truncated,
                "irreps": [{"index": r.label(), "dim": r.dim, "casimir": r.casimir} for r in listing],
            }
            return CommandResult(output=to_json(payload, self.digits), payload=payload)
        return CommandResult(output=to_csv(["index", "dim", "casimir"], rows, self.digits))

    def cmd_kernel(self, config: RunConfig) -> CommandResult:
        """``k_t`` over the class points and time grid."""
        spectrum = self._spectrum(config)
        exponent = self._exponent(config)
        measures = [self.measure_service.measure(spectrum, exponent, t) for t in config.times]
        points = self._points(spectrum, config)
        rows = self.kernel_service.kernel_table(measures, points, self._policy(config), config.force_uncertified)
        width = len(points[0].coordinates)
        header = ["t"] + [f"x{i}" for i in range(width)] + ["value", "tail_bound", "certified"]
        if config.as_json:
            payload = {"group": spectrum.describe(), "exponent": self.exponent_service.format_exponent(exponent),
                       "rows": [dict(zip(header, row)) for row in rows]}
            return CommandResult(output=to_json(payload, self.digits), payload=payload)
        return CommandResult(output=to_csv(header, rows, self.digits))

    def cmd_classify(self, config: RunConfig) -> CommandResult:
        """Regularity verdicts as JSON; one level or the full report."""
        spectrum = self._spectrum(config)
        exponent = self._exponent(config)
        reports = []
        for t in config.times:
            m = self.measure_service.measure(spectrum, exponent, t)
            if config.level is None:
                report = self.measure_service.regularity_report(m, config.k_max)
            else:
                verdict = self.measure_service.classify_regularity(m, RegularityLevel(config.level), config.k)
                report = {"verdicts": [verdict.to_dict()]}
            reports.append({"t": t, **report})
        payload = {"group": spectrum.describe(), "exponent": self.exponent_service.format_exponent(exponent),
                   "results": reports}
        return CommandResult(output=to_json(payload, self.digits), payload=payload)

    def cmd_fit(self, config: RunConfig) -> CommandResult:
        """
        Power-law fit of ``k_t(e)`` as JSON.

        With ``--out`` the ``t,k_t_e,model_value`` plot data goes to ``<stem>.plot.csv`` beside it.
        """
        spectrum = self._spectrum(config)
        exponent = self._exponent(config)
        window = config.window or (self.settings.fit_t_min, self.settings.fit_t_max)
        samples = self.asymptotics_service.sample_identity_density(spectrum, exponent, window, config.samples,
                                                                   self._policy(config))
        fit = self.asymptotics_service.fit_power_law(samples, window)
        payload = fit.to_dict()
        plot = to_csv(["t", "k_t_e", "model_value"], [(t, v, fit.model_value(t)) for t, v in samples], self.digits)
        files = {}
        if config.out:
            out = Path(config.out)
            files[str(out.with_name(out.stem + ".plot.csv"))] = plot
        return CommandResult(output=to_json(payload, self.digits), files=files, payload={**payload, "plot": plot})

    def cmd_selfcheck(self, config: RunConfig) -> CommandResult:
        """Pass/fail report; exit code 1 on any failure."""
        if config.list_checks:
            names = self.selfcheck_service.names()
            return CommandResult(output="\n".join(names) + "\n", payload={"checks": names})
        report = self.selfcheck_service.run(config.only)
        payload = report.to_dict()
        output = to_json(payload, self.digits) if config.as_json else report.to_text()
        return CommandResult(output=output, exit_code=0 if report.passed else 1, payload=payload)

    def cmd_explore(self, config: RunConfig) -> CommandResult:
        """Exploratory small-time report for an alpha-stable exponent."""
        if config.alpha is None:
            raise InvalidInputError("explore needs --alpha")
        spectrum = self._spectrum(config)
        report = self.asymptotics_service.stable_exploration(spectrum, config.alpha, config.b, config.window,
                                                             config.samples)
        payload = {
            "group": report.group,
            "alpha": report.alpha,
            "b": report.b,
            "fit": report.fit.to_dict(),
            "conjectured_p": report.conjectured_p,
            "certified_samples": report.certified_samples,
            "note": report.note,
        }
        return CommandResult(output=to_json(payload, self.digits), payload=payload)
