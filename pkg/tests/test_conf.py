"""
Tests for settings lookup and precision contexts.
"""

import mpmath
import pytest
from django.core.exceptions import ImproperlyConfigured
from django.test import override_settings
from mpmath import mpf

from cmdeg.conf import DEFAULTS, configure, environment_settings, logging_config, settings
from cmdeg.exceptions import PrecisionError
from cmdeg.models import GUARD_DIGITS, PrecisionContext


class TestSettings:
    """Test settings defaults and the environment overlay."""

    def test_defaults(self):
        """Every tunable has its documented default."""
        for name, default in DEFAULTS.items():
            assert getattr(settings, name) == default

    def test_environment_override(self):
        """An environment variable of the same name wins over the default."""
        values = environment_settings({"CMDEG_DIGITS": "80", "CMDEG_SERIES_CUTOFF": "1.5"})
        assert values["CMDEG_DIGITS"] == 80
        assert values["CMDEG_SERIES_CUTOFF"] == 1.5
        assert values["CMDEG_SCAN_POINTS"] == DEFAULTS["CMDEG_SCAN_POINTS"]

    def test_empty_variable_keeps_default(self):
        """An empty variable counts as unset."""
        assert environment_settings({"CMDEG_WORKERS": ""})["CMDEG_WORKERS"] == 1

    def test_integer_settings_accept_exponent_notation(self):
        """Integer settings accept values such as 1e3."""
        assert environment_settings({"CMDEG_SCAN_POINTS": "1e3"})["CMDEG_SCAN_POINTS"] == 1000

    def test_invalid_value_raises(self):
        """A value that cannot be parsed names the offending setting."""
        with pytest.raises(ImproperlyConfigured, match="CMDEG_WORKERS"):
            environment_settings({"CMDEG_WORKERS": "many"})

    def test_unknown_setting_falls_back_to_getattr_default(self):
        """getattr with a default works for names that are not settings."""
        assert getattr(settings, "CMDEG_NOT_A_SETTING", 7) == 7

    def test_configure_keeps_existing_settings(self):
        """configure() leaves already configured settings alone."""
        assert configure(CMDEG_DIGITS=99) is settings
        assert settings.CMDEG_DIGITS == DEFAULTS["CMDEG_DIGITS"]

    def test_logging_config(self):
        """The cmdeg logger gets a console handler at the requested level."""
        config = logging_config("info")
        assert config["loggers"]["cmdeg"] == {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        }


class TestPrecisionContext:
    """Test PrecisionContext construction and validation."""

    def test_default_tolerances(self):
        """Tolerances follow the working digits."""
        ctx = PrecisionContext(working_digits=50)
        assert mpmath.almosteq(ctx.series_tol, mpf(10) ** -55, rel_eps=1e-30)
        assert mpmath.almosteq(ctx.quad_tol, mpf(10) ** -40, rel_eps=1e-30)
        assert ctx.dps == 50 + GUARD_DIGITS

    def test_too_few_digits(self):
        """Fewer than 20 digits is rejected."""
        with pytest.raises(PrecisionError):
            PrecisionContext(working_digits=10)

    def test_loose_tolerance_rejected(self):
        """A quadrature tolerance above 10^-(D-10) is rejected."""
        with pytest.raises(PrecisionError):
            PrecisionContext(working_digits=50, quad_tol=mpf(10) ** -30)

    @override_settings(CMDEG_DIGITS=30)
    def test_from_settings_uses_setting(self):
        """CMDEG_DIGITS feeds the default context."""
        assert PrecisionContext.from_settings().working_digits == 30

    @override_settings(CMDEG_DIGITS=30)
    def test_explicit_digits_win(self):
        """An explicit argument beats CMDEG_DIGITS."""
        assert PrecisionContext.from_settings(60).working_digits == 60

    def test_raised(self):
        """raised() adds digits and recomputes tolerances."""
        ctx = PrecisionContext(working_digits=30).raised(20)
        assert ctx.working_digits == 50
        assert mpmath.almosteq(ctx.series_tol, mpf(10) ** -55, rel_eps=1e-30)

    def test_workdps_restores_precision(self):
        """workdps() switches mpmath's precision only inside the block."""
        from mpmath import mp

        before = mp.dps
        with PrecisionContext(working_digits=100).workdps():
            assert mp.dps == 100 + GUARD_DIGITS
        assert mp.dps == before
