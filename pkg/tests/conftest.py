"""Shared fixtures: the built-in font and its four prepared variants.

Preparation (resample + smooth + rescale over 26 glyphs) is the slow part
of most tests, so it runs once per session and everything downstream reuses
the same prepared fonts.
"""

import pytest

from glyphmotion.compiler import DeviceConfig
from glyphmotion.fixture_font import fixture_font
from glyphmotion.preprocess import PresentationCondition, prepare_presentation

CONDITIONS = (
    PresentationCondition(14.0, 1000.0),
    PresentationCondition(7.0, 1000.0),
    PresentationCondition(14.0, 500.0),
    PresentationCondition(7.0, 500.0),
)


@pytest.fixture(scope="session")
def font():
    return fixture_font()


@pytest.fixture(scope="session")
def prepared(font):
    """Condition label -> prepared font, default smoothing and sampling."""
    return {c.label(): prepare_presentation(font, c) for c in CONDITIONS}


@pytest.fixture(scope="session")
def device():
    return DeviceConfig()
