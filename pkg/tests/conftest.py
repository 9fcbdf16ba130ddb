import pytest

from fsmabs.machine import ExternalAlphabet, StateMachine

Y = ExternalAlphabet.OUTPUTS_ONLY
UY = ExternalAlphabet.INPUT_OUTPUT_PAIRS


def five_state_machine() -> StateMachine:
    """The running five-state example: two initial branches joining a
    two-cycle whose middle state can exit two ways."""
    return StateMachine(
        states=("x1", "x2", "x3", "x4", "x5"),
        inputs=("u1", "u2", "u3", "u4"),
        outputs=("y1", "y2", "y3", "y4"),
        initial=("x1", "x5"),
        transitions=(
            ("x1", "u1", "y1", "x2"),
            ("x2", "u2", "y2", "x3"),
            ("x3", "u3", "y3", "x2"),
            ("x3", "u3", "y3", "x4"),
            ("x4", "u4", "y4", "x3"),
            ("x5", "u1", "y1", "x4"),
        ),
    )


def self_loop_machine() -> StateMachine:
    return StateMachine(
        states=("s",),
        inputs=("u",),
        outputs=("y",),
        initial=("s",),
        transitions=(("s", "u", "y", "s"),),
    )


@pytest.fixture
def fig_machine() -> StateMachine:
    return five_state_machine()


@pytest.fixture
def loop_machine() -> StateMachine:
    return self_loop_machine()
