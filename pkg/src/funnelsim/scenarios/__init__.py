"""Access to the bundled scenario documents."""

from __future__ import annotations

from importlib import resources

_PACKAGE = __name__

BUNDLED = (
    "scara_nominal",
    "scara_jerk_saturation",
    "scara_jerk_zeroing",
    "omni_nominal",
    "omni_jerk_saturation",
    "omni_jerk_zeroing",
)


def names() -> tuple[str, ...]:
    return BUNDLED


def document(name: str) -> str:
    """Raw JSON text of a bundled scenario."""
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled scenario {name!r}; available: {', '.join(BUNDLED)}")
    return resources.files(_PACKAGE).joinpath(f"{name}.json").read_text()
