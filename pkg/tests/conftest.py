import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "polyroof",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("polyroof")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def frob(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def bisect_level(f, lo, hi, level, iters=200):
    """Root of f(t) = level on [lo, hi] for f increasing in t."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def ellipse_residuals(profile, m, level_fraction=0.5, directions=24):
    """Equal-roof points in the bisector plane of the zero line, scored against the ellipse.

    Coordinates: origin at the midpoint of the two roots, x toward the sphere
    centre, y perpendicular to the zero line within that plane, so the centre
    sits at (x_O, y_O) = (|M|, 0). Returns the ellipse form at each sampled
    point and its common value predicted from the level.
    """
    from polyroof.geometry import density_of_bloch
    from polyroof.roof import roof_two_root

    z1, z2 = profile.root_blochs()
    mid = 0.5 * (z1 + z2)
    u = (z2 - z1) / np.linalg.norm(z2 - z1)
    x_o = float(np.linalg.norm(mid))
    if x_o > 1e-9:
        ex = -mid / x_o
    else:
        trial = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        ex = trial - (trial @ u) * u
        ex /= np.linalg.norm(ex)
    ey = np.cross(u, ex)
    y_o = 0.0
    scale = m.adjusted_normalization(profile.normalization_N)
    expo = m.homogeneous_degree / 2

    def value(point):
        return roof_two_root(profile, m, density_of_bloch(profile.sphere, point)).value

    def chord(direction):
        # largest t with mid + t * direction inside the ball
        b = float(mid @ direction)
        return -b + np.sqrt(b * b - (float(mid @ mid) - 1))

    reach = min(chord(np.cos(a) * ex + np.sin(a) * ey) for a in np.linspace(0, 2 * np.pi, directions, endpoint=False))
    target_rh = level_fraction * reach * np.sqrt(1 - x_o**2)
    level = scale * (2 * target_rh) ** expo
    forms = []
    for a in np.linspace(0, 2 * np.pi, directions, endpoint=False):
        d = np.cos(a) * ex + np.sin(a) * ey
        t = bisect_level(lambda s: value(mid + s * d), 0.0, chord(d) * (1 - 1e-12), level)
        x, y = t * np.cos(a), t * np.sin(a)
        forms.append((1 - y_o**2) * x**2 + (1 - x_o**2) * y**2)
    return np.array(forms), target_rh**2


ACCEPTANCE_LINES: list = []


def report_criterion(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
