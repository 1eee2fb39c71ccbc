"""Run configuration: a small sectioned key = value format.

The error contract (unknown keys and out-of-range values must carry line
numbers) rules out configparser, which drops key positions, so the parsing
is done directly.  Grammar: blank lines and full-line # or ; comments are
ignored, section headers are [equation], [grid], [time], [initial],
[output], and everything else is key = value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import DEFAULT_ALPHAS, DEFAULT_QS, LEVELS
from .solver import InitialSpec, SimConfig


class ConfigError(ValueError):
    """Configuration problem, pointing at a line when one is known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class RunConfig:
    """A simulation plus where and what to write about it."""

    sim: SimConfig
    directory: str = "."
    final_snapshot: bool = True
    plots: bool = False


_SECTION_KEYS = {
    "equation": {"mu", "advection"},
    "grid": {"n", "dealias_cutoff"},
    "time": {"dt", "cfl_factor", "t_end", "sample_every"},
    "initial": {"type", "amplitude", "seed", "band", "margin", "path"},
    "output": {
        "directory",
        "blowup_threshold",
        "diagnostics",
        "alphas",
        "qs",
        "final_snapshot",
        "plots",
    },
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


class _Raw:
    """Parsed key/value strings with their line numbers."""

    def __init__(self) -> None:
        self.values: dict[tuple[str, str], tuple[str, int]] = {}
        self.section_lines: dict[str, int] = {}

    def line(self, section: str, key: str, fallback: int | None = None) -> int | None:
        entry = self.values.get((section, key))
        if entry is not None:
            return entry[1]
        return self.section_lines.get(section, fallback)

    def take(self, section: str, key: str) -> tuple[str, int] | None:
        return self.values.get((section, key))


def _scan(text: str) -> _Raw:
    raw = _Raw()
    section: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#;":
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            name = stripped[1:-1].strip()
            if name not in _SECTION_KEYS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            section = name
            raw.section_lines.setdefault(name, lineno)
            continue
        if "=" not in stripped:
            raise ConfigError("expected key = value", lineno)
        if section is None:
            raise ConfigError("key before any section header", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTION_KEYS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if (section, key) in raw.values:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno)
        raw.values[(section, key)] = (value, lineno)
    return raw


def _float(raw: _Raw, section: str, key: str, default: float | None = None) -> float | None:
    entry = raw.take(section, key)
    if entry is None:
        return default
    value, lineno = entry
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}", lineno) from None


def _int(raw: _Raw, section: str, key: str, default: int | None = None) -> int | None:
    entry = raw.take(section, key)
    if entry is None:
        return default
    value, lineno = entry
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}", lineno) from None


def _bool(raw: _Raw, section: str, key: str, default: bool) -> bool:
    entry = raw.take(section, key)
    if entry is None:
        return default
    value, lineno = entry
    word = value.lower()
    if word not in _BOOL_WORDS:
        raise ConfigError(f"{key} must be true or false, got {value!r}", lineno)
    return _BOOL_WORDS[word]


def _str(raw: _Raw, section: str, key: str, default: str | None = None) -> str | None:
    entry = raw.take(section, key)
    return default if entry is None else entry[0]


def _float_list(
    raw: _Raw, section: str, key: str, default: tuple[float, ...]
) -> tuple[float, ...]:
    entry = raw.take(section, key)
    if entry is None:
        return default
    value, lineno = entry
    parts = [p for chunk in value.split(",") for p in chunk.split()]
    if not parts:
        raise ConfigError(f"{key} needs at least one number", lineno)
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{key} must be numbers, got {value!r}", lineno) from None


def _require(condition: bool, message: str, line: int | None) -> None:
    if not condition:
        raise ConfigError(message, line)


def parse_config(text: str) -> RunConfig:
    """Parse and fully resolve a configuration.

    Defaults: n = 32, cutoff = n // 3, cfl_factor = 0.5 (when no dt),
    t_end = 1, sample_every = 10, Taylor-Green initial data, standard
    diagnostics.  mu is the one required key.
    """
    raw = _scan(text)

    mu = _float(raw, "equation", "mu")
    if mu is None:
        raise ConfigError("mu required", raw.line("equation", "mu", 1))
    advection = _bool(raw, "equation", "advection", False)

    n = _int(raw, "grid", "n", 32)
    _require(n >= 8 and n & (n - 1) == 0, f"n must be a power of two >= 8, got {n}",
             raw.line("grid", "n"))
    cutoff = _int(raw, "grid", "dealias_cutoff", 0)
    if cutoff != 0:
        _require(1 <= cutoff <= n // 3,
                 f"dealias_cutoff must lie in [1, {n // 3}] for n = {n}, got {cutoff}",
                 raw.line("grid", "dealias_cutoff"))

    dt = _float(raw, "time", "dt")
    cfl = _float(raw, "time", "cfl_factor")
    if dt is not None and cfl is not None:
        raise ConfigError("give either dt or cfl_factor, not both",
                          raw.line("time", "cfl_factor"))
    if dt is not None:
        _require(dt > 0, f"dt must be positive, got {dt}", raw.line("time", "dt"))
    if cfl is not None:
        _require(cfl > 0, f"cfl_factor must be positive, got {cfl}",
                 raw.line("time", "cfl_factor"))
    t_end = _float(raw, "time", "t_end", 1.0)
    _require(t_end >= 0, f"t_end must be nonnegative, got {t_end}",
             raw.line("time", "t_end"))
    sample_every = _int(raw, "time", "sample_every", 10)
    _require(sample_every >= 1, f"sample_every must be at least 1, got {sample_every}",
             raw.line("time", "sample_every"))

    kind = _str(raw, "initial", "type", "taylor_green")
    _require(kind in InitialSpec._KINDS,
             f"type must be one of {', '.join(InitialSpec._KINDS)}, got {kind!r}",
             raw.line("initial", "type"))
    amplitude = _float(raw, "initial", "amplitude", 1.0)
    _require(amplitude > 0, f"amplitude must be positive, got {amplitude}",
             raw.line("initial", "amplitude"))
    seed = _int(raw, "initial", "seed", 0)
    band = _int(raw, "initial", "band", 2)
    _require(band >= 1, f"band must be at least 1, got {band}",
             raw.line("initial", "band"))
    margin = _float(raw, "initial", "margin", 1.5)
    _require(kind != "amplified_band" or margin > 1,
             f"margin must exceed 1 for amplified seeds, got {margin}",
             raw.line("initial", "margin"))
    path = _str(raw, "initial", "path")
    _require(kind != "snapshot" or path is not None,
             "snapshot initial data needs a path", raw.line("initial", "type", 1))

    directory = _str(raw, "output", "directory", ".")
    threshold = _float(raw, "output", "blowup_threshold", 1e6)
    _require(threshold > 1, f"blowup_threshold must exceed 1, got {threshold}",
             raw.line("output", "blowup_threshold"))
    level = _str(raw, "output", "diagnostics", "standard")
    _require(level in LEVELS, f"diagnostics must be one of {', '.join(LEVELS)}, got {level!r}",
             raw.line("output", "diagnostics"))
    alphas = _float_list(raw, "output", "alphas", DEFAULT_ALPHAS)
    for a in alphas:
        _require(a >= 0, f"alphas must be nonnegative, got {a}",
                 raw.line("output", "alphas"))
    qs = _float_list(raw, "output", "qs", DEFAULT_QS)
    for q in qs:
        _require(q > 1.5, f"qs must exceed 3/2, got {q}", raw.line("output", "qs"))
    final_snapshot = _bool(raw, "output", "final_snapshot", True)
    plots = _bool(raw, "output", "plots", False)

    sim = SimConfig(
        mu=mu,
        advection=advection,
        grid_n=n,
        dealias_cutoff=cutoff,
        dt=dt,
        cfl_factor=cfl,
        t_end=t_end,
        sample_every=sample_every,
        initial=InitialSpec(
            kind=kind, amplitude=amplitude, seed=seed, band=band, margin=margin, path=path
        ),
        blowup_threshold=threshold,
        diagnostics_level=level,
        alphas=alphas,
        qs=qs,
    )
    return RunConfig(sim=sim, directory=directory, final_snapshot=final_snapshot, plots=plots)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)


def render_config(rc: RunConfig) -> str:
    """Canonical text whose parse equals rc (manifest reproducibility)."""
    sim = rc.sim
    lines = [
        "[equation]",
        f"mu = {sim.mu!r}",
        f"advection = {str(sim.advection).lower()}",
        "",
        "[grid]",
        f"n = {sim.grid_n}",
    ]
    if sim.dealias_cutoff != 0:
        lines.append(f"dealias_cutoff = {sim.dealias_cutoff}")
    lines += ["", "[time]"]
    if sim.dt is not None:
        lines.append(f"dt = {sim.dt!r}")
    else:
        lines.append(f"cfl_factor = {sim.cfl_factor!r}")
    lines += [
        f"t_end = {sim.t_end!r}",
        f"sample_every = {sim.sample_every}",
        "",
        "[initial]",
        f"type = {sim.initial.kind}",
        f"amplitude = {sim.initial.amplitude!r}",
        f"seed = {sim.initial.seed}",
        f"band = {sim.initial.band}",
        f"margin = {sim.initial.margin!r}",
    ]
    if sim.initial.path is not None:
        lines.append(f"path = {sim.initial.path}")
    lines += [
        "",
        "[output]",
        f"directory = {rc.directory}",
        f"blowup_threshold = {sim.blowup_threshold!r}",
        f"diagnostics = {sim.diagnostics_level}",
        "alphas = " + ", ".join(repr(a) for a in sim.alphas),
        "qs = " + ", ".join(repr(q) for q in sim.qs),
        f"final_snapshot = {str(rc.final_snapshot).lower()}",
        f"plots = {str(rc.plots).lower()}",
        "",
    ]
    return "\n".join(lines)
