"""Benchmark runner: measures each technique and emits the comparison matrix.

One row per technique x cover.  Raw numbers (capacity, PSNR, per-attack BER,
wrong-key rejection, embed wall time) are measured; qualitative words come
from :mod:`stegolab.grading` and nowhere else.  Rows are independent, so a
failure in one technique is reported in its row and the run continues.

The default configuration is fully synthetic and seeded, which makes the
emitted CSV reproducible byte for byte (the acceptance suite pins it against
a checked-in golden file).
"""

from __future__ import annotations

import dataclasses
import io
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import attacks, container, grading, metrics, steg, watermark
from .attacks import AttackSpec, describe_attack, parse_attack_series
from .errors import FormatError, NoFrameError, StegolabError
from .keys import Keystream, generate_keypair, keystream_bytes
from .raster import Image, ImageFormat, detect_format, get_bit_plane, load_image, save_image
from .steg import EmbedParams, StegKey

SCHEMA_VERSION = 1
SYNTHETIC_COVER = "synthetic-256"

KNOWN_TECHNIQUES = (
    ("AfterEOF",)
    + tuple(f"NKS-{k}" for k in range(1, 5))
    + tuple(f"SKS-{k}" for k in range(1, 5))
    + tuple(f"PKS-{k}" for k in range(1, 5))
    + ("VWM", "IVWM")
)

DEFAULT_BATTERY = (
    attacks.FormatRoundtrip(ImageFormat.BMP8_GRAY),
    attacks.Rotate(90.0, roundtrip=True),
    attacks.JpegLike(95),
    attacks.JpegLike(30),
    attacks.Requantize(7),
    attacks.Noise(1, seed=999),
)

# Standard watermark payloads: a 32x32 glyph for the visible mark and a
# seeded 20x20 grayscale patch for the invisible one.  Watermark capacity is
# graded at these mark sizes: the technique exists to carry a small mark, so
# its usable payload *is* the mark.
VISIBLE_MARK_SIDE = 32
VISIBLE_MARK_ORIGIN = (8, 8)
INVISIBLE_MARK_DIMS = (20, 20)


@dataclass(frozen=True)
class BenchConfig:
    """Inputs of one benchmark run; everything is seeded and explicit."""

    covers: tuple[str, ...] = (SYNTHETIC_COVER,)
    techniques: tuple[str, ...] = (
        "AfterEOF",
        "NKS-1",
        "NKS-3",
        "NKS-4",
        "SKS-3",
        "PKS-4",
        "VWM",
        "IVWM",
    )
    battery: tuple[AttackSpec, ...] = DEFAULT_BATTERY
    payload: Union[str, int] = "full"
    after_eof_payload: int = 1_048_576
    seed: int = 20260814
    wrong_key_trials: int = 100
    include_tds: bool = True
    thresholds: grading.Thresholds = grading.DEFAULT_THRESHOLDS

    def __post_init__(self):
        if not self.covers:
            raise ValueError("config needs at least one cover")
        if not self.techniques:
            raise ValueError("config needs at least one technique")
        for label in self.techniques:
            if label not in KNOWN_TECHNIQUES:
                raise ValueError(f"unknown technique {label!r}")
        if isinstance(self.payload, str) and self.payload != "full":
            raise ValueError("payload must be 'full' or a byte count")
        if isinstance(self.payload, int) and self.payload < 0:
            raise ValueError("payload byte count must be non-negative")
        if self.after_eof_payload <= 0:
            raise ValueError("after_eof_payload must be positive")
        if self.wrong_key_trials < 1:
            raise ValueError("wrong_key_trials must be positive")

    @classmethod
    def default(cls) -> "BenchConfig":
        return cls()


@dataclass(frozen=True)
class BenchRow:
    """Measured numbers plus derived grades for one technique x cover cell."""

    technique: str
    capacity_bytes: Optional[int] = None
    psnr_db: Optional[float] = None
    attack_bers: Optional[tuple[float, ...]] = None
    attack_labels: Optional[tuple[str, ...]] = None
    wrong_key_rejection: Optional[float] = None
    embed_seconds: Optional[float] = None
    grades: Optional[tuple[tuple[str, str], ...]] = None
    error: Optional[str] = None

    def grade(self, attribute: str) -> str:
        if self.grades is None:
            return grading.GRADE_NA
        return dict(self.grades).get(attribute, grading.GRADE_NA)


def synthetic_cover(seed: int, side: int = 256) -> Image:
    """Deterministic grayscale cover built from the keyed keystream."""
    raw = keystream_bytes(seed, side * side)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(side, side)
    return Image.from_array(arr)


def _load_cover(name: str, seed: int) -> Image:
    if name == SYNTHETIC_COVER:
        return synthetic_cover(seed)
    data = Path(name).read_bytes()
    return load_image(data, detect_format(data))


def _payload_for(config: BenchConfig, cap: int, seed: int) -> bytes:
    size = cap if config.payload == "full" else min(int(config.payload), cap)
    return keystream_bytes(seed, size)


def _ber_bytes(expected: bytes, got: Optional[bytes]) -> float:
    """Payload-level BER; any failed or mismatched extraction counts as 1.0."""
    if got is None or len(got) != len(expected) or not expected:
        return 1.0
    return metrics.ber(metrics.bytes_to_bits(expected), metrics.bytes_to_bits(got))


def _grades_for(
    config: BenchConfig,
    family: str,
    capacity_bytes: int,
    cover_bytes: int,
    psnr_db: float,
    bers: Sequence[float],
    rejection: Optional[float],
    key_scope: Optional[str],
    visible: bool = False,
) -> tuple[tuple[str, str], ...]:
    th = config.thresholds
    if key_scope is None:
        secrecy = grading.GRADE_NA
    else:
        secrecy = grading.grade_secrecy(rejection, key_scope, th)
    return (
        ("capacity", grading.grade_capacity(capacity_bytes, cover_bytes, th)),
        ("robustness", grading.grade_robustness(config.battery, bers, th)),
        ("secrecy", secrecy),
        ("imperceptibility", grading.grade_imperceptibility(psnr_db, visible=visible, thresholds=th)),
        ("complexity", grading.COMPLEXITY[family]),
    )


def _bench_after_eof(config: BenchConfig, cover: Image, label: str) -> BenchRow:
    fmt = ImageFormat.BMP8_GRAY if cover.channels == 1 else ImageFormat.BMP24
    cover_file = save_image(cover, fmt)
    payload = keystream_bytes(config.seed + 11, config.after_eof_payload)
    start = time.perf_counter()
    stego_file = container.append_payload(cover_file, payload, mode="framed")
    elapsed = time.perf_counter() - start
    stego_img = load_image(stego_file, fmt)

    bers = []
    for spec in config.battery:
        try:
            attacked = attacks.apply_attack(stego_img, spec)
            refile = save_image(attacked, fmt)
            got = container.extract_payload(refile, mode="framed")
        except (StegolabError, ValueError):
            got = None
        bers.append(_ber_bytes(payload, got))

    cover_bytes = cover.width * cover.height * cover.channels
    psnr_db = metrics.psnr(cover, stego_img).psnr
    grades = _grades_for(
        config, "AfterEOF", config.after_eof_payload, cover_bytes, psnr_db, bers, None, "none"
    )
    return BenchRow(
        technique=label,
        capacity_bytes=config.after_eof_payload,
        psnr_db=psnr_db,
        attack_bers=tuple(bers),
        attack_labels=tuple(describe_attack(s) for s in config.battery),
        wrong_key_rejection=None,
        embed_seconds=elapsed,
        grades=grades,
    )


def _steg_keys(config: BenchConfig, family: str) -> tuple[StegKey, StegKey]:
    """(embed key, extract key) for one LSB family."""
    if family == "NKS":
        key = StegKey.nks()
        return key, key
    if family == "SKS":
        secret = Keystream(config.seed + 21).next_u64()
        key = StegKey.sks(secret)
        return key, key
    sender = generate_keypair(config.seed + 31)
    receiver = generate_keypair(config.seed + 32)
    return StegKey.pks(sender, receiver.public), StegKey.pks(receiver, sender.public)


def _wrong_steg_keys(config: BenchConfig, family: str, true_key: StegKey):
    """Deterministic stream of wrong extraction keys for the rejection rate."""
    drawn = 0
    trial = 0
    while drawn < config.wrong_key_trials:
        trial += 1
        if family == "SKS":
            secret = Keystream(config.seed + 4000 + trial).next_u64()
            candidate = StegKey.sks(secret)
        else:
            intruder = generate_keypair(config.seed + 5000 + trial)
            candidate = StegKey.pks(intruder, generate_keypair(config.seed + 31).public)
        if candidate.seed() == true_key.seed():
            continue
        drawn += 1
        yield candidate


def _bench_lsb(config: BenchConfig, cover: Image, label: str) -> BenchRow:
    family, k_text = label.split("-")
    k = int(k_text)
    embed_key, extract_key = _steg_keys(config, family)
    cap = steg.capacity(cover, k)
    payload = _payload_for(config, cap, config.seed + 12)
    params_in = EmbedParams(k=k, key=embed_key)
    params_out = EmbedParams(k=k, key=extract_key)

    start = time.perf_counter()
    stego = steg.embed(cover, payload, params_in)
    elapsed = time.perf_counter() - start

    bers = []
    for spec in config.battery:
        try:
            attacked = attacks.apply_attack(stego, spec)
            got = steg.extract(attacked, params_out)
        except (StegolabError, ValueError):
            got = None
        bers.append(_ber_bytes(payload, got))

    rejection = None
    if family in ("SKS", "PKS"):
        rejected = 0
        for wrong in _wrong_steg_keys(config, family, embed_key):
            try:
                steg.extract(stego, EmbedParams(k=k, key=wrong))
            except NoFrameError:
                rejected += 1
        rejection = rejected / config.wrong_key_trials

    cover_bytes = cover.width * cover.height * cover.channels
    psnr_db = metrics.psnr(cover, stego).psnr
    scope = {"NKS": "none", "SKS": "sks", "PKS": "pks"}[family]
    grades = _grades_for(config, family, cap, cover_bytes, psnr_db, bers, rejection, scope)
    return BenchRow(
        technique=label,
        capacity_bytes=cap,
        psnr_db=psnr_db,
        attack_bers=tuple(bers),
        attack_labels=tuple(describe_attack(s) for s in config.battery),
        wrong_key_rejection=rejection,
        embed_seconds=elapsed,
        grades=grades,
    )


def _bench_vwm(config: BenchConfig, cover: Image, label: str) -> BenchRow:
    mark = watermark.glyph_mark(VISIBLE_MARK_SIDE)
    mark_bits = np.frombuffer(mark.bits, dtype=np.uint8)
    origin = VISIBLE_MARK_ORIGIN

    start = time.perf_counter()
    marked = watermark.embed_visible(cover, mark, origin)
    elapsed = time.perf_counter() - start

    bers = []
    for spec in config.battery:
        try:
            attacked = attacks.apply_attack(marked, spec)
            got = watermark.extract_visible(attacked, origin, (mark.width, mark.height))
            b = metrics.ber(mark_bits, np.frombuffer(got.bits, dtype=np.uint8))
        except (StegolabError, ValueError):
            b = 1.0
        bers.append(b)

    cap = mark.width * mark.height // 8
    cover_bytes = cover.width * cover.height * cover.channels
    psnr_db = metrics.psnr(cover, marked).psnr
    grades = _grades_for(
        config, "VWM", cap, cover_bytes, psnr_db, bers, None, None, visible=True
    )
    return BenchRow(
        technique=label,
        capacity_bytes=cap,
        psnr_db=psnr_db,
        attack_bers=tuple(bers),
        attack_labels=tuple(describe_attack(s) for s in config.battery),
        wrong_key_rejection=None,
        embed_seconds=elapsed,
        grades=grades,
    )


def _bench_ivwm(config: BenchConfig, cover: Image, label: str) -> BenchRow:
    w, h = INVISIBLE_MARK_DIMS
    mark = watermark.GrayMark(w, h, keystream_bytes(config.seed + 13, w * h))
    mark_bits = metrics.bytes_to_bits(mark.data)
    key = watermark.WmKey(seed=Keystream(config.seed + 22).next_u64())

    start = time.perf_counter()
    marked = watermark.embed_invisible(cover, mark, key)
    elapsed = time.perf_counter() - start

    bers = []
    for spec in config.battery:
        try:
            attacked = attacks.apply_attack(marked, spec)
            got = watermark.extract_invisible(attacked, key, (w, h))
            b = metrics.ber(mark_bits, metrics.bytes_to_bits(got.data))
        except (StegolabError, ValueError):
            b = 1.0
        bers.append(b)

    # Wrong seed => wrong slots => the vote reads unrelated plane bits, so
    # the recovered mark sits near BER 0.5; anything >= 0.25 counts rejected.
    rejected = 0
    for trial in range(config.wrong_key_trials):
        wrong_seed = Keystream(config.seed + 6000 + trial).next_u64()
        if wrong_seed == key.seed:
            rejected += 1
            continue
        wrong = watermark.WmKey(seed=wrong_seed, redundancy=key.redundancy, plane=key.plane)
        got = watermark.extract_invisible(marked, wrong, (w, h))
        if metrics.ber(mark_bits, metrics.bytes_to_bits(got.data)) >= 0.25:
            rejected += 1
    rejection = rejected / config.wrong_key_trials

    cap = w * h
    cover_bytes = cover.width * cover.height * cover.channels
    psnr_db = metrics.psnr(cover, marked).psnr
    grades = _grades_for(config, "IVWM", cap, cover_bytes, psnr_db, bers, rejection, "seed")
    return BenchRow(
        technique=label,
        capacity_bytes=cap,
        psnr_db=psnr_db,
        attack_bers=tuple(bers),
        attack_labels=tuple(describe_attack(s) for s in config.battery),
        wrong_key_rejection=rejection,
        embed_seconds=elapsed,
        grades=grades,
    )


def _tds_row(config: BenchConfig) -> BenchRow:
    return BenchRow(
        technique="TDS",
        attack_labels=tuple(describe_attack(s) for s in config.battery),
        grades=tuple(
            (attr, "not implemented")
            for attr in ("capacity", "robustness", "secrecy", "imperceptibility")
        )
        + (("complexity", grading.COMPLEXITY["TDS"]),),
    )


def _bench_one(config: BenchConfig, cover: Image, label: str) -> BenchRow:
    if label == "AfterEOF":
        return _bench_after_eof(config, cover, label)
    if label == "VWM":
        return _bench_vwm(config, cover, label)
    if label == "IVWM":
        return _bench_ivwm(config, cover, label)
    return _bench_lsb(config, cover, label)


def run_benchmark(config: BenchConfig) -> list[BenchRow]:
    """Evaluate every technique x cover cell; failures become error rows."""
    rows: list[BenchRow] = []
    many = len(config.covers) > 1
    for cover_name in config.covers:
        try:
            cover = _load_cover(cover_name, config.seed)
        except (OSError, FormatError, ValueError) as exc:
            stem = Path(cover_name).stem or cover_name
            for label in config.techniques:
                shown = f"{label}@{stem}" if many else label
                rows.append(BenchRow(technique=shown, error=f"cover failed to load: {exc}"))
            continue
        stem = Path(cover_name).stem or cover_name
        for label in config.techniques:
            shown = f"{label}@{stem}" if many else label
            try:
                row = _bench_one(config, cover, label)
                if row.technique != shown:
                    row = dataclasses.replace(row, technique=shown)
                rows.append(row)
            except (StegolabError, ValueError, OSError) as exc:
                rows.append(BenchRow(technique=shown, error=str(exc)))
    if config.include_tds:
        rows.append(_tds_row(config))
    return rows


# --- emission ---


def _fmt_float(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    if value == float("inf"):
        return "inf"
    return f"{value:.2f}"


def _fmt_int(value: Optional[int]) -> str:
    return "n/a" if value is None else str(value)


def _grades_cell(row: BenchRow) -> str:
    if row.error is not None:
        return f"error={row.error}"
    if row.grades is None:
        return "n/a"
    if all(g == "not implemented" for attr, g in row.grades if attr != "complexity"):
        return "not implemented"
    return "|".join(f"{attr}={g}" for attr, g in row.grades)


def _emit_csv(rows: Sequence[BenchRow]) -> bytes:
    labels: tuple[str, ...] = ()
    for row in rows:
        if row.attack_labels:
            labels = row.attack_labels
            break
    out = io.StringIO()
    out.write(f"# schema={SCHEMA_VERSION}\n")
    if not labels:
        # No battery: nothing to grade, only capacity/PSNR are meaningful.
        out.write("technique,capacity_bytes,psnr_db\n")
        for row in rows:
            out.write(f"{row.technique},{_fmt_int(row.capacity_bytes)},{_fmt_float(row.psnr_db)}\n")
        return out.getvalue().encode("ascii")

    head = ["technique", "capacity_bytes", "psnr_db", "wrong_key_rejection", "grades"]
    out.write(",".join(head + list(labels)) + "\n")
    for row in rows:
        cells = [
            row.technique,
            _fmt_int(row.capacity_bytes),
            _fmt_float(row.psnr_db),
            _fmt_float(row.wrong_key_rejection),
            _grades_cell(row),
        ]
        if row.attack_bers is None:
            cells.extend("n/a" for _ in labels)
        else:
            cells.extend(_fmt_float(b) for b in row.attack_bers)
        out.write(",".join(cells) + "\n")
    return out.getvalue().encode("ascii")


def _emit_markdown(rows: Sequence[BenchRow], thresholds: grading.Thresholds) -> bytes:
    out = io.StringIO()
    out.write("| Technique | Hiding Capacity | Robustness | Message Secrecy ")
    out.write("| Imperceptibility | Key management/Embedding complexity |\n")
    out.write("| --- | --- | --- | --- | --- | --- |\n")
    for row in rows:
        if row.error is not None:
            out.write(f"| {row.technique} | error: {row.error} | | | | |\n")
            continue
        if row.capacity_bytes is None and row.psnr_db is None:
            g = row.grade("capacity")
            out.write(
                f"| {row.technique} | {g} | {g} | {g} | {g} | {row.grade('complexity')} |\n"
            )
            continue
        capacity = f"{row.grade('capacity')} ({_fmt_int(row.capacity_bytes)} B)"
        if row.attack_bers is not None and row.attack_labels is not None:
            mean = grading.graded_mean_ber(
                list(_respec(row.attack_labels)), list(row.attack_bers), thresholds
            )
            robustness = f"{row.grade('robustness')} (mean BER {_fmt_float(mean)})"
        else:
            robustness = row.grade("robustness")
        secrecy = row.grade("secrecy")
        if row.wrong_key_rejection is not None:
            secrecy = f"{secrecy} (rejection {_fmt_float(row.wrong_key_rejection)})"
        impercept = row.grade("imperceptibility")
        if impercept != grading.GRADE_NA:
            impercept = f"{impercept} (PSNR {_fmt_float(row.psnr_db)} dB)"
        out.write(
            f"| {row.technique} | {capacity} | {robustness} | {secrecy} "
            f"| {impercept} | {row.grade('complexity')} |\n"
        )
    return out.getvalue().encode("ascii")


def _respec(labels: Sequence[str]) -> list[AttackSpec]:
    return parse_attack_series(",".join(labels))


def emit_report(
    rows: Sequence[BenchRow],
    fmt: str = "csv",
    thresholds: grading.Thresholds = grading.DEFAULT_THRESHOLDS,
) -> bytes:
    """Render rows deterministically as CSV or a comparison-matrix table."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "csv":
        return _emit_csv(rows)
    if fmt == "markdown":
        return _emit_markdown(rows, thresholds)
    raise ValueError(f"unknown report format {fmt!r}")


def inspect(img: Image, out_dir) -> list[Path]:
    """Write plane_0.pgm .. plane_7.pgm, each bit stretched to 0/255."""
    if img.channels != 1:
        raise FormatError("plane inspection expects a grayscale image")
    out = Path(out_dir)
    rendered = []
    for plane_index in range(8):
        plane = get_bit_plane(img, plane_index).as_array()[:, :, 0]
        view = Image.from_array((plane * np.uint8(255)).astype(np.uint8))
        rendered.append((out / f"plane_{plane_index}.pgm", save_image(view, ImageFormat.PGM_P5)))
    # Render everything first so a failure cannot leave a partial set behind.
    out.mkdir(parents=True, exist_ok=True)
    for path, data in rendered:
        path.write_bytes(data)
    return [path for path, _ in rendered]


def load_config(path) -> BenchConfig:
    """Parse the documented TOML config into a BenchConfig."""
    try:
        import tomllib
    except ModuleNotFoundError:  # python 3.10
        import tomli as tomllib

    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    kwargs = {}
    if "covers" in raw:
        kwargs["covers"] = tuple(raw["covers"])
    if "techniques" in raw:
        kwargs["techniques"] = tuple(raw["techniques"])
    if "attacks" in raw:
        kwargs["battery"] = tuple(parse_attack_series(",".join(raw["attacks"]))) if raw["attacks"] else ()
    if "payload" in raw:
        kwargs["payload"] = raw["payload"]
    if "after_eof_payload" in raw:
        kwargs["after_eof_payload"] = int(raw["after_eof_payload"])
    if "seed" in raw:
        kwargs["seed"] = int(raw["seed"])
    if "wrong_key_trials" in raw:
        kwargs["wrong_key_trials"] = int(raw["wrong_key_trials"])
    if "include_tds" in raw:
        kwargs["include_tds"] = bool(raw["include_tds"])
    return BenchConfig(**kwargs)
