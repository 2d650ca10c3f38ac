"""Shared test utilities: random sheet generation, an independent SMF
reader, and finite-difference gradient checking."""

from __future__ import annotations

import numpy as np

from leadsheetgen.sheet import BARLINE, LeadSheet, Note, Rest
from leadsheetgen.vocab import ChordMode, ChordSymbol, RhythmType


def random_chord(rng) -> ChordSymbol:
    return ChordSymbol(int(rng.integers(0, 12)), ChordMode(int(rng.integers(0, 4))))


def random_sheet(rng, max_bars: int = 6, max_events_per_bar: int = 5) -> LeadSheet:
    """A structurally valid lead sheet with random symbols."""
    events = []
    chord = random_chord(rng)
    for _ in range(int(rng.integers(1, max_bars + 1))):
        for _ in range(int(rng.integers(1, max_events_per_bar + 1))):
            if rng.random() < 0.25:
                chord = random_chord(rng)
            rhythm = RhythmType.from_index(int(rng.integers(0, 12)))
            if rng.random() < 0.15:
                events.append(Rest(rhythm=rhythm, chord=chord))
            else:
                events.append(Note(pitch=int(rng.integers(0, 128)), rhythm=rhythm, chord=chord))
        events.append(BARLINE)
    return LeadSheet(events=events, title="random").validate()


# ---------------------------------------------------------------------------
# Minimal standard-MIDI-file reader, written independently of the package's
# writer so round-trip tests have a real oracle.


def read_smf(data: bytes):
    """Parse an SMF into (ticks_per_quarter, tracks); each track is a list
    of (absolute_tick, status_byte, data_bytes) tuples."""
    assert data[:4] == b"MThd", "missing MThd"
    header_length = int.from_bytes(data[4:8], "big")
    fmt = int.from_bytes(data[8:10], "big")
    n_tracks = int.from_bytes(data[10:12], "big")
    division = int.from_bytes(data[12:14], "big")
    assert fmt in (0, 1)
    offset = 8 + header_length
    tracks = []
    for _ in range(n_tracks):
        assert data[offset : offset + 4] == b"MTrk"
        length = int.from_bytes(data[offset + 4 : offset + 8], "big")
        body = data[offset + 8 : offset + 8 + length]
        offset += 8 + length
        tracks.append(_read_track(body))
    return division, tracks


def _read_vlq(body, i):
    value = 0
    while True:
        byte = body[i]
        i += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, i


def _read_track(body):
    events = []
    i = 0
    tick = 0
    running_status = None
    while i < len(body):
        delta, i = _read_vlq(body, i)
        tick += delta
        status = body[i]
        if status & 0x80:
            i += 1
            if status < 0xF0:
                running_status = status
        else:
            assert running_status is not None, "data byte without status"
            status = running_status
        if status == 0xFF:
            meta_type = body[i]
            length, i = _read_vlq(body, i + 1)
            payload = body[i : i + length]
            i += length
            events.append((tick, status, bytes([meta_type]) + payload))
            if meta_type == 0x2F:
                break
        elif status & 0xF0 in (0xC0, 0xD0):
            events.append((tick, status, body[i : i + 1]))
            i += 1
        else:
            events.append((tick, status, body[i : i + 2]))
            i += 2
    return events


def note_intervals(track, channel: int):
    """(pitch, on_tick, off_tick) per note, matching ons to offs in order."""
    pending = {}
    intervals = []
    for tick, status, payload in track:
        kind = status & 0xF0
        if status & 0x0F != channel or kind not in (0x80, 0x90):
            continue
        pitch = payload[0]
        velocity = payload[1]
        if kind == 0x90 and velocity > 0:
            pending.setdefault(pitch, []).append(tick)
        else:
            on = pending[pitch].pop(0)
            intervals.append((pitch, on, tick))
    assert not any(pending.values()), "unmatched note-on"
    return intervals


# ---------------------------------------------------------------------------
# Gradient checking


def numeric_gradients(params: dict, loss_fn, step: float = 1e-5) -> dict:
    """Central finite differences of ``loss_fn`` at every parameter entry."""
    out = {}
    for name, array in params.items():
        flat = array.ravel()
        numeric = np.empty(flat.size)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            up = loss_fn()
            flat[i] = original - step
            down = loss_fn()
            flat[i] = original
            numeric[i] = (up - down) / (2 * step)
        out[name] = numeric.reshape(array.shape)
    return out


def max_relative_error(analytic: dict, numeric: dict) -> float:
    """Worst per-array norm-relative difference.

    Norm-level comparison keeps the check exact where gradients carry
    signal while absorbing the ~1e-9 absolute resolution floor of central
    differences on entries whose true gradient is near zero.
    """
    worst = 0.0
    for name in analytic:
        a = np.asarray(analytic[name], dtype=np.float64).ravel()
        n = np.asarray(numeric[name], dtype=np.float64).ravel()
        scale = max(np.linalg.norm(a), np.linalg.norm(n), 1e-12)
        worst = max(worst, float(np.linalg.norm(a - n) / scale))
    return worst
