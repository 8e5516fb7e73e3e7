#!/usr/bin/env python3
"""Generate the two bundled demo homes in the raw Ordonez-style layout.

Deterministic (fixed seed): rerunning reproduces the committed files byte
for byte.  Home A (13 days) has sensors that map cleanly onto activities;
home B (21 days) adds interior door sensors that fire on room transitions
and stay active while doors stand open, plus near-identical meal
signatures, which is what degrades state-based representations there.

Usage: python3 tools/make_demo_homes.py [out_dir]   (default data/raw)
"""

from __future__ import annotations

import random
import sys
from datetime import date, datetime, timedelta
from pathlib import Path

DAY_S = 86400


def m(h: int, mi: int = 0, s: int = 0) -> int:
    return h * 3600 + mi * 60 + s


class Home:
    def __init__(self, seed: int, base_day: date, n_days: int):
        self.rng = random.Random(seed)
        self.base = datetime(base_day.year, base_day.month, base_day.day)
        self.n_days = n_days
        self.events: list[tuple[int, int, str, str, str]] = []  # start_s, end_s, loc, type, place
        self.annotations: list[tuple[int, int, str]] = []
        self.limit_s = n_days * DAY_S - 30  # never spill into day n_days+1

    # -- primitives --------------------------------------------------------

    def clamp(self, t: float) -> int:
        return int(max(0, min(self.limit_s, t)))

    def event(self, sensor: tuple[str, str, str], start: float, end: float) -> None:
        s, e = self.clamp(start), self.clamp(end)
        if e < s:
            s, e = e, s
        self.events.append((s, e, *sensor))

    def annotate(self, activity: str, start: float, end: float) -> None:
        s, e = self.clamp(start), self.clamp(end)
        if e - s >= 30:
            self.annotations.append((s, e, activity))

    def pulse(self, sensor, around: float, dur_range=(3, 12), jitter_s: float = 20) -> None:
        r = self.rng
        start = around + r.uniform(-jitter_s, jitter_s)
        self.event(sensor, start, start + r.uniform(*dur_range))

    def pulses(self, sensor, span: tuple[float, float], count: int, dur_range=(5, 25)) -> None:
        r = self.rng
        s, e = span
        for _ in range(count):
            start = r.uniform(s, max(s, e - dur_range[1]))
            self.event(sensor, start, start + r.uniform(*dur_range))

    def covering(self, sensor, span: tuple[float, float], coverage=(0.75, 0.95),
                 pieces=(1, 3)) -> None:
        """Sensor active over most of the span, in one or a few pieces."""
        r = self.rng
        s, e = span
        width = e - s
        total = width * r.uniform(*coverage)
        n = r.randint(*pieces)
        cuts = sorted(r.uniform(0.1, 0.9) for _ in range(n - 1))
        bounds = [0.0, *cuts, 1.0]
        offset = s + r.uniform(0, width - total)
        for i in range(n):
            ps = offset + bounds[i] * total
            pe = offset + bounds[i + 1] * total
            if i > 0:
                ps += r.uniform(1, 20)  # small off gaps between pieces
            if pe > ps:
                self.event(sensor, ps, pe)

    # -- output ------------------------------------------------------------

    def fmt(self, t_s: int) -> str:
        return (self.base + timedelta(seconds=t_s)).strftime("%Y-%m-%d %H:%M:%S")

    def write(self, out_dir: Path, prefix: str, corrupt_sensor_rows: list[int]) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        sep = "-" * 88

        rows = sorted(self.events)
        lines = ["Start time\t\tEnd time\t\tLocation\tType\tPlace", sep]
        for i, (s, e, loc, typ, place) in enumerate(rows):
            start, end = self.fmt(s), self.fmt(e)
            if i in corrupt_sensor_rows:
                # misaligned row, as found in real exports
                start = start[:-2] + "c" + start[-1]
            lines.append(f"{start}\t{end}\t{loc}\t{typ}\t{place}")
        (out_dir / f"{prefix}_sensors.txt").write_text("\n".join(lines) + "\n")

        rows2 = sorted(self.annotations)
        lines = ["Start time\t\tEnd time\t\tActivity", sep]
        for s, e, act in rows2:
            lines.append(f"{self.fmt(s)}\t{self.fmt(e)}\t{act}")
        (out_dir / f"{prefix}_adls.txt").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# sensors
# ---------------------------------------------------------------------------

BED = ("Bed", "Pressure", "Bedroom")
BASIN = ("Basin", "PIR", "Bathroom")
SHOWER = ("Shower", "PIR", "Bathroom")
TOILET = ("Toilet", "Flush", "Bathroom")
CABINET = ("Cabinet", "Magnetic", "Bathroom")
COOKTOP = ("Cooktop", "PIR", "Kitchen")
FRIDGE = ("Fridge", "Magnetic", "Kitchen")
CUPBOARD = ("Cupboard", "Magnetic", "Kitchen")
TOASTER = ("Toaster", "Electric", "Kitchen")
MICROWAVE = ("Microwave", "Electric", "Kitchen")
SEAT = ("Seat", "Pressure", "Living")
MAINDOOR = ("Maindoor", "Magnetic", "Entrance")
# interior passage doors carry their own sensor type: they swing on every
# movement through the flat, unlike the entrance contact (Maindoor)
DOOR_KITCHEN = ("Door Kitchen", "Door", "Kitchen")
DOOR_BATHROOM = ("Door Bathroom", "Door", "Bathroom")
DOOR_BEDROOM = ("Door Bedroom", "Door", "Bedroom")
DOOR_LIVING = ("Door Living", "Door", "Living")
DOOR_HALL = ("Door Hall", "Door", "Hallway")

INTERIOR_DOORS = (DOOR_KITCHEN, DOOR_BATHROOM, DOOR_BEDROOM, DOOR_LIVING, DOOR_HALL)


# ---------------------------------------------------------------------------
# home A: clean mapping, 13 days
# ---------------------------------------------------------------------------

def emit_toileting(h: Home, span, flush_p=1.0) -> None:
    r = h.rng
    s, e = span
    h.pulses(BASIN, (s, e), r.randint(1, 2), (8, 40))
    if r.random() < flush_p:
        h.pulse(TOILET, e - r.uniform(10, 40), (4, 8), jitter_s=5)


def home_a(out_dir: Path) -> None:
    h = Home(seed=118_2011, base_day=date(2011, 11, 28), n_days=13)
    r = h.rng

    for day in range(13):
        d0 = day * DAY_S
        wake = d0 + m(7, 15) + r.uniform(-20, 25) * 60

        # sleeping from midnight (or last night's bedtime) to wake,
        # with night toilet breaks carved out
        night_start = d0 if day == 0 else h._bedtime
        breaks = []
        for _ in range(r.randint(0, 2)):
            bs = r.uniform(night_start + 3600, wake - 3600)
            breaks.append((bs, bs + r.uniform(180, 360)))
        breaks.sort()
        merged = []
        for b in breaks:
            if merged and b[0] < merged[-1][1] + 600:
                continue
            merged.append(b)
        cursor = night_start
        for bs, be in merged:
            h.annotate("Sleeping", cursor, bs)
            h.covering(BED, (cursor + r.uniform(0, 120), bs), (0.9, 0.98), (1, 2))
            h.annotate("Toileting", bs, be)
            emit_toileting(h, (bs, be))
            cursor = be + r.uniform(10, 60)
        h.annotate("Sleeping", cursor, wake)
        h.covering(BED, (cursor + r.uniform(0, 90), wake - r.uniform(0, 90)), (0.92, 0.99), (1, 2))

        t = wake + r.uniform(30, 150)

        def block(activity, dur_min, emitter, gap=(40, 240)):
            nonlocal t
            s = t
            e = s + r.uniform(*dur_min) * 60
            h.annotate(activity, s, e)
            emitter((s, e))
            t = e + r.uniform(*gap)

        block("Toileting", (4, 8), lambda sp: emit_toileting(h, sp))
        block("Grooming", (6, 14), lambda sp: (
            h.pulses(BASIN, sp, r.randint(2, 4), (10, 45)),
            h.pulses(CABINET, sp, r.randint(1, 2), (4, 10)),
        ))
        if r.random() < 0.75:
            block("Showering", (7, 14), lambda sp: h.covering(SHOWER, sp, (0.72, 0.9), (1, 2)))
        block("Breakfast", (14, 24), lambda sp: (
            h.pulses(FRIDGE, sp, r.randint(1, 2), (6, 18)),
            h.covering(TOASTER, (sp[0] + 60, sp[0] + r.uniform(180, 300)), (0.8, 0.95), (1, 1)),
            h.pulses(CUPBOARD, sp, r.randint(1, 2), (4, 12)),
        ))
        block("Spare_Time/TV", (90, 170), lambda sp: h.covering(SEAT, sp, (0.6, 0.85), (1, 3)))
        if r.random() < 0.5:
            block("Toileting", (3, 6), lambda sp: emit_toileting(h, sp))
        block("Lunch", (28, 45), lambda sp: (
            h.covering(COOKTOP, (sp[0] + r.uniform(60, 240), sp[0] + r.uniform(900, 1500)), (0.7, 0.9), (1, 2)),
            h.pulses(FRIDGE, sp, r.randint(1, 3), (6, 18)),
            h.pulses(CUPBOARD, sp, r.randint(1, 2), (4, 12)),
            h.pulses(MICROWAVE, sp, 1, (60, 150)) if r.random() < 0.4 else None,
        ))
        if r.random() < 0.8:
            away = r.uniform(170, 250) * 60
            s = t
            h.annotate("Leaving", s, s + away)
            h.pulse(MAINDOOR, s + r.uniform(5, 25), (4, 10), jitter_s=5)
            h.pulse(MAINDOOR, s + away - r.uniform(5, 25), (4, 10), jitter_s=5)
            t = s + away + r.uniform(40, 240)
        else:
            block("Spare_Time/TV", (150, 240), lambda sp: h.covering(SEAT, sp, (0.6, 0.85), (1, 3)))
        block("Toileting", (3, 7), lambda sp: emit_toileting(h, sp))
        block("Spare_Time/TV", (60, 110), lambda sp: h.covering(SEAT, sp, (0.6, 0.85), (1, 3)))
        if r.random() < 0.7:
            block("Snack", (6, 12), lambda sp: (
                h.pulses(FRIDGE, sp, r.randint(1, 2), (6, 16)),
                h.pulses(CUPBOARD, sp, 1, (4, 10)) if r.random() < 0.3 else None,
            ))
        block("Spare_Time/TV", (55, 100), lambda sp: h.covering(SEAT, sp, (0.6, 0.85), (1, 3)))
        if r.random() < 0.6:
            block("Toileting", (3, 6), lambda sp: emit_toileting(h, sp))

        bedtime = min(t + r.uniform(60, 300), (day + 1) * DAY_S + m(0, 40))
        h._bedtime = bedtime
        if day == 12:
            h.annotate("Sleeping", bedtime, 13 * DAY_S - 40)
            h.covering(BED, (bedtime + r.uniform(0, 90), 13 * DAY_S - 60), (0.9, 0.98), (1, 1))

        # background noise: stray activations unrelated to the schedule
        for _ in range(r.randint(7, 12)):
            sensor = r.choice([BASIN, FRIDGE, SEAT, CUPBOARD, MAINDOOR, CABINET])
            start = d0 + r.uniform(m(7, 0), m(23, 0))
            h.event(sensor, start, start + r.uniform(3, 25))

    # a couple of raw-file artifacts: an overlapping duplicate row and one
    # corrupt timestamp, as in real exports
    if h.events:
        s, e, loc, typ, place = sorted(h.events)[100]
        h.events.append((s + 2, max(s + 4, e - 2), loc, typ, place))
    home_dir = out_dir
    h.write(home_dir, "home_a", corrupt_sensor_rows=[57])


# ---------------------------------------------------------------------------
# home B: door-transition noise + ambiguous meals, 21 days
# ---------------------------------------------------------------------------

ROOM_OF = {
    "Sleeping": "Bedroom",
    "Toileting": "Bathroom",
    "Showering": "Bathroom",
    "Grooming": "Bathroom",
    "Breakfast": "Kitchen",
    "Lunch": "Kitchen",
    "Dinner": "Kitchen",
    "Snack": "Kitchen",
    "Spare_Time/TV": "Living",
    "Leaving": "Entrance",
}

DOOR_OF_ROOM = {
    "Bedroom": DOOR_BEDROOM,
    "Bathroom": DOOR_BATHROOM,
    "Kitchen": DOOR_KITCHEN,
}


def home_b(out_dir: Path) -> None:
    h = Home(seed=2012_1112, base_day=date(2012, 11, 12), n_days=21)
    r = h.rng

    def meal_emitter(sp):
        # breakfast/lunch/dinner/snack all look like fridge+cupboard
        # (+cooktop for hot meals) -- no clock in the representation
        h.pulses(FRIDGE, sp, r.randint(2, 4), (6, 18))
        h.pulses(CUPBOARD, sp, r.randint(1, 3), (4, 12))

    def hot_meal_emitter(sp):
        meal_emitter(sp)
        if sp[1] - sp[0] > 600 and r.random() < 0.8:
            h.covering(COOKTOP, (sp[0] + r.uniform(60, 200), sp[1] - r.uniform(60, 200)),
                       (0.5, 0.8), (1, 2))
        if r.random() < 0.3:
            h.pulses(MICROWAVE, sp, 1, (60, 150))

    def grooming_emitter(sp):
        h.pulses(BASIN, sp, r.randint(1, 3), (10, 45))
        if r.random() < 0.6:
            h.pulses(CABINET, sp, r.randint(1, 2), (4, 10))

    transitions: list[float] = []

    for day in range(21):
        d0 = day * DAY_S
        wake = d0 + m(7, 40) + r.uniform(-30, 30) * 60
        day_blocks: list[tuple[str, float, float]] = []

        night_start = d0 if day == 0 else h._bedtime
        breaks = []
        for _ in range(r.randint(0, 2)):
            bs = r.uniform(night_start + 3600, wake - 3600)
            breaks.append((bs, bs + r.uniform(180, 420)))
        breaks.sort()
        merged = []
        for b in breaks:
            if merged and b[0] < merged[-1][1] + 600:
                continue
            merged.append(b)
        cursor = night_start
        for bs, be in merged:
            h.annotate("Sleeping", cursor, bs)
            h.covering(BED, (cursor + r.uniform(0, 120), bs), (0.9, 0.98), (1, 2))
            h.annotate("Toileting", bs, be)
            emit_toileting(h, (bs, be), flush_p=0.5)
            transitions.extend([bs, be])
            cursor = be + r.uniform(10, 60)
        h.annotate("Sleeping", cursor, wake)
        h.covering(BED, (cursor + r.uniform(0, 90), wake - r.uniform(0, 90)), (0.92, 0.99), (1, 2))

        t = wake + r.uniform(60, 300)

        def block(activity, dur_min, emitter, gap=(45, 300)):
            nonlocal t
            s = t
            e = s + r.uniform(*dur_min) * 60
            transitions.append(s)
            h.annotate(activity, s, e)
            emitter((s, e))
            day_blocks.append((activity, s, e))
            t = e + r.uniform(*gap)

        block("Toileting", (3, 8), lambda sp: emit_toileting(h, sp, flush_p=0.5))
        block("Grooming", (5, 12), grooming_emitter)
        if r.random() < 0.6:
            block("Showering", (6, 13), lambda sp: h.covering(SHOWER, sp, (0.6, 0.88), (1, 2)))
        block("Breakfast", (12, 22), meal_emitter)
        block("Spare_Time/TV", (80, 160), lambda sp: h.covering(SEAT, sp, (0.5, 0.8), (1, 3)))
        if r.random() < 0.5:
            block("Toileting", (3, 6), lambda sp: emit_toileting(h, sp, flush_p=0.5))
        block("Lunch", (25, 45), hot_meal_emitter)
        if r.random() < 0.7:
            away = r.uniform(140, 240) * 60
            s = t
            transitions.append(s)
            h.annotate("Leaving", s, s + away)
            h.pulse(MAINDOOR, s + r.uniform(5, 25), (4, 10), jitter_s=5)
            h.pulse(MAINDOOR, s + away - r.uniform(5, 25), (4, 10), jitter_s=5)
            day_blocks.append(("Leaving", s, s + away))
            t = s + away + r.uniform(60, 300)
        else:
            block("Spare_Time/TV", (100, 200), lambda sp: h.covering(SEAT, sp, (0.5, 0.8), (1, 3)))
        if r.random() < 0.35:
            block("Snack", (4, 8), meal_emitter)
        block("Spare_Time/TV", (50, 110), lambda sp: h.covering(SEAT, sp, (0.5, 0.8), (1, 3)))
        block("Dinner", (14, 28), hot_meal_emitter if r.random() < 0.5 else meal_emitter)
        block("Spare_Time/TV", (60, 120), lambda sp: h.covering(SEAT, sp, (0.5, 0.8), (1, 3)))
        if r.random() < 0.6:
            block("Toileting", (3, 6), lambda sp: emit_toileting(h, sp, flush_p=0.5))

        bedtime = min(t + r.uniform(60, 300), (day + 1) * DAY_S + m(0, 40))
        transitions.append(bedtime)
        h._bedtime = bedtime
        if day == 20:
            h.annotate("Sleeping", bedtime, 21 * DAY_S - 40)
            h.covering(BED, (bedtime + r.uniform(0, 90), 21 * DAY_S - 60), (0.9, 0.98), (1, 1))

        # doors swing open and shut while the resident is around; which
        # door stands open during which block varies day to day, so the
        # door state carries no stable activity (or clock) information
        daytime = [b for b in day_blocks if b[0] != "Leaving"]
        for door in INTERIOR_DOORS:
            for _ in range(r.randint(5, 9)):
                if not daytime or r.random() > 0.85:
                    continue
                act, bs, be = daytime[r.randrange(len(daytime))]
                start = r.uniform(bs - 120, max(bs, be - 60))
                h.event(door, start, start + r.uniform(8, 45) * 60)

        # stray activations, only while someone is home
        away_spans = [(s, e) for act, s, e in day_blocks if act == "Leaving"]
        for _ in range(r.randint(2, 6)):
            sensor = r.choice([BASIN, FRIDGE, SEAT, CUPBOARD])
            start = d0 + r.uniform(m(7, 0), m(23, 0))
            if any(s <= start < e for s, e in away_spans):
                continue
            h.event(sensor, start, start + r.uniform(3, 25))

    # occasional door swings when passing through the flat; not tied to
    # any particular room change
    for when in transitions:
        if r.random() < 0.5:
            h.pulse(r.choice(INTERIOR_DOORS), when + r.uniform(-30, 90), (3, 10), jitter_s=10)

    if h.events:
        s, e, loc, typ, place = sorted(h.events)[200]
        h.events.append((s + 1, max(s + 3, e - 1), loc, typ, place))
    h.write(out_dir, "home_b", corrupt_sensor_rows=[123, 1004])


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/raw")
    home_a(out)
    home_b(out)
    print(f"wrote demo homes to {out}")


if __name__ == "__main__":
    main()
