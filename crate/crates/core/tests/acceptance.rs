//! Acceptance suite: one PASS/FAIL line per criterion, every tolerance
//! pinned below. Runs without the test harness so the lines always print:
//!
//! ```text
//! cargo test -p hovernav-core --test acceptance
//! ```

mod common;

use std::time::{Duration, Instant};

use hovernav::agents::{AgentConfig, AgentKind};
use hovernav::geometry::{
    screen_to_map, zoom_about_pivot_unclamped, DisplayConfig, MapConfig, MapPoint, ScreenPoint, Stage, ViewportState,
};
use hovernav::log::SessionLog;
use hovernav::service::{analyze, replay, simulate, write_csv};
use hovernav::task::{compute_metrics, generate_trial_plan, DistanceClass, Session, TaskParams, TrialEvent};
use hovernav::techniques::{
    make_technique, AbsoluteParams, InputSample, RateParams, TechniqueKind, TechniqueParams, TechniqueState, Touch,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fuzz_session, header, map};

const RATIO_TOL: f64 = 0.005;
const DISTANCE_TOL: f64 = 0.005;
const PLAN_SEEDS: u64 = 1000;
const ANCHOR_TOL: f64 = 1e-12;
const MONOTONE_SAMPLES: usize = 10_000;
const ANCHOR_BUDGET: Duration = Duration::from_secs(1);
const PIVOT_STEPS: usize = 10_000;
const PIVOT_TOL: f64 = 1e-9;
const GATING_CASES: usize = 10_000;
const FUZZ_SESSIONS: u64 = 60;
const FUZZ_TICKS: usize = 4000;
const SCALE_GATE: f64 = 1.0 - 1e-6;
const REPLAY_SEEDS: u64 = 5;
const DIRECTION_SEEDS: u64 = 20;
const SUITE_BUDGET: Duration = Duration::from_secs(60);
const ZOOM_OUT_TICKS: u64 = 141;
const ZOOM_OUT_SLACK: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn stage(name: &str) -> Stage {
    Stage::new(map(name), DisplayConfig::default()).unwrap()
}

fn scale_ratio() -> Outcome {
    let display = DisplayConfig::default();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, reported) in [("small", 13.8), ("large", 1380.0)] {
        let ratio = 1.0 / stage(name).min_scale();
        let rel = (ratio - reported).abs() / reported;
        // the ratio is the display width against the map width
        let direct = map(name).width / display.width;
        worst = worst.max(rel).max(((direct - ratio) / ratio).abs());
        parts.push(format!("{name} 1:{ratio:.2} ({:.3}%)", rel * 100.0));
    }
    outcome(worst <= RATIO_TOL, format!("{} tol {}%", parts.join(", "), RATIO_TOL * 100.0))
}

fn distance_classes() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut realized: f64 = 0.0;
    let mut bad_plans = 0;
    for (name, expected) in [("small", [0.2, 0.4, 0.8]), ("large", [20.0, 40.0, 80.0])] {
        let map = map(name);
        for (class, want) in DistanceClass::ALL.into_iter().zip(expected) {
            worst = worst.max((class.distance(&map) - want).abs() / want);
        }
        for seed in 0..PLAN_SEEDS {
            let plan = generate_trial_plan(&map, seed).unwrap();
            if plan.class_counts() != [5, 5, 5] {
                bad_plans += 1;
            }
            for (i, t) in plan.targets.iter().enumerate() {
                let want = expected[t.distance_class as usize];
                let got = plan.origin_of(i).distance(t.position);
                realized = realized.max((got - want).abs() / want);
            }
        }
    }
    outcome(
        worst <= DISTANCE_TOL && realized <= DISTANCE_TOL && bad_plans == 0,
        format!(
            "class distance error {:.3}%, realized {:.3}%, tol {}%; plans off 5/5/5: {bad_plans} of {}",
            worst * 100.0,
            realized * 100.0,
            DISTANCE_TOL * 100.0,
            2 * PLAN_SEEDS
        ),
    )
}

fn rate_anchors() -> Outcome {
    let started = Instant::now();
    let params = RateParams::default();
    let stage = stage("large");
    let stepper = make_technique(TechniqueKind::Rate3d, &TechniqueParams::default(), 60.0).unwrap();
    let from = ViewportState::new(MapPoint::ORIGIN, 0.5);
    // measured through the stepper: scale ratio over one tick, centered finger
    let measured = |h: f64| stepper.step(&stage, &TechniqueState::new(from), &InputSample::hover(0.0, 0.0, h)).viewport.scale / 0.5;
    let anchors = [(params.h_max, 0.95), (params.h_min, 1.05)];
    let mut ok = anchors.iter().all(|&(h, want)| (measured(h) - want).abs() <= ANCHOR_TOL);
    ok &= measured(params.h_mid()) == 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hs: Vec<f64> = (0..MONOTONE_SAMPLES).map(|_| rng.random_range(params.h_min..=params.h_max)).collect();
    hs.sort_by(f64::total_cmp);
    let m: Vec<f64> = hs.iter().map(|&h| measured(h)).collect();
    let monotone = m.windows(2).all(|w| w[1] <= w[0]);
    let elapsed = started.elapsed();
    outcome(
        ok && monotone && elapsed < ANCHOR_BUDGET,
        format!(
            "h_max {:.15}, h_min {:.15}, h_mid {}, monotone over {MONOTONE_SAMPLES}: {monotone}, {:.0} ms (budget {} ms)",
            measured(params.h_max),
            measured(params.h_min),
            measured(params.h_mid()),
            elapsed.as_secs_f64() * 1e3,
            ANCHOR_BUDGET.as_millis()
        ),
    )
}

fn pivot_invariance() -> Outcome {
    // roomy map so no center clamp engages; planar motion off to isolate zoom
    let stage = Stage::new(MapConfig::new("roomy", 4000.0, 2000.0).unwrap(), DisplayConfig::default()).unwrap();
    let params = TechniqueParams {
        rate3d: RateParams { plane_base_speed: 0.0, ..RateParams::default() },
        absolute3d: AbsoluteParams { plane_base_speed: 0.0, ..AbsoluteParams::default() },
        ..TechniqueParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for kind in [TechniqueKind::Rate3d, TechniqueKind::Absolute3d] {
        let stepper = make_technique(kind, &params, 60.0).unwrap();
        let mut steps = 0;
        while steps < PIVOT_STEPS {
            let v = ViewportState::new(
                MapPoint::new(rng.random_range(-500.0..500.0), rng.random_range(-250.0..250.0)),
                rng.random_range(0.01..=1.0),
            );
            let finger = ScreenPoint::new(rng.random_range(-0.0525..=0.0525), rng.random_range(-0.03..=0.03));
            let input = InputSample::hover(finger.x, finger.y, rng.random_range(0.0..=0.05));
            let next = stepper.step(&stage, &TechniqueState::new(v), &input);
            let pivot = next.cursor_disc;
            // only steps where the center clamp stayed out of the way count
            if !next.viewport.bits_eq(&zoom_about_pivot_unclamped(&v, pivot, next.viewport.scale)) {
                skipped += 1;
                continue;
            }
            steps += 1;
            worst = worst.max(screen_to_map(pivot, &v).distance(screen_to_map(pivot, &next.viewport)));
        }
    }
    outcome(
        worst < PIVOT_TOL,
        format!(
            "{} unclamped steps ({PIVOT_STEPS} per technique), max drift {worst:.2e} m (tol {PIVOT_TOL:e}), clamped draws skipped {skipped}",
            2 * PIVOT_STEPS
        ),
    )
}

fn touch_gating() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut moved = 0;
    for kind in [TechniqueKind::Rate3d, TechniqueKind::Absolute3d] {
        let stepper = make_technique(kind, &TechniqueParams::default(), 60.0).unwrap();
        for i in 0..GATING_CASES {
            let stage = stage(if i % 2 == 0 { "small" } else { "large" });
            let s_min = stage.min_scale();
            let v = stage.clamp_viewport(&ViewportState::new(
                MapPoint::new(rng.random_range(-1.0..1.0) * stage.map.width, rng.random_range(-1.0..1.0) * stage.map.height),
                rng.random_range(s_min..=1.0),
            ));
            let mut state = TechniqueState::new(v);
            state.cursor_disc = ScreenPoint::new(rng.random_range(-0.05..0.05), rng.random_range(-0.03..0.03));
            let touches = (0..rng.random_range(1..=3))
                .map(|id| Touch { id, x: rng.random_range(-0.0525..=0.0525), y: rng.random_range(-0.03..=0.03) })
                .collect();
            let input = InputSample {
                touches,
                ..InputSample::hover(rng.random_range(-0.06..0.06), rng.random_range(-0.04..0.04), rng.random_range(0.0..0.1))
            };
            if !stepper.step(&stage, &state, &input).viewport.bits_eq(&v) {
                moved += 1;
            }
        }
    }
    outcome(moved == 0, format!("{} touching inputs, viewport changed {moved} times", 2 * GATING_CASES))
}

fn task_gates() -> Outcome {
    let mut selections = 0;
    let mut violations = 0;
    for seed in 0..FUZZ_SESSIONS {
        let kind = TechniqueKind::ALL[(seed % 3) as usize];
        let name = if seed % 2 == 0 { "small" } else { "large" };
        let header = header(kind, name, seed);
        let stage = header.stage().unwrap();
        let (_, records) = fuzz_session(&header, seed ^ 0x5eed, FUZZ_TICKS);
        for r in &records {
            for e in &r.events {
                if let TrialEvent::Selected { target } = e {
                    selections += 1;
                    let p = header.plan.targets[*target].position;
                    if r.viewport.scale < SCALE_GATE || !stage.on_screen(p, &r.viewport) {
                        violations += 1;
                    }
                }
            }
        }
    }

    // dwell timing: hold on a visible target and count ticks to selection
    let mut dwell_errors = Vec::new();
    for rate in [60.0, 90.0, 120.0, 144.0] {
        let stage = stage("small");
        let mut plan = generate_trial_plan(&stage.map, 1).unwrap();
        plan.targets.truncate(1);
        plan.targets[0].position = MapPoint::new(0.01, 0.0);
        let technique = make_technique(TechniqueKind::Rate3d, &TechniqueParams::default(), rate).unwrap();
        let mut session = Session::new(stage, technique, plan, TaskParams::default(), rate).unwrap();
        let touch = InputSample {
            touches: vec![Touch { id: 1, x: 0.01, y: 0.0 }],
            ..InputSample::hover(0.01, 0.0, 0.0)
        };
        let down = session.ticks();
        let held = loop {
            let r = session.advance(&touch).unwrap();
            if !r.events.is_empty() {
                break (r.tick + 1 - down) as f64 / rate;
            }
        };
        dwell_errors.push((rate, held - 1.0));
    }
    let dwell_ok = dwell_errors.iter().all(|&(rate, err)| err.abs() <= 1.0 / rate + 1e-12);
    outcome(
        selections > 0 && violations == 0 && dwell_ok,
        format!(
            "{FUZZ_SESSIONS} fuzzed sessions, {selections} selections, {violations} below {SCALE_GATE} or off-screen; dwell error {}",
            dwell_errors.iter().map(|(r, e)| format!("{r} Hz {:+.4} s", e)).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn csv_bytes(logs: &[SessionLog]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&analyze(logs).unwrap(), &mut out).unwrap();
    out
}

fn determinism() -> Outcome {
    let mut originals = Vec::new();
    let mut replayed = Vec::new();
    let mut mismatched = 0;
    for (kind, agent) in [(TechniqueKind::Rate3d, AgentKind::Greedy3d), (TechniqueKind::Baseline2d, AgentKind::Greedy2d)] {
        for name in ["small", "large"] {
            for seed in 0..REPLAY_SEEDS {
                let log = simulate(header(kind, name, seed), &AgentConfig::new(agent, seed), hovernav::agents::WATCHDOG_S).unwrap();
                let bytes = log.to_bytes().unwrap();
                let parsed = SessionLog::read(bytes.as_slice()).unwrap();
                let report = replay(&parsed).unwrap();
                let rebuilt = SessionLog {
                    header: parsed.header.clone(),
                    records: report.records,
                    footer: parsed.footer.clone(),
                    truncated: false,
                };
                if report.divergence.is_some() || rebuilt.to_bytes().unwrap() != bytes {
                    mismatched += 1;
                }
                originals.push(log);
                replayed.push(rebuilt);
            }
        }
    }
    let same_csv = csv_bytes(&originals) == csv_bytes(&replayed);
    outcome(
        mismatched == 0 && same_csv && originals.len() == 20,
        format!("{} runs, {mismatched} not bit-identical after replay, CSV identical: {same_csv}", originals.len()),
    )
}

fn direction(suite_started: Instant) -> Outcome {
    let mut losses = Vec::new();
    let mut spread = (f64::INFINITY, 0.0f64);
    for seed in 0..DIRECTION_SEEDS {
        let mean = |agent: AgentKind| {
            let log = simulate(header(agent.technique(), "large", seed), &AgentConfig::new(agent, seed), hovernav::agents::WATCHDOG_S).unwrap();
            compute_metrics(&log).unwrap().overall.mean_s
        };
        let (g3, g2) = (mean(AgentKind::Greedy3d), mean(AgentKind::Greedy2d));
        spread = (spread.0.min(g2 - g3), spread.1.max(g2 - g3));
        if g3 >= g2 {
            losses.push(seed);
        }
    }
    let elapsed = suite_started.elapsed();
    outcome(
        losses.is_empty() && elapsed < SUITE_BUDGET,
        format!(
            "{DIRECTION_SEEDS} seeds, greedy2d - greedy3d mean in [{:.2}, {:.2}] s, seeds lost {losses:?}; suite {:.1} s (budget {} s)",
            spread.0,
            spread.1,
            elapsed.as_secs_f64(),
            SUITE_BUDGET.as_secs()
        ),
    )
}

fn zoom_out_ticks() -> Outcome {
    let stage = stage("large");
    let params = RateParams::default();
    let stepper = make_technique(TechniqueKind::Rate3d, &TechniqueParams::default(), 60.0).unwrap();
    let mut state = TechniqueState::initial(&stage);
    let input = InputSample::hover(0.0, 0.0, params.h_max);
    let mut ticks: u64 = 0;
    while state.viewport.scale > stage.min_scale() && ticks < 10_000 {
        state = stepper.step(&stage, &state, &input);
        ticks += 1;
    }
    // oracle: brute-force powers of the h_max multiplier
    let mut oracle = 0;
    let mut s = 1.0f64;
    while s > stage.min_scale() {
        s *= 1.0 - params.zoom_base_speed;
        oracle += 1;
    }
    outcome(
        ticks.abs_diff(ZOOM_OUT_TICKS) <= ZOOM_OUT_SLACK && oracle == ticks,
        format!("{ticks} ticks (oracle {oracle}, expected {ZOOM_OUT_TICKS} +/- {ZOOM_OUT_SLACK})"),
    )
}

fn main() {
    let started = Instant::now();
    let criteria: [(&str, &dyn Fn() -> Outcome); 9] = [
        ("scale ratio", &scale_ratio),
        ("distance classes", &distance_classes),
        ("rate anchors", &rate_anchors),
        ("pivot invariance", &pivot_invariance),
        ("touch gating", &touch_gating),
        ("task-rule gates", &task_gates),
        ("determinism and replay", &determinism),
        ("zoom-out timing", &zoom_out_ticks),
        ("agent direction", &|| direction(started)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("{} of 9 criteria passed in {:.1} s", 9 - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
