//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N PASS` line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Tolerances are pinned in the assertions.

use std::path::PathBuf;
use std::time::Instant;

use assert_cmd::Command;

use problife::exact::{evolve_distribution, exact_marginals, initial_distribution};
use problife::grid::{BoundaryPolicy, GridState};
use problife::meanfield;
use problife::rules::Ruleset;
use problife::sampler::{self, TrajectoryRng};

const STANDARD_RULES: &str = "B3:0.8/S2:0.9,3:0.9";

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../patterns")
        .join(name)
}

fn load(name: &str) -> GridState {
    GridState::parse_pattern(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn standard_rules() -> Ruleset {
    STANDARD_RULES.parse().unwrap()
}

fn problife_cmd() -> Command {
    let mut cmd = Command::cargo_bin("problife").unwrap();
    cmd.env_remove("PROBLIFE_CELL_LIMIT");
    cmd
}

/// Two-decimal display rounding, matching the engine's text output.
fn shown2(v: f64) -> String {
    format!("{v:.2}")
}

#[test]
fn criterion_1_fig2_meanfield_reproduction() {
    let started = Instant::now();
    let states = meanfield::run(&load("fig2.cells"), &standard_rules(), 2, BoundaryPolicy::Dead);

    // Generation 1: births exactly 0.8, survivals exactly 0.9, zero elsewhere.
    let gen1_expected = [
        ((2usize, 2usize), 0.8f64),
        ((2, 3), 0.8),
        ((3, 3), 0.9),
        ((2, 4), 0.9),
        ((3, 4), 0.9),
    ];
    for ((x, y), value) in gen1_expected {
        assert_eq!(states[1].value(x, y), value, "generation 1 cell ({x},{y})");
    }
    assert_eq!(states[1].alive_cells(0.0).len(), 5);

    // Generation 2 at display precision (two decimals, round-half-even).
    let gen2_expected = [
        ((2usize, 2usize), "0.52"),
        ((3, 2), "0.46"),
        ((1, 3), "0.46"),
        ((2, 3), "0.35"),
        ((3, 3), "0.41"),
        ((2, 4), "0.82"),
        ((3, 4), "0.82"),
    ];
    for ((x, y), shown) in gen2_expected {
        assert_eq!(shown2(states[2].value(x, y)), shown, "generation 2 cell ({x},{y})");
    }
    // The displayed 0.82 cells compute to 0.82458 before rounding.
    assert!((states[2].value(2, 4) - 0.82458).abs() < 1e-12);
    assert!((states[2].value(3, 4) - 0.82458).abs() < 1e-12);
    // All other cells stay exactly dead.
    let live: Vec<(usize, usize)> = states[2].alive_cells(0.0);
    assert_eq!(live.len(), 7);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 1 PASS: fig2 generations 1-2 match at display precision ({elapsed:?} < 1s)"
    );
}

/// Straightforward B3/S23 stepper, independent of the engine code paths.
fn classic_oracle_step(cells: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let height = cells.len();
    let width = cells[0].len();
    let mut next = vec![vec![false; width]; height];
    for y in 0..height {
        for x in 0..width {
            let mut n = 0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx >= 0
                        && ny >= 0
                        && nx < width as i64
                        && ny < height as i64
                        && cells[ny as usize][nx as usize]
                    {
                        n += 1;
                    }
                }
            }
            next[y][x] = if cells[y][x] { n == 2 || n == 3 } else { n == 3 };
        }
    }
    next
}

#[test]
fn criterion_2_fig1_classic_recovery() {
    let rules = Ruleset::classic_life();
    let states = meanfield::run(&load("fig1.cells"), &rules, 2, BoundaryPolicy::Dead);
    let state2 = GridState::parse_pattern(".....\n.....\n..O..\n..OO.\n..OO.\n").unwrap();
    let state3 = GridState::parse_pattern(".....\n.....\n..OO.\n.O...\n..OO.\n").unwrap();
    assert_eq!(states[1].values(), state2.values());
    assert_eq!(states[2].values(), state3.values());

    let mut rng = TrajectoryRng::new(2, 0);
    for case in 0..1000 {
        let cells: Vec<Vec<bool>> = (0..8)
            .map(|_| (0..8).map(|_| rng.next_u64() & 1 == 1).collect())
            .collect();
        let values: Vec<f64> = cells
            .iter()
            .flat_map(|row| row.iter().map(|&b| if b { 1.0 } else { 0.0 }))
            .collect();
        let grid = GridState::new(8, 8, values).unwrap();
        let stepped = meanfield::step(&grid, &rules, BoundaryPolicy::Dead);
        let expected = classic_oracle_step(&cells);
        for (y, row) in expected.iter().enumerate() {
            for (x, &alive) in row.iter().enumerate() {
                let want = if alive { 1.0 } else { 0.0 };
                assert_eq!(stepped.value(x, y), want, "case {case} cell ({x},{y})");
            }
        }
    }
    println!("criterion 2 PASS: fig1 sequence exact; 1000 random 8x8 grids match the binary oracle");
}

#[test]
fn criterion_3_poisson_binomial_oracle() {
    let mut rng = TrajectoryRng::new(3, 0);
    for case in 0..1000 {
        let mut probs = [0.0f64; 8];
        for slot in &mut probs {
            *slot = match rng.next_u64() % 8 {
                0 => 0.0,
                1 => 1.0,
                _ => rng.next_unit(),
            };
        }

        // Brute-force enumeration over all 2^8 neighbour subsets.
        let mut oracle = [0.0f64; 9];
        for mask in 0u32..256 {
            let mut p = 1.0;
            let mut count = 0usize;
            for (i, &pi) in probs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    p *= pi;
                    count += 1;
                } else {
                    p *= 1.0 - pi;
                }
            }
            oracle[count] += p;
        }

        // Centre cell of a 3x3 grid sees exactly these eight marginals.
        let values = vec![
            probs[0], probs[1], probs[2], probs[3], 0.0, probs[4], probs[5], probs[6], probs[7],
        ];
        let grid = GridState::new(3, 3, values).unwrap();
        let pmf = meanfield::neighbor_pmf(&grid, 1, 1, BoundaryPolicy::Dead).unwrap();
        let mut total = 0.0;
        for (n, &expected) in oracle.iter().enumerate() {
            assert!(
                (pmf.prob(n) - expected).abs() < 1e-12,
                "case {case} count {n}: dp {} vs oracle {expected}",
                pmf.prob(n),
            );
            total += pmf.prob(n);
        }
        assert!((total - 1.0).abs() < 1e-9, "case {case}: sum {total}");
    }
    println!("criterion 3 PASS: DP convolution matches 2^8 enumeration within 1e-12 on 1000 vectors");
}

fn random_ruleset(rng: &mut TrajectoryRng) -> Ruleset {
    let mut birth = [0.0; 9];
    let mut survive = [0.0; 9];
    for n in 0..9 {
        birth[n] = match rng.next_u64() % 4 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.next_unit(),
        };
        survive[n] = match rng.next_u64() % 4 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.next_unit(),
        };
    }
    Ruleset::new(birth, survive).unwrap()
}

#[test]
fn criterion_4_engine_agreement_and_divergence() {
    let started = Instant::now();
    let mut rng = TrajectoryRng::new(4, 0);
    for case in 0..50 {
        let (w, h) = if case % 2 == 0 { (3, 3) } else { (3, 4) };
        let values: Vec<f64> = (0..w * h)
            .map(|_| if rng.next_u64() & 1 == 1 { 1.0 } else { 0.0 })
            .collect();
        let start = GridState::new(w, h, values).unwrap();
        let rules = random_ruleset(&mut rng);

        let mf = meanfield::run(&start, &rules, 2, BoundaryPolicy::Dead);
        let mut dist = initial_distribution(&start);
        for g in 1..=2u64 {
            dist = evolve_distribution(&dist, &rules, BoundaryPolicy::Dead, 12).unwrap();
            let exact = exact_marginals(&dist, g);
            let diff = mf[g as usize].max_abs_diff(&exact).unwrap();
            assert!(diff <= 1e-12, "case {case} generation {g}: diff {diff}");
        }
    }

    // Crafted instance: the 3x3 vertical blinker's generation-2 cells are
    // correlated, so mean-field visibly diverges from exact at generation 3.
    // The compare report is produced through the CLI and only reported.
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("blinker.cells");
    std::fs::write(&pattern, ".O.\n.O.\n.O.\n").unwrap();
    let assert = problife_cmd()
        .args([
            "compare",
            "--rules",
            STANDARD_RULES,
            "--pattern",
            pattern.to_str().unwrap(),
            "--steps",
            "3",
            "--precision",
            "9",
        ])
        .assert()
        .success();
    let report = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    let gen3_max: f64 = report
        .lines()
        .find(|l| l.starts_with("3,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(gen3_max > 1e-6, "expected reported divergence, got {gen3_max}");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 4 PASS: 50 random instances agree at generations 1-2 within 1e-12; \
         crafted generation-3 divergence {gen3_max:.3e} reported ({elapsed:?} < 30s)"
    );
}

#[test]
fn criterion_5_sampler_consistency() {
    // Fixed instance: 3x3 vertical blinker, standard rules, 3 generations,
    // 100000 trajectories, seed 0. The pinned seed makes the run fully
    // deterministic, so the suite-level flake probability is 0 by
    // construction; the instance was chosen so every exact marginal is
    // either comfortably interior or structurally zero.
    let start = GridState::parse_pattern(".O.\n.O.\n.O.\n").unwrap();
    let rules = standard_rules();

    let mut dist = initial_distribution(&start);
    for _ in 0..3 {
        dist = evolve_distribution(&dist, &rules, BoundaryPolicy::Dead, 12).unwrap();
    }
    let exact = exact_marginals(&dist, 3);

    let est = sampler::estimate_marginals(&start, &rules, 3, 100_000, BoundaryPolicy::Dead, 0);
    for (c, (&mean, &truth)) in est.means.values().iter().zip(exact.values()).enumerate() {
        let stderr = est.stderr.values()[c];
        assert!(
            (mean - truth).abs() <= 4.0 * stderr,
            "cell {c}: estimate {mean} vs exact {truth} (stderr {stderr})"
        );
    }

    let rerun = sampler::estimate_marginals(&start, &rules, 3, 100_000, BoundaryPolicy::Dead, 0);
    assert_eq!(est, rerun, "same seed must reproduce byte-identical estimates");

    println!(
        "criterion 5 PASS: 100000-trajectory estimates within 4*stderr of exact marginals; \
         rerun with seed 0 is byte-identical (deterministic, flake probability 0)"
    );
}

#[test]
fn criterion_6_strobing_behavior() {
    let rules: Ruleset = "B0:0.8/S".parse().unwrap();
    let zero = GridState::filled(4, 4, 0.0).unwrap();

    // Mean-field: the point-mass neighbour PMF forces every cell to exactly
    // birth[0].
    let states = meanfield::run(&zero, &rules, 10, BoundaryPolicy::Dead);
    assert!(states[1].values().iter().all(|&v| v == 0.8));
    for pair in states.windows(2) {
        assert!(
            !(pair[0].is_extinct() && pair[1].is_extinct()),
            "two consecutive empty generations"
        );
    }

    // Exact: the marginal is a sum over 2^15 floating-point products, so it
    // carries accumulation round-off; the distribution's own mass contract
    // allows 1e-9 and the marginals land within 1e-12 of 0.8.
    let next = evolve_distribution(&initial_distribution(&zero), &rules, BoundaryPolicy::Dead, 16)
        .unwrap();
    let marginals = exact_marginals(&next, 1);
    for &v in marginals.values() {
        assert!((v - 0.8).abs() <= 1e-12, "exact marginal {v}");
    }

    // Sampler: per the 4-sigma mechanics, with a pinned seed.
    let est = sampler::estimate_marginals(&zero, &rules, 1, 100_000, BoundaryPolicy::Dead, 6);
    for (c, &mean) in est.means.values().iter().enumerate() {
        let stderr = est.stderr.values()[c];
        assert!((mean - 0.8).abs() <= 4.0 * stderr, "cell {c}: {mean}");
    }
    // A sampled trajectory never shows two consecutive empty generations.
    let trajectory = sampler::sample_trajectory(&zero, &rules, 10, BoundaryPolicy::Dead, 6, 0);
    for pair in trajectory.windows(2) {
        assert!(!(pair[0].is_extinct() && pair[1].is_extinct()));
    }

    println!(
        "criterion 6 PASS: empty 4x4 refills at birth[0]=0.8 (mean-field exact, \
         exact engine within 1e-12, sampler within 4*stderr); no consecutive empty generations over 10 steps"
    );
}

#[test]
fn criterion_7_range_invariant() {
    let mut rng = TrajectoryRng::new(7, 0);
    for case in 0..10_000 {
        let w = (rng.next_u64() % 5 + 1) as usize;
        let h = (rng.next_u64() % 5 + 1) as usize;
        let values: Vec<f64> = (0..w * h)
            .map(|_| match rng.next_u64() % 8 {
                0 => 0.0,
                1 => 1.0,
                _ => rng.next_unit(),
            })
            .collect();
        let grid = GridState::new(w, h, values).unwrap();
        let rules = random_ruleset(&mut rng);
        let boundary = if rng.next_u64() & 1 == 0 {
            BoundaryPolicy::Dead
        } else {
            BoundaryPolicy::Toroidal
        };
        let next = meanfield::step(&grid, &rules, boundary);
        for (c, &v) in next.values().iter().enumerate() {
            assert!(
                (0.0..=1.0).contains(&v),
                "case {case} cell {c}: value {v} escapes [0, 1]"
            );
        }
    }
    println!("criterion 7 PASS: 10000 randomized steps stay inside [0, 1]");
}

type SpotChecks = &'static [((usize, usize), f64)];

#[test]
fn criterion_8_fig3_to_fig5_pipeline() {
    // Generation-1 values, hand-derived Poisson-binomial products: every
    // birth fires at 0.8 (exactly three live neighbours in the binary
    // start), every survival at 0.9 (exactly two).
    let spot_checks: [(&str, SpotChecks); 3] = [
        (
            "fig3.cells",
            &[
                ((1, 2), 0.8),
                ((4, 2), 0.8),
                ((2, 3), 0.9),
                ((3, 3), 0.9),
                ((2, 4), 0.8),
                ((3, 4), 0.8),
            ],
        ),
        ("fig4.cells", &[((2, 1), 0.8), ((4, 1), 0.8), ((3, 2), 0.9)]),
        (
            "fig5.cells",
            &[
                ((2, 2), 0.8),
                ((3, 2), 0.9),
                ((4, 2), 0.8),
                ((2, 3), 0.8),
                ((3, 3), 0.8),
                ((1, 4), 0.8),
                ((2, 4), 0.9),
                ((3, 4), 0.8),
            ],
        ),
    ];
    let rules = standard_rules();
    for (name, expected) in spot_checks {
        let states = meanfield::run(&load(name), &rules, 2, BoundaryPolicy::Dead);
        let live = states[1].alive_cells(0.0);
        assert_eq!(live.len(), expected.len(), "{name}: unexpected live count");
        for &((x, y), value) in expected {
            assert_eq!(states[1].value(x, y), value, "{name} generation 1 ({x},{y})");
        }
    }

    // Deeper spot checks at generation 2 against hand-computed products.
    let fig3 = meanfield::run(&load("fig3.cells"), &rules, 2, BoundaryPolicy::Dead);
    for ((x, y), value) in [
        ((2usize, 2usize), 0.5184),
        ((1, 3), 0.4608),
        ((2, 3), 0.45424),
        ((2, 4), 0.79056),
    ] {
        assert!((fig3[2].value(x, y) - value).abs() < 1e-12, "fig3 gen2 ({x},{y})");
    }
    let fig5 = meanfield::run(&load("fig5.cells"), &rules, 2, BoundaryPolicy::Dead);
    for ((x, y), value) in [
        ((2usize, 2usize), 0.76032),
        ((3, 2), 0.48896),
        ((2, 3), 0.0515392),
        ((1, 3), 0.31744),
        ((3, 1), 0.4608),
    ] {
        assert!((fig5[2].value(x, y) - value).abs() < 1e-12, "fig5 gen2 ({x},{y})");
    }

    // Render three generations each and compare byte-for-byte with the
    // frozen goldens.
    let goldens = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/goldens");
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig3", "fig4", "fig5"] {
        let template = format!("{}/{name}-{{:03}}.ppm", dir.path().display());
        problife_cmd()
            .args([
                "render",
                "--rules",
                STANDARD_RULES,
                "--pattern",
                fixture(&format!("{name}.cells")).to_str().unwrap(),
                "--steps",
                "2",
                "--out",
                &template,
            ])
            .assert()
            .success();
        for g in 0..3 {
            let emitted = std::fs::read(dir.path().join(format!("{name}-{g:03}.ppm"))).unwrap();
            let golden = std::fs::read(goldens.join(format!("{name}-{g:03}.ppm"))).unwrap();
            assert_eq!(emitted, golden, "{name} generation {g} PPM differs from golden");
        }
    }
    println!(
        "criterion 8 PASS: fig3/fig4/fig5 generation-1 values match hand-derived products; \
         9 rendered PPMs are byte-identical to frozen goldens"
    );
}

#[test]
fn criterion_9_command_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let blinker = dir.path().join("blinker.cells");
    std::fs::write(&blinker, ".O.\n.O.\n.O.\n").unwrap();
    let fig2 = fixture("fig2.cells");

    let capture = |args: &[&str], threads: Option<&str>| {
        let mut cmd = problife_cmd();
        if let Some(t) = threads {
            cmd.env("RAYON_NUM_THREADS", t);
        }
        let assert = cmd.current_dir(dir.path()).args(args).assert().success();
        assert.get_output().stdout.clone()
    };

    let command_sets: Vec<Vec<&str>> = vec![
        vec![
            "run", "--rules", STANDARD_RULES, "--pattern", fig2.to_str().unwrap(), "--steps", "4",
        ],
        vec![
            "exact",
            "--rules",
            STANDARD_RULES,
            "--pattern",
            blinker.to_str().unwrap(),
            "--steps",
            "3",
        ],
        vec![
            "sample",
            "--rules",
            STANDARD_RULES,
            "--pattern",
            blinker.to_str().unwrap(),
            "--steps",
            "3",
            "--samples",
            "20000",
            "--seed",
            "9",
        ],
        vec![
            "sample",
            "--rules",
            STANDARD_RULES,
            "--pattern",
            fig2.to_str().unwrap(),
            "--steps",
            "5",
            "--seed",
            "11",
            "--trajectory",
            "--format",
            "pattern",
        ],
        vec![
            "compare",
            "--rules",
            STANDARD_RULES,
            "--pattern",
            blinker.to_str().unwrap(),
            "--steps",
            "3",
        ],
    ];
    for args in &command_sets {
        let first = capture(args, None);
        let second = capture(args, None);
        assert_eq!(first, second, "rerun of {args:?} differs");
        // Identical output at any parallelism level.
        let serial = capture(args, Some("1"));
        let parallel = capture(args, Some("8"));
        assert_eq!(serial, parallel, "thread count changes {args:?}");
    }

    // Rendering twice produces byte-identical files.
    let render_args = [
        "render",
        "--rules",
        STANDARD_RULES,
        "--pattern",
        fig2.to_str().unwrap(),
        "--steps",
        "2",
    ];
    let read_all = |d: &std::path::Path| -> Vec<Vec<u8>> {
        (0..3)
            .map(|g| std::fs::read(d.join(format!("gen{g:03}.ppm"))).unwrap())
            .collect()
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    problife_cmd()
        .current_dir(dir_a.path())
        .args(render_args)
        .assert()
        .success();
    problife_cmd()
        .current_dir(dir_b.path())
        .args(render_args)
        .assert()
        .success();
    assert_eq!(read_all(dir_a.path()), read_all(dir_b.path()));

    println!(
        "criterion 9 PASS: all five commands are byte-identical on rerun and across \
         RAYON_NUM_THREADS=1 vs 8"
    );
}
