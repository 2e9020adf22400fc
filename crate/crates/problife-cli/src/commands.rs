//! Subcommand implementations and output emission.
//!
//! Text output formats:
//!
//! - CSV: per generation, a `# generation <g> rules <notation>` comment
//!   header followed by one comma-separated line per grid row; a blank line
//!   separates generations.
//! - Pattern: the same headers and separation, with the grid module's
//!   pattern emission as the body (re-ingestable by `--pattern`).
//! - PPM: one binary image per generation, named by the `--out` template
//!   (default `gen{:03}.ppm`); emitted paths are printed one per line.
//!
//! All floating-point text uses the configured precision with Rust's
//! round-half-even formatting; nothing locale-dependent is emitted.

use std::fmt::Write as _;
use std::fs;

use problife::exact::{evolve_distribution, exact_marginals, initial_distribution, ExactError};
use problife::render::{render_sequence, RenderSpec};
use problife::{meanfield, sampler, GridState};

use crate::config::{CliError, EngineChoice, OutputFormat, Settings, DEFAULT_PPM_TEMPLATE};

pub fn cmd_run(settings: &Settings) -> Result<(), CliError> {
    let states = meanfield::run(
        &settings.start,
        &settings.rules,
        settings.steps,
        settings.boundary,
    );
    emit_states(&states, settings)
}

pub fn cmd_exact(settings: &Settings) -> Result<(), CliError> {
    let states = exact_trajectory(settings)?;
    emit_states(&states, settings)
}

pub fn cmd_sample(settings: &Settings) -> Result<(), CliError> {
    if settings.trajectory {
        let states = sampler::sample_trajectory(
            &settings.start,
            &settings.rules,
            settings.steps,
            settings.boundary,
            settings.seed,
            0,
        );
        return emit_states(&states, settings);
    }

    let estimate = sampler::estimate_marginals(
        &settings.start,
        &settings.rules,
        settings.steps,
        settings.samples,
        settings.boundary,
        settings.seed,
    );
    if settings.format == OutputFormat::Ppm {
        return emit_ppm(std::slice::from_ref(&estimate.means), settings);
    }
    let mut text = String::new();
    let extra = format!(
        "samples {} seed {} field means",
        estimate.samples, settings.seed
    );
    push_block(&mut text, &estimate.means, settings, &extra);
    text.push('\n');
    let extra = format!(
        "samples {} seed {} field stderr",
        estimate.samples, settings.seed
    );
    push_block(&mut text, &estimate.stderr, settings, &extra);
    write_text(&text, settings)
}

pub fn cmd_compare(settings: &Settings) -> Result<(), CliError> {
    let meanfield_states = meanfield::run(
        &settings.start,
        &settings.rules,
        settings.steps,
        settings.boundary,
    );
    let reference_states: Vec<GridState> = match settings.engine {
        EngineChoice::Exact => exact_trajectory(settings)?,
        EngineChoice::Sample => sampler::estimate_marginals_history(
            &settings.start,
            &settings.rules,
            settings.steps,
            settings.samples,
            settings.boundary,
            settings.seed,
        )
        .into_iter()
        .map(|estimate| estimate.means)
        .collect(),
        EngineChoice::Meanfield => meanfield_states.clone(),
    };

    let reference = settings.engine.name();
    let p = settings.precision;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# compare meanfield vs {reference} rules {}",
        settings.rules_text
    );
    let _ = writeln!(
        text,
        "generation,max_abs_diff,mean_abs_diff,meanfield_mass,{reference}_mass"
    );
    for (mf, re) in meanfield_states.iter().zip(&reference_states) {
        let max = mf
            .max_abs_diff(re)
            .expect("engines produce same-sized grids");
        let mean: f64 = mf
            .values()
            .iter()
            .zip(re.values())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / mf.cells() as f64;
        let _ = writeln!(
            text,
            "{},{max:.p$},{mean:.p$},{:.p$},{:.p$}",
            mf.generation(),
            mf.total_mass(),
            re.total_mass(),
        );
    }
    write_text(&text, settings)
}

pub fn cmd_render(settings: &Settings) -> Result<(), CliError> {
    let states = match settings.engine {
        EngineChoice::Meanfield => meanfield::run(
            &settings.start,
            &settings.rules,
            settings.steps,
            settings.boundary,
        ),
        EngineChoice::Exact => exact_trajectory(settings)?,
        EngineChoice::Sample => sampler::sample_trajectory(
            &settings.start,
            &settings.rules,
            settings.steps,
            settings.boundary,
            settings.seed,
            0,
        ),
    };
    emit_ppm(&states, settings)
}

/// Exact marginals for generations `0..=steps`, or status 3 when the grid
/// exceeds the cell limit.
fn exact_trajectory(settings: &Settings) -> Result<Vec<GridState>, CliError> {
    let cells = settings.start.cells();
    if cells > settings.cell_limit {
        return Err(CliError::Limit(format!(
            "grid has {cells} cells, exceeding the exact-inference limit of {}; \
             use `sample` or raise --cell-limit",
            settings.cell_limit
        )));
    }
    let mut dist = initial_distribution(&settings.start);
    let base = settings.start.generation();
    let mut states = vec![exact_marginals(&dist, base)];
    for k in 1..=settings.steps {
        dist = evolve_distribution(&dist, &settings.rules, settings.boundary, settings.cell_limit)
            .map_err(|e| match e {
                ExactError::CellLimitExceeded { .. } | ExactError::GridTooLarge { .. } => {
                    CliError::Limit(e.to_string())
                }
            })?;
        states.push(exact_marginals(&dist, base + k));
    }
    Ok(states)
}

fn emit_states(states: &[GridState], settings: &Settings) -> Result<(), CliError> {
    match settings.format {
        OutputFormat::Ppm => emit_ppm(states, settings),
        OutputFormat::Csv | OutputFormat::Pattern => {
            let mut text = String::new();
            for (i, state) in states.iter().enumerate() {
                if i > 0 {
                    text.push('\n');
                }
                push_block(&mut text, state, settings, "");
            }
            write_text(&text, settings)
        }
    }
}

fn push_block(out: &mut String, state: &GridState, settings: &Settings, extra: &str) {
    let _ = write!(
        out,
        "# generation {} rules {}",
        state.generation(),
        settings.rules_text
    );
    if !extra.is_empty() {
        let _ = write!(out, " {extra}");
    }
    out.push('\n');
    match settings.format {
        OutputFormat::Csv => {
            for y in 0..state.height() {
                let row: Vec<String> = (0..state.width())
                    .map(|x| format!("{:.*}", settings.precision, state.value(x, y)))
                    .collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        OutputFormat::Pattern => {
            out.push_str(&state.to_pattern(settings.precision));
        }
        OutputFormat::Ppm => unreachable!("PPM output goes through emit_ppm"),
    }
}

fn emit_ppm(states: &[GridState], settings: &Settings) -> Result<(), CliError> {
    let spec = RenderSpec {
        cell_size: settings.cell_size,
        gridlines: settings.gridlines,
        ..RenderSpec::default()
    };
    let template = settings.out.as_deref().unwrap_or(DEFAULT_PPM_TEMPLATE);
    let paths = render_sequence(states, &spec, template).map_err(|e| {
        use problife::render::RenderError;
        match e {
            RenderError::Io { .. } => CliError::Io(e.to_string()),
            RenderError::InvalidTemplate { .. } | RenderError::EmptySequence => {
                CliError::Usage(e.to_string())
            }
            RenderError::ValueOutOfRange { .. } => CliError::Usage(e.to_string()),
        }
    })?;
    for path in paths {
        println!("{}", path.display());
    }
    Ok(())
}

fn write_text(text: &str, settings: &Settings) -> Result<(), CliError> {
    match &settings.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("writing '{path}': {e}")))
        }
    }
}
