use std::fmt::Write as _;
use std::fs;

use clap::ValueEnum;
use serde::Serialize;
use superchan::blochgeo::{
    fit_ellipsoid, image_center, least_disturbed, points_csv, sampled_image, BlochPoint,
    BlochVector, EllipsoidFit,
};
use superchan::channels::QUBIT_LEVELS;
use superchan::cohinfo::{parse_grid, sweep, sweep_csv};
use superchan::superpose::{
    mz_superpose, pairwise_operator_table, qutrit_extend, table_csv, QUTRIT_LEVELS,
};
use superchan::tomosim::{
    coherence_entry, coherence_phase_error, counts_csv, frequencies_for, parse_counts_csv,
    qutrit_settings, reconstruct_qutrit, run_tomography, true_qutrit_choi, ReconstructionResult,
};
use superchan::{
    Branch, CMatrix, ChoiState, Implementation, PathState, PostSelectedChannel, RandomUnitarySpec,
    Shots, SystematicsConfig,
};

use crate::output::{alpha_tag, json, prepare_dir, Artifacts, ChoiDump};
use crate::{
    BlochArgs, ChoiArgs, ChoiModel, Cli, CliError, Command, Format, Preset, SweepArgs, TableArgs,
    TomoArgs,
};

const MZ_LEVELS: [&str; 4] = ["aH", "aV", "bH", "bV"];

fn usage(e: superchan::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn numerical(e: superchan::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "alpha = {alpha} is outside [0, 1]"
        )))
    }
}

fn arm_pair(
    implementation: Implementation,
    alpha: f64,
) -> Result<(RandomUnitarySpec, RandomUnitarySpec), CliError> {
    check_alpha(alpha)?;
    Ok((
        implementation.spec(alpha, Branch::A).map_err(usage)?,
        implementation.spec(alpha, Branch::B).map_err(usage)?,
    ))
}

fn post_selected(
    a: &RandomUnitarySpec,
    b: &RandomUnitarySpec,
) -> Result<PostSelectedChannel, CliError> {
    mz_superpose(a, b)
        .post_select(&PathState::plus(), &PathState::plus())
        .map_err(numerical)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let dir = cli.out_dir.as_path();
    let mut out = Artifacts::default();
    let status = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args, dir, &mut out),
        Command::Bloch(args) => cmd_bloch(args, dir, &mut out),
        Command::Tomo(args) => cmd_tomo(args, dir, &mut out),
        Command::Choi(args) => cmd_choi(args, dir, &mut out),
        Command::Table(args) => cmd_table(args, dir, &mut out),
    };
    match status {
        Err(e @ CliError::Usage(_)) => Err(e),
        status => {
            out.write()?;
            status
        }
    }
}

fn cmd_sweep(args: &SweepArgs, dir: &std::path::Path, out: &mut Artifacts) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid).map_err(usage)?;
    prepare_dir(dir)?;
    let result = sweep(&grid, args.implementation).map_err(numerical)?;
    let name = format!("sweep_{}", args.implementation);
    match args.format {
        Format::Csv => out.add(dir, format!("{name}.csv"), sweep_csv(&result)),
        Format::Json => out.add(dir, format!("{name}.json"), json(&result)?),
    }
    let unconverged = result
        .curves
        .iter()
        .flat_map(|c| c.points.iter())
        .filter(|p| !p.converged)
        .count();
    if unconverged > 0 {
        return Err(CliError::Numerical(format!(
            "{unconverged} optimizations did not converge (flagged in output)"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct BlochReport {
    implementation: Implementation,
    alpha: f64,
    samples: usize,
    /// Image of the maximally mixed input.
    mixed_image: BlochVector,
    fit: EllipsoidFit,
    least_disturbed: Option<BlochPoint>,
}

fn cmd_bloch(args: &BlochArgs, dir: &std::path::Path, out: &mut Artifacts) -> Result<(), CliError> {
    let (a, b) = arm_pair(args.implementation, args.alpha)?;
    if args.samples < 9 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 9, got {}",
            args.samples
        )));
    }
    prepare_dir(dir)?;
    let ps = post_selected(&a, &b)?;
    let points = sampled_image(&ps, args.samples).map_err(numerical)?;
    let mixed_image = image_center(&ps).map_err(numerical)?;
    let fit = fit_ellipsoid(&points, mixed_image).map_err(numerical)?;
    let lengths = fit.ellipsoid.lengths();
    let c = fit.ellipsoid.center;
    println!(
        "center ({:.6}, {:.6}, {:.6}), semi-axes {:.6} {:.6} {:.6}",
        c[0], c[1], c[2], lengths[0], lengths[1], lengths[2]
    );
    let report = BlochReport {
        implementation: args.implementation,
        alpha: args.alpha,
        samples: args.samples,
        mixed_image,
        least_disturbed: least_disturbed(&points).copied(),
        fit,
    };
    let base = format!("bloch_{}_{}", args.implementation, alpha_tag(args.alpha));
    out.add(dir, format!("{base}_points.csv"), points_csv(&points));
    out.add(dir, format!("{base}_ellipsoid.json"), json(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct TomoReport {
    implementation: Implementation,
    alpha: f64,
    branch: Branch,
    /// `null` for exact probabilities or when reconstructing from a counts file.
    shots: Option<u64>,
    seed: Option<u64>,
    systematics: Option<SystematicsConfig>,
    counts_file: Option<String>,
    fidelity: Option<f64>,
    residual: f64,
    negative_mass: f64,
    flagged: bool,
    coherence: [f64; 2],
    coherence_phase_error: f64,
    choi: ChoiDump,
}

fn systematics(args: &TomoArgs) -> Result<SystematicsConfig, CliError> {
    let base = match args.systematics {
        Preset::None => SystematicsConfig::none(),
        Preset::Default => SystematicsConfig::default(),
    };
    let cfg = SystematicsConfig {
        phase_jitter: args.phase_jitter.unwrap_or(base.phase_jitter),
        axis_error: args.axis_error.unwrap_or(base.axis_error),
        absorbance: args.absorbance.unwrap_or(base.absorbance),
        seed: args.seed.unwrap_or(0),
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn cmd_tomo(args: &TomoArgs, dir: &std::path::Path, out: &mut Artifacts) -> Result<(), CliError> {
    check_alpha(args.alpha)?;
    let spec = args
        .implementation
        .spec(args.alpha, args.branch)
        .map_err(usage)?;
    let imported = match &args.counts {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let counts = parse_counts_csv(&text).map_err(usage)?;
            let settings = qutrit_settings(args.branch);
            Some((
                settings.clone(),
                frequencies_for(&settings, &counts).map_err(usage)?,
            ))
        }
        None => None,
    };
    let cfg = systematics(args)?;
    prepare_dir(dir)?;

    let truth = true_qutrit_choi(&spec).map_err(numerical)?;
    let mut base = format!(
        "tomo_{}_{}_{}",
        args.implementation,
        args.branch,
        alpha_tag(args.alpha)
    );
    let result: ReconstructionResult = match imported {
        Some((settings, freqs)) => {
            base.push_str("_from_counts");
            reconstruct_qutrit(&freqs, &settings, Some(&truth)).map_err(numerical)?
        }
        None => {
            base.push_str(&format!("_seed{}", cfg.seed));
            if !cfg.is_zero() {
                base.push_str("_systematics");
            }
            let run = run_tomography(&spec, args.shots, &cfg).map_err(numerical)?;
            match &run.counts {
                Some(c) => out.add(dir, format!("{base}_counts.csv"), counts_csv(c)),
                None => {
                    let mut csv = String::from("setting_id,probability\n");
                    for (s, p) in run.settings.iter().zip(&run.probabilities) {
                        writeln!(csv, "{},{:.6}", s.id, p + 0.0).unwrap();
                    }
                    out.add(dir, format!("{base}_probabilities.csv"), csv);
                }
            }
            run.result
        }
    };
    let coherence = coherence_entry(&result.choi, args.branch);
    let report = TomoReport {
        implementation: args.implementation,
        alpha: args.alpha,
        branch: args.branch,
        shots: match (args.counts.is_some(), args.shots) {
            (false, Shots::Finite(n)) => Some(n),
            _ => None,
        },
        seed: args.seed,
        systematics: args.counts.is_none().then(|| cfg.clone()),
        counts_file: args.counts.as_ref().map(|p| p.display().to_string()),
        fidelity: result.fidelity,
        residual: result.residual,
        negative_mass: result.negative_mass,
        flagged: result.flagged,
        coherence: [coherence.re, coherence.im],
        coherence_phase_error: coherence_phase_error(&result.choi, &truth, args.branch),
        choi: ChoiDump::new(&result.choi, &QUTRIT_LEVELS, &QUTRIT_LEVELS),
    };
    if let Some(f) = result.fidelity {
        println!("fidelity {f:.6}");
    }
    if result.flagged {
        eprintln!(
            "warning: negative eigenvalue mass {:.3} exceeds 0.1 before projection",
            result.negative_mass
        );
    }
    out.add(dir, format!("{base}_reconstruction.json"), json(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct ChoiReport {
    model: String,
    implementation: Implementation,
    alpha: f64,
    /// Post-selected model only.
    success_at_maximally_mixed: Option<f64>,
    choi: ChoiDump,
}

fn cmd_choi(args: &ChoiArgs, dir: &std::path::Path, out: &mut Artifacts) -> Result<(), CliError> {
    let (a, b) = arm_pair(args.implementation, args.alpha)?;
    prepare_dir(dir)?;
    let mut success = None;
    let (choi, levels): (ChoiState, &[&str]) = match args.model {
        ChoiModel::Qubit => (a.to_kraus().choi().map_err(numerical)?, &QUBIT_LEVELS),
        ChoiModel::Postselected => {
            let ps = post_selected(&a, &b)?;
            let mixed = CMatrix::identity(2).scale_real(0.5);
            success = Some(ps.success_probability(&mixed).map_err(numerical)?);
            (
                ps.to_channel().and_then(|c| c.choi()).map_err(numerical)?,
                &QUBIT_LEVELS,
            )
        }
        ChoiModel::QutritA => (
            qutrit_extend(&a).to_channel().choi().map_err(numerical)?,
            &QUTRIT_LEVELS,
        ),
        ChoiModel::QutritB => (
            qutrit_extend(&b).to_channel().choi().map_err(numerical)?,
            &QUTRIT_LEVELS,
        ),
        ChoiModel::Mz => (
            mz_superpose(&a, &b)
                .to_channel()
                .and_then(|c| c.choi())
                .map_err(numerical)?,
            &MZ_LEVELS,
        ),
    };
    let model = args
        .model
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let report = ChoiReport {
        model: model.clone(),
        implementation: args.implementation,
        alpha: args.alpha,
        success_at_maximally_mixed: success,
        choi: ChoiDump::new(&choi, levels, levels),
    };
    let name = format!(
        "choi_{model}_{}_{}.json",
        args.implementation,
        alpha_tag(args.alpha)
    );
    out.add(dir, name, json(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    i: usize,
    j: usize,
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

fn cmd_table(args: &TableArgs, dir: &std::path::Path, out: &mut Artifacts) -> Result<(), CliError> {
    let (a, b) = arm_pair(args.implementation, 1.0)?;
    prepare_dir(dir)?;
    let table = pairwise_operator_table(&a, &b);
    let name = format!("table_{}", args.implementation);
    match args.format {
        Format::Csv => out.add(dir, format!("{name}.csv"), table_csv(&table)),
        Format::Json => {
            let rows: Vec<TableRow> = table
                .iter()
                .map(|e| {
                    let m = &e.operator;
                    let part = |f: fn(superchan::C64) -> f64| -> Vec<Vec<f64>> {
                        (0..2)
                            .map(|r| (0..2).map(|c| f(m[(r, c)]) + 0.0).collect())
                            .collect()
                    };
                    TableRow {
                        i: e.i,
                        j: e.j,
                        real: part(|z| z.re),
                        imag: part(|z| z.im),
                    }
                })
                .collect();
            out.add(dir, format!("{name}.json"), json(&rows)?);
        }
    }
    Ok(())
}
