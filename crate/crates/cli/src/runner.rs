//! Subcommand implementations.

use cdsim::cd::{cd_term_for, CdMethod};
use cdsim::circuit::{compile, gate_stats, optimize, prep_circuit, Circuit};
use cdsim::config::{SweepAxis, SweepSpec};
use cdsim::evolve::{build_plan_with, run_plan, EvolveOptions};
use cdsim::models::AnnealingProblem;
use cdsim::noise::{
    apply_readout_noise, build_response_matrix, mitigate, noisy_distribution, total_variation,
    ReadoutModel,
};
use cdsim::state::basis_label;
use cdsim::ExperimentConfig;
use rayon::prelude::*;

use crate::output::OutputWriter;
use crate::svg::{line_plot, Series};
use crate::{Cli, CliError, Command};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let config = ExperimentConfig::from_path(config_path)?;
    config.validate()?;
    let seed = cli.seed.or(config.seed).unwrap_or(0);

    match cli.command {
        Command::Evolve => evolve(cli, &config, seed),
        Command::Sweep => sweep(cli, &config, seed),
        Command::Gatecount => gatecount(cli, &config, seed),
        Command::MitigateDemo => mitigate_demo(cli, &config, seed),
        Command::ExportCircuit => export_circuit(cli, &config, seed),
    }
}

fn evolve_once(
    config: &ExperimentConfig,
    problem: &AnnealingProblem,
    method: CdMethod,
    snapshots: bool,
) -> Result<cdsim::EvolutionResult, CliError> {
    let cd = cd_term_for(method, problem)?;
    let plan = build_plan_with(problem, &cd, &config.plan_options()?)?;
    Ok(run_plan(
        problem,
        &plan,
        &EvolveOptions {
            record: true,
            snapshots,
            plan: config.plan_options()?,
        },
    )?)
}

fn evolve(cli: &Cli, config: &ExperimentConfig, seed: u64) -> Result<(), CliError> {
    let out = OutputWriter::new(&cli.out, "evolve", config, seed)?;
    let problem = config.build_problem()?;
    for warning in &problem.warnings {
        eprintln!("warning: {warning}");
    }
    let method = config.method()?;
    let shots = config.shots.unwrap_or(0);
    let want_snapshots = shots > 0;
    if want_snapshots && problem.n_qubits > 12 {
        return Err(CliError::Config(
            "sampled series are capped at 12 qubits".into(),
        ));
    }

    let result = evolve_once(config, &problem, method, want_snapshots)?;
    out.write_csv("evolve.csv", &result.to_csv())?;

    let baseline = if method != CdMethod::None {
        let base = evolve_once(config, &problem, CdMethod::None, false)?;
        out.write_csv("evolve_nocd.csv", &base.to_csv())?;
        Some(base)
    } else {
        None
    };

    if shots > 0 {
        let model = match config.readout_error {
            Some(p) if p > 0.0 => Some(ReadoutModel::uniform(problem.n_qubits, p)?),
            _ => None,
        };
        let mut body = String::from("step,t,lambda,p_gs_sampled\n");
        let snapshots = result.snapshots.as_ref().expect("snapshots recorded");
        for (record, state) in result.records.iter().zip(snapshots) {
            let probs = state.probabilities();
            let step_seed = seed.wrapping_add(record.step as u64);
            let histogram = match &model {
                Some(m) => apply_readout_noise(&probs, m, step_seed, shots)?,
                None => cdsim::noise::sample_counts(&probs, problem.n_qubits, step_seed, shots)?,
            };
            let freqs = histogram.frequencies();
            let sampled: f64 = problem.ground_manifold.iter().map(|&idx| freqs[idx]).sum();
            body.push_str(&format!(
                "{},{:.12},{:.12},{:.12}\n",
                record.step, record.t, record.lambda, sampled
            ));
        }
        out.write_csv("evolve_sampled.csv", &body)?;
    }

    if cli.svg {
        let mut series = vec![Series {
            label: "with CD",
            color: "#c0392b",
            points: result.records.iter().map(|r| (r.t, r.p_gs)).collect(),
        }];
        if let Some(base) = &baseline {
            series.push(Series {
                label: "no CD",
                color: "#2980b9",
                points: base.records.iter().map(|r| (r.t, r.p_gs)).collect(),
            });
        }
        let svg = line_plot("ground-state probability", "t", "P_gs", &series);
        std::fs::write(out.path("evolve.svg"), svg)?;
        println!("wrote {}", out.path("evolve.svg").display());
    }

    let final_record = result.records.last();
    if let Some(r) = final_record {
        println!(
            "final: P_gs = {:.6}, fidelity = {:.6} ({} steps)",
            r.p_gs,
            r.fidelity,
            result.records.len()
        );
    }
    Ok(())
}

struct SweepRow {
    x: f64,
    p_gs: f64,
    fidelity: f64,
    rotations: usize,
    cnots: usize,
}

fn sweep_point(config: &ExperimentConfig, axis: SweepAxis, x: f64) -> Result<SweepRow, CliError> {
    let (total_time, dt, n_override, j0_override) = match axis {
        SweepAxis::Time => {
            let steps = (x / config.dt).round().max(1.0);
            (x, x / steps, None, None)
        }
        SweepAxis::Coupling => (config.total_time, config.dt, None, Some(x)),
        SweepAxis::Size => (config.total_time, config.dt, Some(x as usize), None),
        SweepAxis::Steps => {
            let steps = x.max(1.0).round();
            (config.total_time, config.total_time / steps, None, None)
        }
    };
    let problem = config.build_problem_with(total_time, dt, n_override, j0_override)?;
    let cd = cd_term_for(config.method()?, &problem)?;
    let options = config.plan_options()?;
    let plan = build_plan_with(&problem, &cd, &options)?;
    let result = run_plan(
        &problem,
        &plan,
        &EvolveOptions {
            record: false,
            snapshots: false,
            plan: options,
        },
    )?;
    let circuit = optimize(&compile(&plan)?);
    Ok(SweepRow {
        x,
        p_gs: problem.ground_probability(&result.final_state),
        fidelity: result.final_state.fidelity(&problem.target_state)?,
        rotations: circuit.rotation_count(),
        cnots: circuit.cnot_count(),
    })
}

fn sweep(cli: &Cli, config: &ExperimentConfig, seed: u64) -> Result<(), CliError> {
    let spec: &SweepSpec = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep command needs a [sweep] section".into()))?;
    let out = OutputWriter::new(&cli.out, "sweep", config, seed)?;
    let rows: Vec<Result<SweepRow, CliError>> = spec
        .grid
        .par_iter()
        .map(|&x| sweep_point(config, spec.axis, x))
        .collect();
    let mut body = String::from("x,p_gs,fidelity,rotations,cnots\n");
    let mut points = Vec::new();
    for row in rows {
        let row = row?;
        body.push_str(&format!(
            "{:.12},{:.12},{:.12},{},{}\n",
            row.x, row.p_gs, row.fidelity, row.rotations, row.cnots
        ));
        points.push((row.x, row.p_gs, row.fidelity));
    }
    out.write_csv("sweep.csv", &body)?;
    if cli.svg {
        let series = [
            Series {
                label: "P_gs",
                color: "#c0392b",
                points: points.iter().map(|&(x, p, _)| (x, p)).collect(),
            },
            Series {
                label: "fidelity",
                color: "#2980b9",
                points: points.iter().map(|&(x, _, f)| (x, f)).collect(),
            },
        ];
        let svg = line_plot("sweep", "x", "value", &series);
        std::fs::write(out.path("sweep.svg"), svg)?;
        println!("wrote {}", out.path("sweep.svg").display());
    }
    Ok(())
}

fn gatecount(cli: &Cli, config: &ExperimentConfig, seed: u64) -> Result<(), CliError> {
    let out = OutputWriter::new(&cli.out, "gatecount", config, seed)?;
    let search = config.gatecount.clone().unwrap_or_default();
    let eps_rot = config.eps_rotation.unwrap_or(5e-4);
    let eps_cnot = config.eps_cnot.unwrap_or(0.015);
    let label = format!("{:?}", config.model).to_lowercase();

    let mut body = String::from("problem,method,steps,rotations,cnots,expected_error,fidelity\n");
    for (method, threshold) in [
        (config.method()?, search.threshold_cd),
        (CdMethod::None, search.threshold_nocd),
    ] {
        let found = minimal_steps(config, method, threshold, search.max_steps)?;
        let (steps, fidelity, circuit) = found.ok_or_else(|| {
            CliError::Numerical(format!(
                "method {method} did not reach fidelity {threshold} within {} steps",
                search.max_steps
            ))
        })?;
        let stats = gate_stats(&circuit, eps_rot, eps_cnot);
        body.push_str(&format!(
            "{label},{method},{steps},{},{},{:.6},{:.6}\n",
            stats.rotations, stats.cnots, stats.expected_error, fidelity
        ));
        println!(
            "{method}: {steps} steps, {} rotations, {} CNOTs, fidelity {fidelity:.4}",
            stats.rotations, stats.cnots
        );
    }
    out.write_csv("gatecount.csv", &body)?;
    Ok(())
}

fn minimal_steps(
    config: &ExperimentConfig,
    method: CdMethod,
    threshold: f64,
    max_steps: usize,
) -> Result<Option<(usize, f64, Circuit)>, CliError> {
    for steps in 1..=max_steps {
        let total_time = steps as f64 * config.dt;
        let problem = config.build_problem_with(total_time, config.dt, None, None)?;
        let cd = cd_term_for(method, &problem)?;
        let options = config.plan_options()?;
        let plan = build_plan_with(&problem, &cd, &options)?;
        let result = run_plan(
            &problem,
            &plan,
            &EvolveOptions {
                record: false,
                snapshots: false,
                plan: options,
            },
        )?;
        let fidelity = result.final_state.fidelity(&problem.target_state)?;
        if fidelity >= threshold {
            let circuit = optimize(&compile(&plan)?);
            return Ok(Some((steps, fidelity, circuit)));
        }
    }
    Ok(None)
}

fn mitigate_demo(cli: &Cli, config: &ExperimentConfig, seed: u64) -> Result<(), CliError> {
    let out = OutputWriter::new(&cli.out, "mitigate-demo", config, seed)?;
    let problem = config.build_problem()?;
    let result = evolve_once(config, &problem, config.method()?, false)?;
    let actual = result.final_state.probabilities();

    let error = config.readout_error.unwrap_or(0.04);
    let shots = config.shots.unwrap_or(1024);
    let model = ReadoutModel::uniform(problem.n_qubits, error)?;
    let response = build_response_matrix(&model)?;

    let noisy = if shots == 0 {
        noisy_distribution(&actual, &model)?
    } else {
        let histogram = apply_readout_noise(&actual, &model, seed, shots)?;
        out.write_csv("histogram.csv", &histogram.to_csv())?;
        histogram.frequencies()
    };
    let outcome = mitigate(&noisy, &response)?;

    let mut body = String::from("bitstring,p_noisy,p_inverted,p_mitigated\n");
    for (idx, &p_noisy) in noisy.iter().enumerate() {
        body.push_str(&format!(
            "{},{:.12},{:.12},{:.12}\n",
            basis_label(problem.n_qubits, idx),
            p_noisy,
            outcome.inverted[idx],
            outcome.mitigated[idx]
        ));
    }
    let tv_noisy = total_variation(&noisy, &actual);
    let tv_mitigated = total_variation(&outcome.mitigated, &actual);
    body.push_str(&format!("# tv_noisy = {tv_noisy:.6}\n"));
    body.push_str(&format!("# tv_mitigated = {tv_mitigated:.6}\n"));
    body.push_str(&format!("# clipped_mass = {:.6}\n", outcome.clipped_mass));
    body.push_str(&format!("# seed = {seed}\n"));
    out.write_csv("mitigation.csv", &body)?;
    println!(
        "tv_noisy = {tv_noisy:.6}, tv_mitigated = {tv_mitigated:.6} (seed {seed}, {shots} shots)"
    );
    Ok(())
}

fn export_circuit(cli: &Cli, config: &ExperimentConfig, seed: u64) -> Result<(), CliError> {
    let out = OutputWriter::new(&cli.out, "export-circuit", config, seed)?;
    let problem = config.build_problem()?;
    let cd = config.build_cd(&problem)?;
    let plan = build_plan_with(&problem, &cd, &config.plan_options()?)?;
    let mut circuit = prep_circuit(&problem)?;
    circuit.extend(&compile(&plan)?);
    let circuit = optimize(&circuit);
    out.write_slashed("circuit.qasm", &circuit.to_qasm())?;
    println!(
        "{} rotations, {} CNOTs over {} qubits",
        circuit.rotation_count(),
        circuit.cnot_count(),
        circuit.n_qubits
    );
    Ok(())
}
