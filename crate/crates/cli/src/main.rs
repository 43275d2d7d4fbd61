//! Batch front end: one subcommand per library operation family, with
//! deterministic machine-readable output.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical-convergence
//! error, 64 usage error.

mod output;
mod units;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levylab::jumps::{empirical_cf, sample_increments, JumpSimConfig};
use levylab::levy::{
    eta_from_measure, eta_relativistic, levy_density_1d, levy_density_3d, LevyDensity,
    LevyExponent,
};
use levylab::propagation::{evolve, transition_density, Grid1D, WaveState};
use levylab::qft::{
    dirac_propagator_with_policy, kg_propagator, pole_search, self_energy_estimate,
    superficial_degree, BranchPolicy, PoleStatus, SelfEnergyScheme, Verdict,
};
use levylab::quad::QuadratureSpec;
use levylab::spectrum::{
    cutoff_from_roots, mass_spectrum, roots_from_cutoff, CutoffPolynomial, RootStatus,
};
use levylab::Error as LabError;
use output::{Document, Format};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use units::Units;

#[derive(Parser)]
#[command(
    name = "levylab",
    version,
    about = "Numerical laboratory for relativistic Lévy-Schrödinger mechanics",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (stdout when omitted); relative paths resolve against
    /// LEVYLAB_OUTPUT_DIR when that variable is set
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Unit system applied at this boundary only
    #[arg(long, global = true, value_enum, default_value_t = Units::Natural)]
    units: Units,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the characteristic exponent eta(u), optionally
    /// cross-checking the closed form against the Lévy-Khintchin quadrature
    Exponent(ExponentArgs),
    /// Tabulate the Bessel-kernel jump densities (1D and 3D radial)
    Density(DensityArgs),
    /// Evolve a Gaussian packet spectrally and dump snapshots
    Evolve(EvolveArgs),
    /// Transition density of the increment over a horizon
    Transition(TransitionArgs),
    /// Sample terminal increments and compare the empirical characteristic
    /// function against exp((t/tau) eta(u))
    Simulate(SimulateArgs),
    /// Cutoff polynomial <-> roots <-> masses (forward and inverse)
    Spectrum(SpectrumArgs),
    /// Scan the modified Klein-Gordon or Dirac propagator over p^2
    Propagator(PropagatorArgs),
    /// Superficial-degree table for cutoff degrees 0..=dmax
    Powercount(PowercountArgs),
    /// Wick-rotated self-energy projections with cutoff-doubling diagnostics
    Selfenergy(SelfenergyArgs),
    /// Roots of the resummed pole equation
    Poles(PolesArgs),
}

#[derive(Args)]
struct ExponentArgs {
    /// Particle mass (MeV under --units mev-fm)
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Half-width of the wavenumber window [-umax, umax]
    #[arg(long, default_value_t = 10.0)]
    umax: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Also evaluate eta by quadrature over the jump measure and report the
    /// deviation
    #[arg(long)]
    check_quadrature: bool,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_enum, default_value_t = DensityKind::D1)]
    which: DensityKind,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 10.0)]
    xmax: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityKind {
    /// 1D density K1(m|x|)/(pi |x|)
    #[value(name = "1d")]
    D1,
    /// 3D radial density m K2(m r)/(2 pi^2 r^2)
    #[value(name = "3d")]
    D3,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 40.0)]
    length: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    dt: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 1.5)]
    width: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    u0: f64,
    /// Number of equally spaced snapshots (the final state is always one)
    #[arg(long, default_value_t = 5)]
    snapshots: usize,
}

#[derive(Args)]
struct TransitionArgs {
    #[arg(long, value_enum, default_value_t = ExponentKindArg::Relativistic)]
    kind: ExponentKindArg,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Diffusion scale (gaussian kind)
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Time scale (gaussian kind; the relativistic kind uses 1/m)
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 40.0)]
    length: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExponentKindArg {
    Relativistic,
    Gaussian,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Horizon t
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Small-jump truncation level
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Disable the Gaussian small-jump compensation
    #[arg(long)]
    no_compensation: bool,
    /// Largest probe wavenumber
    #[arg(long, default_value_t = 3.0)]
    umax: f64,
    /// Number of probe wavenumbers (0 included)
    #[arg(long, default_value_t = 13)]
    nu: usize,
}

#[derive(Args, Clone)]
struct CutoffArgs {
    /// All four coefficients l0 l1 l2 l3 of f(x); must satisfy f(1) = 0
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["L0", "L1", "L2", "L3"])]
    lambdas: Option<Vec<f64>>,
    /// The two quadratic roots x+ x- of g(x) = 1 (x = 1 is implied)
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["XP", "XM"], requires = "lambda3")]
    roots: Option<Vec<f64>>,
    /// Overall cubic scale used with --roots
    #[arg(long, allow_negative_numbers = true)]
    lambda3: Option<f64>,
}

impl CutoffArgs {
    fn resolve(&self, required: bool) -> Result<CutoffPolynomial, LabError> {
        match (&self.lambdas, &self.roots) {
            (Some(_), Some(_)) => Err(LabError::Domain(
                "give either --lambdas or --roots, not both".into(),
            )),
            (Some(l), None) => CutoffPolynomial::from_coefficients([l[0], l[1], l[2], l[3]]),
            (None, Some(r)) => {
                let lambda3 = self.lambda3.ok_or_else(|| {
                    LabError::Domain("--roots requires --lambda3".into())
                })?;
                cutoff_from_roots(r[0], r[1], lambda3)
            }
            (None, None) => {
                if required {
                    Err(LabError::Domain(
                        "a cutoff is required: --lambdas L0 L1 L2 L3 or --roots XP XM --lambda3 L3".into(),
                    ))
                } else {
                    Ok(CutoffPolynomial::zero())
                }
            }
        }
    }

    fn echo(&self, resolved: &CutoffPolynomial) -> serde_json::Value {
        json!({
            "lambda": resolved.coefficients(),
        })
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
}

#[derive(Args)]
struct PropagatorArgs {
    #[arg(long, value_enum, default_value_t = PropagatorKind::Kg)]
    which: PropagatorKind,
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    p2min: f64,
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    p2max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Continue through 1 + f < 0 on the principal complex branch
    #[arg(long)]
    allow_complex_branch: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropagatorKind {
    Kg,
    Dirac,
}

#[derive(Args)]
struct PowercountArgs {
    #[arg(long, default_value_t = 4)]
    dmax: u32,
}

#[derive(Args)]
struct SelfenergyArgs {
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Spacelike external momentum squared (<= 0)
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    p2: f64,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Euclidean cutoff radius
    #[arg(long, default_value_t = 50.0)]
    lambda_cutoff: f64,
    #[arg(long, default_value_t = 512)]
    radial_panels: usize,
    #[arg(long, default_value_t = 16)]
    polar_panels: usize,
    /// Error out instead of taking the principal complex branch where
    /// 1 + f < 0
    #[arg(long)]
    reject_branch: bool,
}

#[derive(Args)]
struct PolesArgs {
    #[command(flatten)]
    cutoff: CutoffArgs,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a_tilde: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b_tilde: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    hi: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(64);
        }
    };

    match dispatch(&cli) {
        Ok(doc) => {
            let rendered = doc.render(cli.format);
            match output::emit(&rendered, cli.output.as_deref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("levylab: output error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("levylab: {e}");
            match e {
                LabError::Domain(_)
                | LabError::Shape(_)
                | LabError::Degenerate(_)
                | LabError::Branch(_) => ExitCode::from(2),
                LabError::Convergence { .. }
                | LabError::Resolution(_)
                | LabError::Budget(_) => ExitCode::from(3),
            }
        }
    }
}

fn base_meta(
    subcommand: &str,
    units: Units,
    seed: Option<u64>,
    config: serde_json::Value,
) -> serde_json::Value {
    json!({
        "tool": "levylab",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "units": units.label(),
        "unit_note": units.note(),
        "seed": seed,
        "config": config,
    })
}

fn dispatch(cli: &Cli) -> Result<Document, LabError> {
    match &cli.command {
        Command::Exponent(args) => run_exponent(args, cli.units),
        Command::Density(args) => run_density(args, cli.units),
        Command::Evolve(args) => run_evolve(args, cli.units),
        Command::Transition(args) => run_transition(args, cli.units),
        Command::Simulate(args) => run_simulate(args, cli.units),
        Command::Spectrum(args) => run_spectrum(args, cli.units),
        Command::Propagator(args) => run_propagator(args, cli.units),
        Command::Powercount(args) => run_powercount(args, cli.units),
        Command::Selfenergy(args) => run_selfenergy(args, cli.units),
        Command::Poles(args) => run_poles(args, cli.units),
    }
}

fn run_exponent(args: &ExponentArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    if args.n < 2 {
        return Err(LabError::Domain("need at least 2 grid points".into()));
    }
    let spec = QuadratureSpec::default();
    let quad_exponent = if args.check_quadrature {
        Some(LevyExponent::measure_defined(
            0.0,
            LevyDensity::relativistic(m)?,
            1.0 / m,
        )?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(args.n);
    let mut max_diff = 0.0f64;
    for i in 0..args.n {
        let u = -args.umax + 2.0 * args.umax * i as f64 / (args.n - 1) as f64;
        let closed = eta_relativistic(u, m)?;
        if let Some(exp) = &quad_exponent {
            let via_measure = eta_from_measure(u, exp, &spec)?.value;
            let diff = (via_measure - closed).abs();
            max_diff = max_diff.max(diff);
            rows.push(vec![u, closed, via_measure, diff]);
        } else {
            rows.push(vec![u, closed]);
        }
    }

    let config = json!({
        "m": args.m,
        "umax": args.umax,
        "n": args.n,
        "check_quadrature": args.check_quadrature,
    });
    let mut meta = base_meta("exponent", units, None, config);
    if args.check_quadrature {
        meta["max_abs_diff"] = json!(max_diff);
    }
    Ok(Document {
        meta,
        summary: None,
        columns: if args.check_quadrature {
            vec!["u", "eta_closed", "eta_quad", "abs_diff"]
        } else {
            vec!["u", "eta_closed"]
        },
        rows,
    })
}

fn run_density(args: &DensityArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    if args.points == 0 {
        return Err(LabError::Domain("need at least one point".into()));
    }
    let mut rows = Vec::with_capacity(args.points);
    for i in 1..=args.points {
        let x = args.xmax * i as f64 / args.points as f64;
        let w = match args.which {
            DensityKind::D1 => levy_density_1d(x, m)?,
            DensityKind::D3 => levy_density_3d(x, m)?,
        };
        rows.push(vec![x, w]);
    }
    let config = json!({
        "which": match args.which { DensityKind::D1 => "1d", DensityKind::D3 => "3d" },
        "m": args.m,
        "xmax": args.xmax,
        "points": args.points,
    });
    Ok(Document {
        meta: base_meta("density", units, None, config),
        summary: None,
        columns: vec!["x", "w"],
        rows,
    })
}

fn run_evolve(args: &EvolveArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    if args.snapshots == 0 || args.steps == 0 {
        return Err(LabError::Domain(
            "steps and snapshots must be positive".into(),
        ));
    }
    let grid = Grid1D::new(args.n, args.length)?;
    let exponent = LevyExponent::relativistic(m)?;
    let mut state = WaveState::gaussian_packet(grid.clone(), args.x0, args.width, args.u0)?;
    let every = (args.steps / args.snapshots).max(1);

    let mut rows = Vec::new();
    let mut dump = |snapshot: usize, state: &WaveState| {
        for j in 0..grid.n() {
            let a = state.amplitudes[j];
            rows.push(vec![
                snapshot as f64,
                state.time,
                grid.x(j),
                a.re,
                a.im,
                a.norm_sqr(),
            ]);
        }
    };
    dump(0, &state);
    let mut emitted = 0;
    for step in 1..=args.steps {
        state = evolve(&state, args.dt, &exponent)?;
        if step % every == 0 || step == args.steps {
            emitted += 1;
            dump(emitted, &state);
            if step == args.steps {
                break;
            }
        }
    }
    let norm = state.norm();

    let config = json!({
        "m": args.m,
        "n": args.n,
        "length": args.length,
        "dt": args.dt,
        "steps": args.steps,
        "x0": args.x0,
        "width": args.width,
        "u0": args.u0,
        "snapshots": args.snapshots,
    });
    let mut meta = base_meta("evolve", units, None, config);
    meta["final_norm"] = json!(norm);
    Ok(Document {
        meta,
        summary: None,
        columns: vec!["snapshot", "t", "x", "re", "im", "prob"],
        rows,
    })
}

fn run_transition(args: &TransitionArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    let exponent = match args.kind {
        ExponentKindArg::Relativistic => LevyExponent::relativistic(m)?,
        ExponentKindArg::Gaussian => LevyExponent::gaussian(args.beta, args.tau)?,
    };
    let grid = Grid1D::new(args.n, args.length)?;
    let density = transition_density(&exponent, args.dt, &grid)?;
    let rows: Vec<Vec<f64>> = (0..grid.n())
        .map(|j| vec![grid.x(j), density.values[j]])
        .collect();

    let config = json!({
        "kind": match args.kind { ExponentKindArg::Relativistic => "relativistic", ExponentKindArg::Gaussian => "gaussian" },
        "m": args.m,
        "beta": args.beta,
        "tau": args.tau,
        "dt": args.dt,
        "n": args.n,
        "length": args.length,
    });
    let mut meta = base_meta("transition", units, None, config);
    meta["normalization_correction"] = json!(density.normalization_correction);
    meta["negative_clip"] = json!(density.negative_clip);
    Ok(Document {
        meta,
        summary: None,
        columns: vec!["x", "p"],
        rows,
    })
}

fn run_simulate(args: &SimulateArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    if args.nu < 2 {
        return Err(LabError::Domain("need at least 2 probe wavenumbers".into()));
    }
    let exponent = LevyExponent::relativistic(m)?;
    let config = JumpSimConfig {
        epsilon: args.epsilon,
        n_paths: args.paths,
        horizon: args.t,
        seed: args.seed,
        gaussian_compensation: !args.no_compensation,
    };
    let ensemble = sample_increments(&exponent, &config)?;
    let us: Vec<f64> = (0..args.nu)
        .map(|i| args.umax * i as f64 / (args.nu - 1) as f64)
        .collect();
    let cf = empirical_cf(&ensemble, &us)?;

    let scale = args.t / exponent.tau;
    let rows: Vec<Vec<f64>> = us
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let theory = (scale * eta_relativistic(u, m).unwrap()).exp();
            vec![
                u,
                cf.values[i].re,
                cf.values[i].im,
                cf.stderr_re[i],
                cf.stderr_im[i],
                theory,
            ]
        })
        .collect();

    let config_echo = json!({
        "m": args.m,
        "t": args.t,
        "paths": args.paths,
        "seed": args.seed,
        "epsilon": args.epsilon,
        "compensation": !args.no_compensation,
        "umax": args.umax,
        "nu": args.nu,
    });
    let mut meta = base_meta("simulate", units, Some(args.seed), config_echo);
    meta["jump_stats"] = json!({
        "mean_per_path": ensemble.jump_stats.mean,
        "max_per_path": ensemble.jump_stats.max,
    });
    Ok(Document {
        meta,
        summary: None,
        columns: vec!["u", "ecf_re", "ecf_im", "stderr_re", "stderr_im", "theory_re"],
        rows,
    })
}

fn run_spectrum(args: &SpectrumArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    let cutoff = args.cutoff.resolve(true)?;
    let root_set = roots_from_cutoff(&cutoff)?;
    let spectrum = mass_spectrum(m, &cutoff)?;

    let roots_json: Vec<serde_json::Value> = root_set
        .roots
        .iter()
        .map(|r| {
            json!({
                "x": r.value,
                "imag": r.imag,
                "multiplicity": r.multiplicity,
                "status": match r.status {
                    RootStatus::Accepted => "accepted",
                    RootStatus::RejectedNonPositive => "rejected_non_positive",
                    RootStatus::RejectedComplex => "rejected_complex",
                },
                "residual": if r.residual.is_nan() { serde_json::Value::Null } else { json!(r.residual) },
            })
        })
        .collect();
    let masses: Vec<f64> = spectrum.masses.iter().map(|e| e.mass).collect();
    let summary = json!({
        "lambda": cutoff.coefficients(),
        "discriminant": root_set.discriminant,
        "roots": roots_json,
        "masses": masses,
        "degenerate": spectrum.degenerate,
    });

    let rows: Vec<Vec<f64>> = spectrum
        .masses
        .iter()
        .map(|e| vec![e.root, e.mass])
        .collect();

    let config = json!({
        "m": args.m,
        "cutoff": args.cutoff.echo(&cutoff),
    });
    Ok(Document {
        meta: base_meta("spectrum", units, None, config),
        summary: Some(summary),
        columns: vec!["x", "mass"],
        rows,
    })
}

fn run_propagator(args: &PropagatorArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    let cutoff = args.cutoff.resolve(false)?;
    if args.points < 2 {
        return Err(LabError::Domain("need at least 2 scan points".into()));
    }
    let policy = if args.allow_complex_branch {
        BranchPolicy::PrincipalComplex
    } else {
        BranchPolicy::Reject
    };

    let mut rows = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let p2 = args.p2min + (args.p2max - args.p2min) * i as f64 / (args.points - 1) as f64;
        match args.which {
            PropagatorKind::Kg => {
                let v = kg_propagator(p2, m, &cutoff, args.epsilon)?;
                rows.push(vec![p2, v.re, v.im]);
            }
            PropagatorKind::Dirac => {
                let v = dirac_propagator_with_policy(p2, m, &cutoff, args.epsilon, policy)?;
                rows.push(vec![
                    p2,
                    v.vector_coeff.re,
                    v.vector_coeff.im,
                    v.scalar_part.re,
                    v.scalar_part.im,
                ]);
            }
        }
    }

    let config = json!({
        "which": match args.which { PropagatorKind::Kg => "kg", PropagatorKind::Dirac => "dirac" },
        "m": args.m,
        "cutoff": args.cutoff.echo(&cutoff),
        "p2min": args.p2min,
        "p2max": args.p2max,
        "points": args.points,
        "epsilon": args.epsilon,
        "allow_complex_branch": args.allow_complex_branch,
    });
    Ok(Document {
        meta: base_meta("propagator", units, None, config),
        summary: None,
        columns: match args.which {
            PropagatorKind::Kg => vec!["p2", "re", "im"],
            PropagatorKind::Dirac => vec!["p2", "vector_re", "vector_im", "scalar_re", "scalar_im"],
        },
        rows,
    })
}

fn run_powercount(args: &PowercountArgs, units: Units) -> Result<Document, LabError> {
    let rows: Vec<Vec<f64>> = (0..=args.dmax)
        .map(|d| {
            let pc = superficial_degree(d);
            vec![
                d as f64,
                pc.exponent_a as f64,
                pc.exponent_b as f64,
                if pc.verdict == Verdict::Convergent { 1.0 } else { 0.0 },
            ]
        })
        .collect();
    let config = json!({ "dmax": args.dmax });
    Ok(Document {
        meta: base_meta("powercount", units, None, config),
        summary: None,
        columns: vec!["degree", "exponent_a", "exponent_b", "convergent"],
        rows,
    })
}

fn run_selfenergy(args: &SelfenergyArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    let cutoff = args.cutoff.resolve(false)?;
    let scheme = SelfEnergyScheme {
        lambda_cutoff: args.lambda_cutoff,
        radial_panels: args.radial_panels,
        polar_panels: args.polar_panels,
        branch_policy: if args.reject_branch {
            BranchPolicy::Reject
        } else {
            BranchPolicy::PrincipalComplex
        },
    };
    let se = self_energy_estimate(args.p2, m, &cutoff, args.coupling, &scheme)?;

    let summary = json!({
        "a_tilde": { "re": se.a_tilde.re, "im": se.a_tilde.im },
        "b_tilde": { "re": se.b_tilde.re, "im": se.b_tilde.im },
        "stability": {
            "a_rel_change": se.stability.a_rel_change,
            "b_rel_change": se.stability.b_rel_change,
        },
        "convention": se.convention,
    });
    let rows = vec![vec![
        se.a_tilde.re,
        se.a_tilde.im,
        se.b_tilde.re,
        se.b_tilde.im,
        se.stability.a_rel_change,
        se.stability.b_rel_change,
    ]];

    let config = json!({
        "m": args.m,
        "cutoff": args.cutoff.echo(&cutoff),
        "p2": args.p2,
        "coupling": args.coupling,
        "lambda_cutoff": args.lambda_cutoff,
        "radial_panels": args.radial_panels,
        "polar_panels": args.polar_panels,
        "reject_branch": args.reject_branch,
    });
    Ok(Document {
        meta: base_meta("selfenergy", units, None, config),
        summary: Some(summary),
        columns: vec![
            "a_re",
            "a_im",
            "b_re",
            "b_im",
            "a_rel_change",
            "b_rel_change",
        ],
        rows,
    })
}

fn run_poles(args: &PolesArgs, units: Units) -> Result<Document, LabError> {
    let m = units.mass_to_natural(args.m);
    let cutoff = args.cutoff.resolve(false)?;
    let poles = pole_search(m, &cutoff, args.a_tilde, args.b_tilde, (args.lo, args.hi))?;

    let rows: Vec<Vec<f64>> = poles
        .iter()
        .map(|p| {
            vec![
                p.x,
                p.p2,
                p.slope,
                if p.status == PoleStatus::Accepted { 1.0 } else { 0.0 },
            ]
        })
        .collect();
    let config = json!({
        "m": args.m,
        "cutoff": args.cutoff.echo(&cutoff),
        "a_tilde": args.a_tilde,
        "b_tilde": args.b_tilde,
        "lo": args.lo,
        "hi": args.hi,
    });
    Ok(Document {
        meta: base_meta("poles", units, None, config),
        summary: None,
        columns: vec!["x", "p2", "slope", "accepted"],
        rows,
    })
}
