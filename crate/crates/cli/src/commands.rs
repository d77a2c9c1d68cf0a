use std::fs;
use std::path::Path;

use anyhow::anyhow;
use gsd3::oracle::{self, GridSpec, NamedState};
use gsd3::report::{self, DecompositionReport, Num};
use gsd3::scan::{self, ScanSummary};
use gsd3::w_family::{self, WParams, WSolutionKind};
use gsd3::{Complex64, Error, PureState3Q, Qubit, SolverConfig};

use crate::{Format, SolverArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_CHECK_FAILED: u8 = 3;

/// Normalization slack for hand-typed coefficient tuples.
const VERIFY_NORM_TOL: f64 = 1e-5;
/// Allowed gap between the oracle and the solver.
const ORACLE_GAP_TOL: f64 = 1e-6;
const BOUND_TOL: f64 = 1e-10;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn malformed(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_MALFORMED, error: anyhow!(msg.into()) }
    }

    fn io(e: std::io::Error, what: &str, path: &Path) -> Self {
        Failure { code: EXIT_FAILURE, error: anyhow!(e).context(format!("{what} {}", path.display())) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_)
            | Error::NotNormalized { .. }
            | Error::ZeroVector
            | Error::InvalidConfig(_)
            | Error::InvalidWParams(_)
            | Error::InvalidCoefficients(_)
            | Error::InvalidGrid(_)
            | Error::UnknownState(_) => EXIT_MALFORMED,
            _ => EXIT_FAILURE,
        };
        Failure { code, error: e.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, Failure> {
    let config = SolverConfig {
        tol_convergence: args.tol,
        n_restarts: args.restarts,
        rng_seed: args.seed,
        ..SolverConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn load(path: &Path) -> Result<report::LoadedState, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(e, "reading", path))?;
    report::parse_state(&bytes).map_err(|e| {
        let mut f = Failure::from(e);
        f.error = f.error.context(format!("in {}", path.display()));
        f
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(e, "writing", path))
}

pub fn decompose(input: &Path, out: Option<&Path>, args: &SolverArgs, format: Format) -> Outcome {
    let config = solver_config(args)?;
    let loaded = load(input)?;
    let d = gsd3::decompose(&loaded.state, &config)?;
    let report = DecompositionReport::new(&loaded, &config, &d);
    let rendered = match format {
        Format::Json => report.to_json()?,
        Format::Text => report.to_text(),
    };
    match out {
        Some(path) => {
            write(path, &rendered)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
        None => print!("{rendered}"),
    }
    Ok(if !d.verdict.overall {
        EXIT_FAILURE
    } else if d.literal_rejected() {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    })
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn verify(coeffs: &[f64], renormalize: bool) -> Outcome {
    let mut c = [0.0; 6];
    c.copy_from_slice(coeffs);
    let n2: f64 = c.iter().map(|x| x * x).sum();
    if (n2 - 1.0).abs() > VERIFY_NORM_TOL {
        if !renormalize || n2 == 0.0 {
            return Err(Failure::malformed(format!(
                "coefficients are not normalized: sum of squares is {n2} (pass --renormalize to rescale)"
            )));
        }
        let n = n2.sqrt();
        c.iter_mut().for_each(|x| *x /= n);
        println!("renormalized: sum of squares was {n2}");
    }
    let [l0, l1, l2, l3, re, im] = c;
    let l4 = Complex64::new(re, im);

    let nonnegative = [l0, l1, l2, l3].iter().all(|&x| x >= 0.0) && l0 > 0.0;
    let largest = l0 >= l1.max(l2).max(l3).max(l4.norm());
    let bound = l0 >= l4.norm() - gsd3::canonical::LAMBDA4_TOL;
    let arg_ok = l4.re >= -gsd3::canonical::LAMBDA4_TOL;
    let residual = gsd3::schmidt_inequality_residual(l0, l1, l2, l3).ok();
    let inequality = residual.is_some_and(|r| r >= -gsd3::canonical::INEQUALITY_TOL);

    println!("{}  normalization          sum of squares {n2}", mark(true));
    println!("{}  lambda0..lambda3 >= 0, lambda0 > 0", mark(nonnegative));
    println!("{}  lambda0 is the largest coefficient", mark(largest));
    println!("{}  lambda0 >= |lambda4|     |lambda4| = {}", mark(bound), l4.norm());
    println!(
        "{}  Arg(lambda4) in [-pi/2, pi/2]   Arg = {}",
        mark(arg_ok),
        if l4.norm() > 0.0 { l4.arg() } else { 0.0 }
    );
    match residual {
        Some(r) => println!("{}  inequality residual      {r}", mark(inequality)),
        None => println!("{}  inequality residual      undefined for lambda0 <= 0", mark(false)),
    }
    println!("note: these conditions are necessary, not sufficient; only `decompose` decides whether lambda0 is the maximal product overlap");
    Ok(if nonnegative && largest && bound && arg_ok && inequality { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn fmt_triple(t: &gsd3::ProductTriple) -> String {
    let q: Vec<String> = t.u.iter().map(|u| format!("({}, {})", fmt_c(u.a0()), fmt_c(u.a1()))).collect();
    q.join(" x ")
}

fn fmt_c(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => Num(z.re).to_string(),
        (true, false) => format!("{}i", Num(z.im)),
        (false, false) => format!("{}{}{}i", Num(z.re), if z.im < 0.0 { " - " } else { " + " }, Num(z.im.abs())),
    }
}

pub fn wfamily(a: f64, b: f64, c: f64, renormalize: bool, boundary_tol: f64) -> Outcome {
    if ![a, b, c].iter().all(|&x| x > 0.0) {
        return Err(Failure::malformed(format!("a, b, c must be positive, got ({a}, {b}, {c})")));
    }
    let p = if renormalize { WParams::renormalized(a, b, c) } else { WParams::with_tolerance(a, b, c, 1e-9) }
        .map_err(|e| match e {
            Error::InvalidWParams(m) => Failure::malformed(format!("{m}; pass --renormalize to rescale")),
            e => Failure::from(e),
        })?;
    // Work on the exactly normalized copy.
    let p = WParams::renormalized(p.a(), p.b(), p.c())?;
    let cl = w_family::w_classify_with_tolerance(&p, boundary_tol);

    println!("a = {}  b = {}  c = {}", p.a(), p.b(), p.c());
    println!("r_a = {}  r_b = {}  r_c = {}", Num(p.r_a()), Num(p.r_b()), Num(p.r_c()));
    match p.area() {
        Some(s) => println!("triangle area S = {s}"),
        None => println!("a, b, c violate the triangle inequality"),
    }
    println!("rule {}{}", cl.rule, if cl.boundary { " (boundary: the special solution meets a trivial one)" } else { "" });
    let nearest = [p.r_a(), p.r_b(), p.r_c()].iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min);
    if !cl.boundary && nearest < 1e-4 {
        println!("note: min |r| = {} is within 1e-4 of a boundary; raise --boundary-tol to treat it as one", Num(nearest));
    }
    println!("lambda0 = {}", cl.lambda0);

    println!("stationary solutions:");
    for s in w_family::w_stationary_solutions(&p) {
        let label = match s.kind {
            WSolutionKind::Trivial(k) => format!("trivial {k}"),
            WSolutionKind::Special => "special".to_string(),
        };
        println!("  {label:<10} lambda = {}  {}", s.lambda, fmt_triple(&s.triple));
    }

    let coeff = w_family::w_canonical_coefficients(&p);
    println!(
        "canonical coefficients: lambda0 = {}, lambda1 = {}, lambda2 = {}, lambda3 = {}, lambda4 = {}",
        coeff.lambda0,
        coeff.lambda1,
        coeff.lambda2,
        coeff.lambda3,
        fmt_c(coeff.lambda4)
    );
    if let Ok(r) = w_family::triangle_residual(&p) {
        println!("triangle inequality residual = {}", Num(r));
    }

    let (numeric, _) = gsd3::maximal_product_overlap(&w_family::w_state(&p), &SolverConfig::default())?;
    println!("numerical lambda0 = {numeric}  (gap {:e})", (numeric - cl.lambda0).abs());
    Ok(EXIT_OK)
}

pub fn scan(n: usize, seed: u64, out: &Path, restarts: usize) -> Outcome {
    let config = SolverConfig { n_restarts: restarts, rng_seed: seed, ..SolverConfig::default() };
    let result = scan::scan_ensemble(n, seed, &config)?;
    write(out, &report::scan_to_ndjson(&result, &config)?)?;
    let summary = ScanSummary::from_result(&result);

    println!("states        {} ({} failed)", summary.records, summary.failures);
    match summary.min_lambda0_sq_seed {
        Some(s) => println!("min lambda0^2 {} (seed {s}; 4/9 = {})", summary.min_lambda0_sq, 4.0 / 9.0),
        None => println!("min lambda0^2 n/a"),
    }
    println!("mean lambda0^2 {}", summary.mean_lambda0_sq);
    println!("violations    {}", summary.violations);
    for (name, key) in [("GHZ corner", scan::GHZ_CORNER), ("W corner", scan::W_CORNER)] {
        match (summary.bin(key), summary.nearest_bin(key)) {
            (Some(b), _) => println!("{name:<13} bin {key:?}: {} states, max |lambda4|/lambda0 = {}", b.count, b.max_lambda4_ratio),
            (None, Some(b)) => println!(
                "{name:<13} bin {key:?}: empty; nearest populated bin {:?}: {} states, max |lambda4|/lambda0 = {}",
                b.bin, b.count, b.max_lambda4_ratio
            ),
            (None, None) => println!("{name:<13} bin {key:?}: empty"),
        }
    }
    println!("non-empty bins {} of width {}", summary.bins.len(), scan::BIN_WIDTH);
    println!("dataset       {}", out.display());
    Ok(EXIT_OK)
}

pub fn oracle(input: &Path, grid: GridSpec, args: &SolverArgs) -> Outcome {
    let config = solver_config(args)?;
    grid.validate()?;
    let loaded = load(input)?;
    let state = &loaded.state;
    let estimate = oracle::brute_force_overlap(state, &grid)?;
    let (solver, _) = gsd3::maximal_product_overlap(state, &config)?;
    let gap = (estimate.lambda - solver).abs();

    println!("oracle lambda0   {}  (grid {}x{}, {} refinement sweeps)", estimate.lambda, grid.n_theta, grid.n_phi, grid.refine_iters);
    println!("solver lambda0   {solver}");
    println!("gap              {gap:e}");
    let mut min_bound = f64::INFINITY;
    for k in Qubit::ALL {
        let b = oracle::reduced_density_bound(state, k);
        min_bound = min_bound.min(b);
        println!("reduced bound {}  {b}", k.label());
    }
    let sq = solver * solver;
    println!("lambda0^2        {sq}  (<= {min_bound})");
    if is_named(state, NamedState::PsiContr) {
        println!(
            "certified interval for lambda0^2: [{}, {}]",
            oracle::PSI_CONTR_LOWER_SQ,
            oracle::psi_contr_upper_sq()
        );
        println!(
            "discrepancy: the often-quoted value (14+3*sqrt(2))/22 = {} exceeds the reduced-density bound",
            oracle::psi_contr_quoted_sq()
        );
    }
    let ok = gap <= ORACLE_GAP_TOL && sq <= min_bound + BOUND_TOL;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn is_named(state: &PureState3Q, name: NamedState) -> bool {
    state.fidelity(&name.state()) > 1.0 - 1e-12
}

pub fn state(name: &str, out: Option<&Path>) -> Outcome {
    let state = oracle::named_state(name)?;
    let text = report::state_to_json(&state)?;
    match out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}
