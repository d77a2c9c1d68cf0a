//! State files, decomposition reports and scan datasets.
//!
//! Every float is written as `{:.16e}` (17 significant digits) so that files
//! round-trip bit-for-bit.

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::canonical::{CanonicalForm, GsdVerdict};
use crate::config::SolverConfig;
use crate::decompose::{Decomposition, Residuals};
use crate::error::{Error, Result};
use crate::scan::{ScanFailure, ScanRecord, ScanResult};
use crate::solver::PointKind;
use crate::state::{ProductTriple, PureState3Q, RENORM_WARN};

/// JSON formatter writing floats with 17 significant digits.
pub struct PreciseFormatter<F>(F);

impl<F> PreciseFormatter<F> {
    pub fn new(inner: F) -> Self {
        PreciseFormatter(inner)
    }
}

impl PreciseFormatter<PrettyFormatter<'static>> {
    pub fn pretty() -> Self {
        PreciseFormatter(PrettyFormatter::new())
    }
}

impl PreciseFormatter<CompactFormatter> {
    pub fn compact() -> Self {
        PreciseFormatter(CompactFormatter)
    }
}

impl<F: Formatter> Formatter for PreciseFormatter<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

fn to_string_with<T: Serialize + ?Sized, F: Formatter>(value: &T, formatter: F) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Indented JSON with precise floats.
pub fn to_pretty_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    to_string_with(value, PreciseFormatter::pretty())
}

/// Single-line JSON with precise floats.
pub fn to_compact_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    to_string_with(value, PreciseFormatter::compact())
}

/// `[re, im]`.
pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn triple_pairs(t: &ProductTriple) -> [[Pair; 2]; 3] {
    t.u.map(|q| q.components().map(pair))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct StateFile {
    pub amplitudes: Vec<Pair>,
}

impl StateFile {
    pub fn from_state(state: &PureState3Q) -> Self {
        StateFile { amplitudes: state.amplitudes().iter().map(|&z| pair(z)).collect() }
    }
}

/// A state read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedState {
    pub state: PureState3Q,
    /// Norm of the amplitudes as written.
    pub input_norm: f64,
    /// `sha256:` followed by the hex digest of the raw bytes.
    pub digest: String,
    pub warnings: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn number(v: &Value, field: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Malformed(format!("field `{field}` must be a finite number, got {v}")))
}

/// Parses a state document, renormalizing with a warning when needed.
pub fn parse_state(bytes: &[u8]) -> Result<LoadedState> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| Error::Malformed(format!("not a JSON document: {e}")))?;
    let amps = doc
        .get("amplitudes")
        .ok_or_else(|| Error::Malformed("missing field `amplitudes`".to_string()))?
        .as_array()
        .ok_or_else(|| Error::Malformed("field `amplitudes` must be an array".to_string()))?;
    if amps.len() != 8 {
        return Err(Error::Malformed(format!("field `amplitudes` must have 8 entries, found {}", amps.len())));
    }
    let mut amp = [Complex64::new(0.0, 0.0); 8];
    for (i, entry) in amps.iter().enumerate() {
        let parts = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Malformed(format!("field `amplitudes[{i}]` must be a [re, im] pair")))?;
        amp[i] = Complex64::new(
            number(&parts[0], &format!("amplitudes[{i}][0]"))?,
            number(&parts[1], &format!("amplitudes[{i}][1]"))?,
        );
    }
    // Unit-norm input is kept as written, so that files round-trip exactly.
    let (state, input_norm) = match PureState3Q::new(amp) {
        Ok(s) => (s, amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()),
        Err(_) => PureState3Q::normalized(amp)
            .map_err(|_| Error::Malformed("field `amplitudes` is the zero vector".to_string()))?,
    };
    let mut warnings = Vec::new();
    if (input_norm * input_norm - 1.0).abs() > RENORM_WARN {
        warnings.push(format!("input renormalized: squared norm was {:.16e}", input_norm * input_norm));
    }
    Ok(LoadedState { state, input_norm, digest: digest(bytes), warnings })
}

pub fn read_state(path: &std::path::Path) -> Result<LoadedState> {
    parse_state(&std::fs::read(path)?)
}

pub fn state_to_json(state: &PureState3Q) -> Result<String> {
    let mut s = to_pretty_json(&StateFile::from_state(state))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PointReport {
    /// Per qubit, the two components as `[re, im]`.
    pub triple: [[Pair; 2]; 3],
    pub lambda: f64,
    pub residual: f64,
    pub a_eigenvalues: Option<[f64; 3]>,
    pub kind: PointKind,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
pub struct FormReport {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: Pair,
    pub basis_u: [[Pair; 2]; 3],
    pub basis_v: [[Pair; 2]; 3],
}

impl FormReport {
    pub fn new(cf: &CanonicalForm) -> Self {
        FormReport {
            lambda0: cf.lambda0,
            lambda1: cf.lambda1,
            lambda2: cf.lambda2,
            lambda3: cf.lambda3,
            lambda4: pair(cf.lambda4),
            basis_u: triple_pairs(&cf.basis_u),
            basis_v: triple_pairs(&cf.basis_v),
        }
    }

    /// Rebuilds the state the form describes.
    pub fn reconstruct(&self) -> Result<PureState3Q> {
        let triple = |t: &[[Pair; 2]; 3]| -> Result<ProductTriple> {
            let mut u = [crate::state::QubitVector::ZERO_KET; 3];
            for (k, q) in t.iter().enumerate() {
                u[k] = crate::state::QubitVector::normalized(
                    Complex64::new(q[0][0], q[0][1]),
                    Complex64::new(q[1][0], q[1][1]),
                )?;
            }
            Ok(ProductTriple { u })
        };
        let (bu, bv) = (triple(&self.basis_u)?, triple(&self.basis_v)?);
        let coefficients = [
            Complex64::new(self.lambda0, 0.0),
            Complex64::new(self.lambda1, 0.0),
            Complex64::new(self.lambda2, 0.0),
            Complex64::new(self.lambda3, 0.0),
            Complex64::new(self.lambda4[0], self.lambda4[1]),
        ];
        let mut amp = [Complex64::new(0.0, 0.0); 8];
        for (pattern, c) in [0b000, 0b011, 0b101, 0b110, 0b111].into_iter().zip(coefficients) {
            let mut ket = bu;
            for k in 0..3 {
                if pattern & (4 >> k) != 0 {
                    ket.u[k] = bv.u[k];
                }
            }
            for (a, b) in amp.iter_mut().zip(ket.amplitudes()) {
                *a += c * b;
            }
        }
        Ok(PureState3Q::normalized(amp)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SearchReport {
    pub attempted: usize,
    pub converged: usize,
    pub discarded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LiteralReport {
    pub form: FormReport,
    pub verdicts: GsdVerdict,
    pub schmidt_inequality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecompositionReport {
    pub input_digest: String,
    pub input_norm: f64,
    pub config: SolverConfig,
    pub search: SearchReport,
    pub stationary_points: Vec<PointReport>,
    pub gsd: FormReport,
    pub verdicts: GsdVerdict,
    pub residuals: Residuals,
    /// The computational-basis form, when `|000⟩` is stationary.
    pub literal: Option<LiteralReport>,
    pub warnings: Vec<String>,
}

impl DecompositionReport {
    pub fn new(loaded: &LoadedState, config: &SolverConfig, d: &Decomposition) -> Self {
        let mut warnings = loaded.warnings.clone();
        warnings.extend(d.warnings.iter().cloned());
        DecompositionReport {
            input_digest: loaded.digest.clone(),
            input_norm: loaded.input_norm,
            config: *config,
            search: SearchReport {
                attempted: d.search.attempted,
                converged: d.search.converged,
                discarded: d.search.discarded,
            },
            stationary_points: d
                .search
                .points
                .iter()
                .map(|p| PointReport {
                    triple: triple_pairs(&p.triple),
                    lambda: p.lambda,
                    residual: p.residual,
                    a_eigenvalues: p.a_eigenvalues,
                    kind: p.kind,
                })
                .collect(),
            gsd: FormReport::new(&d.gsd),
            verdicts: d.verdict,
            residuals: d.residuals,
            literal: d.literal.map(|l| LiteralReport {
                form: FormReport::new(&l.form),
                verdicts: l.verdict,
                schmidt_inequality: l.schmidt_inequality,
            }),
            warnings,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = to_pretty_json(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Human-readable rendering; values are the shortest strings that parse
    /// back to the JSON floats.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "input      {}  (norm {})", self.input_digest, Num(self.input_norm));
        let _ = writeln!(
            out,
            "config     restarts={} seed={} tol_convergence={:e} tol_match={:e} max_sweeps={}",
            c.n_restarts, c.rng_seed, c.tol_convergence, c.tol_match, c.max_sweeps
        );
        let _ = writeln!(
            out,
            "search     {} attempted, {} converged, {} discarded",
            self.search.attempted, self.search.converged, self.search.discarded
        );
        let _ = writeln!(out, "\nstationary points ({})", self.stationary_points.len());
        for (i, p) in self.stationary_points.iter().enumerate() {
            let eig = match p.a_eigenvalues {
                Some(e) => format!("[{}, {}, {}]", Num(e[0]), Num(e[1]), Num(e[2])),
                None => "n/a".to_string(),
            };
            let _ = writeln!(
                out,
                "  #{i:<2} lambda={}  residual={}  kind={:?}  A-eigenvalues={eig}",
                Num(p.lambda), Num(p.residual), p.kind
            );
        }
        let _ = writeln!(out, "\ngeneralized Schmidt decomposition");
        write_form(&mut out, &self.gsd);
        let v = &self.verdicts;
        let _ = writeln!(
            out,
            "\nverdicts   inequality_ok={} lambda4_bound_ok={} global_max_ok={} overall={}",
            v.inequality_ok, v.lambda4_bound_ok, v.global_max_ok, v.overall
        );
        let r = &self.residuals;
        let _ = writeln!(
            out,
            "residuals  schmidt_inequality={} reconstruction_infidelity={} stationarity={}",
            Num(r.schmidt_inequality), Num(r.reconstruction_infidelity), Num(r.stationarity)
        );
        match &self.literal {
            Some(l) => {
                let _ = writeln!(out, "\ncomputational-basis form");
                write_form(&mut out, &l.form);
                let _ = writeln!(
                    out,
                    "  verdicts inequality_ok={} lambda4_bound_ok={} global_max_ok={} overall={}",
                    l.verdicts.inequality_ok, l.verdicts.lambda4_bound_ok, l.verdicts.global_max_ok, l.verdicts.overall
                );
                if let Some(s) = l.schmidt_inequality {
                    let _ = writeln!(out, "  schmidt_inequality={}", Num(s));
                }
            }
            None => {
                let _ = writeln!(out, "\ncomputational-basis form: |000> is not stationary");
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(out, "\nwarnings");
            for w in &self.warnings {
                let _ = writeln!(out, "  - {w}");
            }
        }
        out
    }
}

fn write_form(out: &mut String, f: &FormReport) {
    let _ = writeln!(out, "  lambda0 = {}", Num(f.lambda0));
    let _ = writeln!(out, "  lambda1 = {}", Num(f.lambda1));
    let _ = writeln!(out, "  lambda2 = {}", Num(f.lambda2));
    let _ = writeln!(out, "  lambda3 = {}", Num(f.lambda3));
    let _ = writeln!(out, "  lambda4 = {} + {}i", Num(f.lambda4[0]), Num(f.lambda4[1]));
    for (name, basis) in [("u", &f.basis_u), ("v", &f.basis_v)] {
        for (k, q) in basis.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {name}{} = ({} + {}i, {} + {}i)",
                k + 1,
                Num(q[0][0]),
                Num(q[0][1]),
                Num(q[1][0]),
                Num(q[1][1])
            );
        }
    }
}

/// Shortest round-trip form, in exponent notation when small or large.
pub struct Num(pub f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.0.abs();
        if a != 0.0 && !(1e-4..1e16).contains(&a) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(serde::Serialize)]
struct ScanLine<'a> {
    #[serde(flatten)]
    record: &'a ScanRecord,
    #[serde(flatten)]
    config: &'a SolverConfig,
}

#[derive(serde::Serialize)]
struct FailureLine<'a> {
    #[serde(flatten)]
    failure: &'a ScanFailure,
    #[serde(flatten)]
    config: &'a SolverConfig,
}

/// Newline-delimited dataset in seed order. Columns: `state_seed, lambda0,
/// lambda1, lambda2, lambda3, lambda4_abs, lambda4_arg, inequality_residual`,
/// then the config echo. Failed seeds carry `message` instead of coefficients.
pub fn scan_to_ndjson(result: &ScanResult, config: &SolverConfig) -> Result<String> {
    let mut lines: Vec<(u64, String)> = Vec::with_capacity(result.records.len() + result.failures.len());
    for record in &result.records {
        lines.push((record.state_seed, to_compact_json(&ScanLine { record, config })?));
    }
    for failure in &result.failures {
        lines.push((failure.state_seed, to_compact_json(&FailureLine { failure, config })?));
    }
    lines.sort_by_key(|(seed, _)| *seed);
    let mut out = String::new();
    for (_, line) in lines {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::oracle::{haar_random_state, NamedState};

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_compact_json(&[2.0f64 / 3.0, 0.0, -1e-300, f64::NAN]).unwrap();
        assert_eq!(s, "[6.6666666666666663e-1,0.0000000000000000e0,-1.0000000000000000e-300,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(2.0 / 3.0));
    }

    #[test]
    fn state_file_round_trip() {
        let s = haar_random_state(5);
        let text = state_to_json(&s).unwrap();
        let loaded = parse_state(text.as_bytes()).unwrap();
        assert_eq!(loaded.state, s);
        assert!(loaded.warnings.is_empty());
        assert!(loaded.digest.starts_with("sha256:") && loaded.digest.len() == 71);
    }

    #[test]
    fn unnormalized_input_warns() {
        let doc = r#"{"amplitudes": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#;
        let loaded = parse_state(doc.as_bytes()).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!((loaded.input_norm - 2f64.sqrt()).abs() < 1e-15);
        assert!((loaded.state.amplitudes()[7].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        let cases = [
            (r#"{"amplitudes": [[1,0],[0,0]"#, "JSON"),
            (r#"{"amps": []}"#, "`amplitudes`"),
            (r#"{"amplitudes": [[1,0]]}"#, "8 entries"),
            (r#"{"amplitudes": [[1,0],[0,0],[0,0],[0],[0,0],[0,0],[0,0],[0,0]]}"#, "amplitudes[3]"),
            (r#"{"amplitudes": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,"x"],[0,0],[0,0]]}"#, "amplitudes[5][1]"),
            (r#"{"amplitudes": [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#, "zero"),
        ];
        for (doc, needle) in cases {
            match parse_state(doc.as_bytes()) {
                Err(Error::Malformed(m)) => assert!(m.contains(needle), "{m}"),
                other => panic!("{doc}: {other:?}"),
            }
        }
    }

    #[test]
    fn report_gsd_block_round_trips() {
        let state = NamedState::PsiContr.state();
        let text = state_to_json(&state).unwrap();
        let loaded = parse_state(text.as_bytes()).unwrap();
        let config = SolverConfig::default();
        let d = decompose(&loaded.state, &config).unwrap();
        let report = DecompositionReport::new(&loaded, &config, &d);
        let json = report.to_json().unwrap();
        let value: Value = serde_json::from_str(&json).unwrap();
        let gsd: FormReport = serde_json::from_value(value["gsd"].clone()).unwrap();
        assert_eq!(gsd, report.gsd);
        assert!(gsd.reconstruct().unwrap().fidelity(&state) > 1.0 - 1e-12);
        assert_eq!(value["literal"]["verdicts"]["global_max_ok"], Value::Bool(false));
        assert!(report.to_text().contains(&format!("lambda0 = {}", report.gsd.lambda0)));
        assert_eq!(Num(-6.7e-17).to_string(), "-6.7e-17");
        assert_eq!(Num(0.25).to_string(), "0.25");
    }

    #[test]
    fn scan_lines_are_flat() {
        let config = SolverConfig::default();
        let result = crate::scan::scan_ensemble(3, 9, &config).unwrap();
        let nd = scan_to_ndjson(&result, &config).unwrap();
        let lines: Vec<&str> = nd.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("{\"state_seed\":9,\"lambda0\":"));
        let v: Value = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(v["state_seed"], 11);
        assert_eq!(v["n_restarts"], 64);
    }
}
