//! The `ncert` command line: argument parsing, dispatch to the library and
//! JSON reports.
//!
//! Every report embeds the resolved configuration, so a report alone is
//! enough to rerun a command. Exit codes: 0 on success, 2 when the answer is
//! negative or inconclusive (not certified, distinguished, not positive,
//! not verified), 1 on usage or input errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evalnum::{
    eval_expr, sample_domain, test_equivalence, DomainSpec, ExtendedPoint, MatrixPoint, PointJson, Verdict,
    DEFAULT_COND_CAP,
};
use crate::freealg::{LinearPencil, MatPoly, PencilJson};
use crate::lift::{build_hat, build_mr, build_o, closure_cr, estimate_d, probe_points};
use crate::linalg::{self, json::to_json};
use crate::rexpr::{inversion_count, parse};
use crate::sos::{
    certify_pencil_rational, certify_polynomial, certify_rational_assembled, check_positivity, verify_certificate,
    Certificate, CertificateJson, CertifyOptions, Pipeline, RationalCertificate,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ncert", version, about = "Positivity certificates for noncommutative rational expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an expression and print its normal form.
    Parse {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate an expression at a point (read from a file or sampled).
    Eval {
        expr: String,
        /// Point file `{"n": .., "X": [...], "U": [...]}`.
        #[arg(long)]
        point: Option<PathBuf>,
        /// Size of the sampled point when no file is given.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized equivalence test on the common domain.
    Equiv {
        left: String,
        right: String,
        /// Matrix sizes to try.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Draw points from a domain.
    SampleDomain {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Lift inverses to fresh letters and build the generator sets.
    Lift {
        expr: String,
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a positivity certificate.
    Certify {
        expr: String,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long = "delta-max", default_value_t = 3)]
        delta_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check a certificate file by symbolic expansion.
    Verify {
        certificate: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = crate::sos::ACCEPT_TOL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest sampled eigenvalue of an expression on a domain.
    CheckPos {
        expr: String,
        #[command(flatten)]
        domain: DomainArgs,
        /// Largest matrix size sampled.
        #[arg(long, default_value_t = 3)]
        sizes: usize,
        /// Samples per size.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Clone)]
struct DomainArgs {
    /// Domain generator (repeatable).
    #[arg(long = "P", value_name = "POLY")]
    p: Vec<String>,
    /// Monic pencil file `{"A0": matrix, "Ai": [matrix, ...]}`.
    #[arg(long)]
    pencil: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
struct Common {
    /// Print the JSON report instead of a summary.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report to a file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// The fully resolved configuration of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(rename = "P")]
    pub p: Vec<String>,
    pub pencil: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySettings>,
    pub json: bool,
    pub out: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifySettings {
    pub solver_tol: f64,
    pub accept_tol: f64,
    pub max_size: usize,
    pub per_size: usize,
    pub verify_samples: usize,
    pub safety: f64,
    pub doublings: usize,
}

impl From<&CertifyOptions> for CertifySettings {
    fn from(o: &CertifyOptions) -> Self {
        CertifySettings {
            solver_tol: o.solver_tol,
            accept_tol: o.accept_tol,
            max_size: o.max_size,
            per_size: o.per_size,
            verify_samples: o.verify_samples,
            safety: o.safety,
            doublings: o.doublings,
        }
    }
}

/// Exit code, JSON report and human-readable summary of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub code: i32,
    pub report: Value,
    pub summary: String,
    pub json: bool,
    pub out: Option<PathBuf>,
}

impl RunOutput {
    /// What goes to stdout.
    pub fn stdout(&self) -> String {
        if self.json {
            self.report_text()
        } else {
            self.summary.clone()
        }
    }

    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            return RunOutput {
                code,
                report: json!({ "error": { "kind": "usage", "message": e.to_string() } }),
                summary: e.to_string(),
                json: false,
                out: None,
            };
        }
    };
    let (config, common) = resolve(&cli.command);
    let result = dispatch(&cli.command, &config);
    let (code, mut report, summary) = match result {
        Ok((code, report, summary)) => (code, report, summary),
        Err(e) => {
            let code = match e {
                Error::NotCertified { .. } => EXIT_NEGATIVE,
                _ => EXIT_ERROR,
            };
            let summary = format!("error: {e}\n");
            (code, json!({ "error": error_json(&e) }), summary)
        }
    };
    report
        .as_object_mut()
        .expect("reports are objects")
        .insert("config".into(), serde_json::to_value(&config).expect("config serializes"));
    report.as_object_mut().expect("reports are objects").insert("exit_code".into(), json!(code));
    RunOutput { code, report, summary, json: common.json, out: common.out }
}

fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::Syntax { .. } => "syntax",
        Error::Arity(_) => "arity",
        Error::ShapeMismatch(_) => "shape-mismatch",
        Error::NotPolynomial(_) => "not-polynomial",
        Error::NotInDomain { .. } => "not-in-domain",
        Error::SamplingExhausted { .. } => "sampling-exhausted",
        Error::NoCommonPoints => "no-common-points",
        Error::ClosureOverflow { .. } => "closure-overflow",
        Error::DegreeTooSmall { .. } => "degree-too-small",
        Error::NotCertified { .. } => "not-certified",
        Error::NonMonicPencil { .. } => "non-monic-pencil",
        Error::NotHermitian(_) => "not-hermitian",
        Error::NotArchimedean(_) => "not-archimedean",
        Error::SolverStalled { .. } => "solver-stalled",
        Error::Invalid(_) => "invalid",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
    };
    let mut v = json!({ "kind": kind, "message": e.to_string() });
    if let Error::NotCertified { margins, .. } = e {
        v["margins"] = json!(margins.iter().map(|(d, m)| json!({ "delta": d, "margin": m })).collect::<Vec<_>>());
    }
    v
}

fn resolve(cmd: &Command) -> (RunConfig, Common) {
    let mut cfg = RunConfig::default();
    let domain = |cfg: &mut RunConfig, d: &DomainArgs| {
        cfg.p = d.p.clone();
        cfg.pencil = d.pencil.as_ref().map(|p| p.display().to_string());
    };
    let common = match cmd {
        Command::Parse { expr, common } => {
            cfg.command = "parse".into();
            cfg.inputs = vec![expr.clone()];
            common
        }
        Command::Eval { expr, point, n, domain: d, common } => {
            cfg.command = "eval".into();
            cfg.inputs = vec![expr.clone()];
            cfg.inputs.extend(point.as_ref().map(|p| p.display().to_string()));
            if point.is_none() {
                cfg.sizes = Some(vec![*n]);
            }
            domain(&mut cfg, d);
            common
        }
        Command::Equiv { left, right, sizes, trials, tol, common } => {
            cfg.command = "equiv".into();
            cfg.inputs = vec![left.clone(), right.clone()];
            cfg.sizes = Some(sizes.clone());
            cfg.trials = Some(*trials);
            cfg.tol = Some(*tol);
            common
        }
        Command::SampleDomain { domain: d, n, count, common } => {
            cfg.command = "sample-domain".into();
            cfg.sizes = Some(vec![*n]);
            cfg.count = Some(*count);
            domain(&mut cfg, d);
            common
        }
        Command::Lift { expr, domain: d, common } => {
            cfg.command = "lift".into();
            cfg.inputs = vec![expr.clone()];
            domain(&mut cfg, d);
            common
        }
        Command::Certify { expr, domain: d, delta_max, common } => {
            cfg.command = "certify".into();
            cfg.inputs = vec![expr.clone()];
            cfg.delta_max = Some(*delta_max);
            let opts = CertifyOptions { delta_max: *delta_max, seed: common.seed, ..CertifyOptions::default() };
            cfg.certify = Some((&opts).into());
            domain(&mut cfg, d);
            common
        }
        Command::Verify { certificate, domain: d, tol, common } => {
            cfg.command = "verify".into();
            cfg.inputs = vec![certificate.display().to_string()];
            cfg.tol = Some(*tol);
            domain(&mut cfg, d);
            common
        }
        Command::CheckPos { expr, domain: d, sizes, count, common } => {
            cfg.command = "check-pos".into();
            cfg.inputs = vec![expr.clone()];
            cfg.sizes = Some((1..=*sizes).collect());
            cfg.count = Some(*count);
            domain(&mut cfg, d);
            common
        }
    };
    cfg.seed = common.seed;
    cfg.json = common.json;
    cfg.out = common.out.as_ref().map(|p| p.display().to_string());
    (cfg, common.clone())
}

type Dispatch = Result<(i32, Value, String)>;

enum Domain {
    Polys(Vec<MatPoly>),
    Pencil(LinearPencil),
}

impl Domain {
    fn spec(&self) -> Result<DomainSpec> {
        match self {
            Domain::Polys(ps) => DomainSpec::poly_list(ps.clone()),
            Domain::Pencil(l) => Ok(DomainSpec::pencil(l.clone())),
        }
    }
}

fn read_domain(cfg: &RunConfig) -> Result<Option<Domain>> {
    match (&cfg.pencil, cfg.p.is_empty()) {
        (Some(_), false) => Err(Error::Invalid("give either --P or --pencil, not both".into())),
        (Some(path), true) => {
            let j: PencilJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            Ok(Some(Domain::Pencil(LinearPencil::try_from(j)?)))
        }
        (None, false) => {
            let ps = cfg.p.iter().map(|s| parse(s)?.to_matpoly()).collect::<Result<Vec<_>>>()?;
            Ok(Some(Domain::Polys(ps)))
        }
        (None, true) => Ok(None),
    }
}

fn require_domain(cfg: &RunConfig) -> Result<Domain> {
    read_domain(cfg)?.ok_or_else(|| Error::Invalid("a domain is required: --P POLY (repeatable) or --pencil FILE".into()))
}

fn matrix_json(m: &linalg::CMat) -> Value {
    json!(to_json(m))
}

fn point_json(p: &MatrixPoint) -> Value {
    serde_json::to_value(PointJson::from(p)).expect("points serialize")
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Dispatch {
    match cmd {
        Command::Parse { expr, .. } => cmd_parse(expr),
        Command::Eval { expr, point, n, .. } => cmd_eval(expr, point.as_ref(), *n, cfg),
        Command::Equiv { left, right, sizes, trials, tol, .. } => cmd_equiv(left, right, sizes, *trials, *tol, cfg),
        Command::SampleDomain { n, count, .. } => {
            let dom = require_domain(cfg)?.spec()?;
            let pts = sample_domain(&dom, *n, *count, cfg.seed)?;
            let summary = format!("{} points of size {n}\n", pts.len());
            Ok((EXIT_OK, json!({ "points": pts.iter().map(point_json).collect::<Vec<_>>() }), summary))
        }
        Command::Lift { expr, .. } => cmd_lift(expr, cfg),
        Command::Certify { expr, delta_max, .. } => cmd_certify(expr, *delta_max, cfg),
        Command::Verify { certificate, tol, .. } => cmd_verify(certificate, *tol, cfg),
        Command::CheckPos { expr, sizes, count, .. } => {
            let e = parse(expr)?;
            let dom = require_domain(cfg)?.spec()?;
            let r = check_positivity(&e, &dom, *sizes, *count, cfg.seed)?;
            let positive = r.min_eigenvalue >= -POSITIVITY_TOL;
            let report = json!({
                "min_eigenvalue": r.min_eigenvalue,
                "samples": r.samples,
                "witness": point_json(&r.witness),
                "nonnegative": positive,
            });
            let summary = format!(
                "min eigenvalue {} over {} samples{}\n",
                r.min_eigenvalue,
                r.samples,
                if positive { "" } else { " (negative)" }
            );
            Ok((if positive { EXIT_OK } else { EXIT_NEGATIVE }, report, summary))
        }
    }
}

/// Sampled eigenvalues above `-POSITIVITY_TOL` count as nonnegative.
const POSITIVITY_TOL: f64 = 1e-9;

fn cmd_parse(expr: &str) -> Dispatch {
    let e = parse(expr)?;
    let poly = e.to_matpoly().ok().map(|p| p.to_string());
    let report = json!({
        "expr": e.to_string(),
        "shape": [e.rows(), e.cols()],
        "x_arity": e.x_arity(),
        "u_arity": e.u_arity(),
        "inversions": inversion_count(&e),
        "polynomial": poly,
    });
    Ok((EXIT_OK, report, format!("{e}\n")))
}

fn cmd_eval(expr: &str, point: Option<&PathBuf>, n: usize, cfg: &RunConfig) -> Dispatch {
    let e = parse(expr)?;
    let p: ExtendedPoint = match point {
        Some(path) => {
            let j: PointJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            ExtendedPoint::try_from(&j)?
        }
        None => {
            let dom = match read_domain(cfg)? {
                Some(d) => d.spec()?,
                None => {
                    // the unit box in every variable the expression uses
                    let d = e.x_arity().max(1);
                    let ps = (1..=d).map(|i| parse(&format!("1 - x{i}^2"))?.to_matpoly()).collect::<Result<_>>()?;
                    DomainSpec::poly_list(ps)?
                }
            };
            sample_domain(&dom, n, 1, cfg.seed)?.remove(0).into()
        }
    };
    let v = eval_expr(&e, &p, DEFAULT_COND_CAP)?;
    let hermitian = linalg::hermitian_defect(&v) <= 1e-10;
    let min_eig = hermitian.then(|| linalg::min_eigenvalue(&v));
    let report = json!({
        "expr": e.to_string(),
        "point": serde_json::to_value(PointJson::from(&p)).expect("points serialize"),
        "value": matrix_json(&v),
        "hermitian": hermitian,
        "min_eigenvalue": min_eig,
    });
    let summary = format!("{}x{} value, hermitian: {hermitian}\n", v.nrows(), v.ncols());
    Ok((EXIT_OK, report, summary))
}

fn cmd_equiv(left: &str, right: &str, sizes: &[usize], trials: usize, tol: f64, cfg: &RunConfig) -> Dispatch {
    let (a, b) = (parse(left)?, parse(right)?);
    let r = test_equivalence(&a, &b, sizes, trials, tol, cfg.seed)?;
    let per_size: Vec<Value> = r
        .per_size
        .iter()
        .map(|s| {
            json!({
                "n": s.n,
                "trials": s.trials,
                "evaluated": s.evaluated,
                "distinguishing": s.distinguishing,
                "max_deviation": s.max_deviation,
            })
        })
        .collect();
    let (code, verdict, witness) = match &r.verdict {
        Verdict::EquivalentSoFar => (EXIT_OK, "equivalent-so-far", Value::Null),
        Verdict::Distinguished { witness, deviation } => (
            EXIT_NEGATIVE,
            "distinguished",
            json!({ "point": point_json(witness), "deviation": deviation }),
        ),
    };
    let report = json!({ "verdict": verdict, "witness": witness, "per_size": per_size });
    Ok((code, report, format!("{verdict}\n")))
}

fn cmd_lift(expr: &str, cfg: &RunConfig) -> Dispatch {
    let e = parse(expr)?;
    let lift = build_hat(&e)?;
    let closure = closure_cr(&e)?;
    let mr = build_mr(&closure)?;
    let mut report = json!({
        "hat_q": lift.hat_q.to_string(),
        "letters": lift.g_list.iter().enumerate().map(|(j, g)| json!({
            "u": format!("u{}", j + 1),
            "g": g.to_string(),
            "inverse_of": lift.inverses[j].to_string(),
        })).collect::<Vec<_>>(),
        "closure_size": closure.cr.len(),
        "relations": mr.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
    });
    if let Some(Domain::Polys(ps)) = read_domain(cfg)? {
        let dom = DomainSpec::poly_list(ps.clone())?;
        let d_x = e.x_arity().max(dom.arity() as u32) as usize;
        let opts = CertifyOptions::default();
        let points = probe_points(&dom, d_x, opts.max_size, opts.per_size, cfg.seed)?;
        let d = (0..lift.u_arity)
            .map(|j| estimate_d(&lift, j, &points, opts.safety).map(|est| est.d))
            .collect::<Result<Vec<f64>>>()?;
        let o = build_o(&ps, &lift, &d)?;
        report["D"] = json!(d);
        report["augmented"] = json!(o
            .elements
            .iter()
            .map(|(t, p)| json!({ "role": t.label(), "poly": p.to_string() }))
            .collect::<Vec<_>>());
    }
    let summary = format!("hat q = {}\n{} relation(s)\n", lift.hat_q, mr.len());
    Ok((EXIT_OK, report, summary))
}

fn certificate_value(c: &Certificate) -> Value {
    serde_json::to_value(c.to_json()).expect("certificates serialize")
}

fn rational_value(c: &RationalCertificate) -> Value {
    json!({
        "target": c.target.to_string(),
        "generators": c.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "sos": c.sos.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "weighted": c.weighted.iter().map(|(g, r)| json!({ "gen": g, "r": r.to_string() })).collect::<Vec<_>>(),
        "dropped_relations": c.dropped_relations,
        "relation_defect": c.relation_defect,
        "caps": c.caps.iter().map(|(j, d, cc)| json!({
            "u": format!("u{}", j + 1),
            "D": d,
            "certificate": rational_value(cc),
        })).collect::<Vec<_>>(),
        "residual": c.residual,
        "samples": c.samples,
    })
}

fn cmd_certify(expr: &str, delta_max: usize, cfg: &RunConfig) -> Dispatch {
    let e = parse(expr)?;
    let domain = require_domain(cfg)?;
    let opts = CertifyOptions { delta_max, seed: cfg.seed, ..CertifyOptions::default() };
    let attempt = match &domain {
        Domain::Pencil(l) => certify_pencil_rational(&e, l, &opts).map(|out| {
            let report = json!({
                "certified": true,
                "certificate": certificate_value(&out.certificate),
                "relations": out.mr.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "ideal_vanishing": out.ideal_vanishing,
                "agreement": out.agreement,
                "samples": out.samples,
                "min_sampled": out.min_sampled,
            });
            (report, out.certificate.delta, out.certificate.residual)
        }),
        Domain::Polys(ps) if !e.has_inverse() => e.to_matpoly().and_then(|q| {
            let q = q.hermitian_part()?;
            certify_polynomial(&q, ps, &opts).map(|c| {
                (json!({ "certified": true, "certificate": certificate_value(&c) }), c.delta, c.residual)
            })
        }),
        Domain::Polys(ps) => certify_rational_assembled(&e, ps, &opts).map(|(out, assembled)| {
            let report = json!({
                "certified": true,
                "certificate": certificate_value(&out.certificate),
                "D": out.d,
                "min_sampled": out.min_sampled,
                "warnings": out.warnings,
                "rational": rational_value(&assembled),
            });
            (report, out.certificate.delta, out.certificate.residual)
        }),
    };
    match attempt {
        Ok((report, delta, residual)) => {
            Ok((EXIT_OK, report, format!("certified at delta {delta}, residual {residual:e}\n")))
        }
        Err(err @ Error::NotCertified { .. }) => {
            let dom = domain.spec()?;
            let witness = check_positivity(&e, &dom, opts.max_size, opts.per_size, opts.seed)?;
            let report = json!({
                "certified": false,
                "error": error_json(&err),
                "min_eigenvalue": witness.min_eigenvalue,
                "witness": point_json(&witness.witness),
            });
            let summary = format!("not certified up to delta {delta_max}; sampled min eigenvalue {}\n", witness.min_eigenvalue);
            Ok((EXIT_NEGATIVE, report, summary))
        }
        Err(other) => Err(other),
    }
}

fn cmd_verify(path: &PathBuf, tol: f64, cfg: &RunConfig) -> Dispatch {
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    // accept a bare certificate or a `certify` report
    let body = raw.get("certificate").cloned().unwrap_or(raw);
    let cj: CertificateJson = serde_json::from_value(body)?;
    let cert = Certificate::from_json(&cj)?;
    // generators come from the command line when given, so a certificate
    // cannot vouch for itself with altered generators
    let gens = match (read_domain(cfg)?, cert.pipeline) {
        (Some(Domain::Polys(ps)), Pipeline::Polynomial) => ps,
        (Some(Domain::Pencil(l)), Pipeline::Pencil) => vec![l.to_matpoly()],
        (Some(_), p) => {
            return Err(Error::Invalid(format!("the given domain does not match a `{}` certificate", p.name())))
        }
        (None, _) => cert.generators.clone(),
    };
    if cert.weighted.iter().any(|(g, _)| *g >= gens.len()) {
        return Err(Error::Invalid("certificate refers to more generators than given".into()));
    }
    let residual = verify_certificate(&cert.target, &cert, &gens, &cert.ideal_gens)?;
    let verified = residual <= tol;
    let report = json!({
        "verified": verified,
        "residual": residual,
        "pipeline": cert.pipeline.name(),
        "delta": cert.delta,
        "target": cert.target.to_string(),
    });
    let summary = format!("{} (residual {residual:e})\n", if verified { "verified" } else { "NOT verified" });
    Ok((if verified { EXIT_OK } else { EXIT_NEGATIVE }, report, summary))
}

/// Entry point used by the binary: run, write the report and return the
/// exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let out = run(argv);
    if let Some(path) = &out.out {
        if let Err(e) = std::fs::write(path, out.report_text()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_ERROR;
        }
    }
    if out.code == EXIT_ERROR && !out.json {
        eprint!("{}", out.summary);
    } else {
        print!("{}", out.stdout());
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> RunOutput {
        run(std::iter::once("ncert").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["equiv", "x1*x1^-1", "1"]).code, EXIT_OK);
        assert_eq!(run_args(&["equiv", "x1*x2", "x2*x1"]).code, EXIT_NEGATIVE);
        assert_eq!(run_args(&["check-pos", "x1", "--P", "1 - x1^2"]).code, EXIT_NEGATIVE);
        assert_eq!(run_args(&["check-pos", "(2 - x1)^-1", "--P", "1 - x1^2"]).code, EXIT_OK);
        assert_eq!(run_args(&["parse", "(x1"]).code, EXIT_ERROR);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_ERROR);
        assert_eq!(run_args(&["--help"]).code, EXIT_OK);
        assert_eq!(run_args(&["certify", "x1"]).code, EXIT_ERROR);
    }

    #[test]
    fn reports_embed_config() {
        let out = run_args(&["check-pos", "x1", "--P", "1 - x1^2", "--json"]);
        let cfg = &out.report["config"];
        assert_eq!(cfg["command"], "check-pos");
        assert_eq!(cfg["seed"], 0);
        assert_eq!(cfg["count"], 20);
        assert_eq!(cfg["P"][0], "1 - x1^2");
        let min = out.report["min_eigenvalue"].as_f64().unwrap();
        assert!((min + 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_argv_gives_identical_json() {
        let args = ["equiv", "x1*x2", "x2*x1", "--json", "--seed", "7"];
        assert_eq!(run_args(&args).stdout(), run_args(&args).stdout());
    }
}
