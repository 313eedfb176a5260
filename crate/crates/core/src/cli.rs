//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 2 on invalid input, 3 when a numerical check fails.

use crate::cfunc::{self, CMethod};
use crate::error::{Error, Result};
use crate::master::{self, SymbolFunction};
use crate::model::{Coefficient, Model, ModelSpec};
use crate::phi;
use crate::regress;
use crate::sinetype::{self, build_sinetype};
use crate::spectrum::solve_eigen;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "SLMASTER_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub ode_tol: f64,
    pub eigen_tol: f64,
    pub quad_tol: f64,
    pub route_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_tol: 1e-12,
            eigen_tol: 1e-13,
            quad_tol: 1e-6,
            route_tol: 2e-5,
        }
    }
}

/// A grid as `start:stop:step` or an explicit list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range(s) => parse_grid(s)?,
        };
        if v.is_empty() || v.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("grid {self:?} must be nonempty, finite and increasing")));
        }
        Ok(v)
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("grid '{s}' is not start:stop:step or a comma list"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| a + h * k as f64).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ranges {
    pub n_max: usize,
    pub t_grid: GridSpec,
    pub lambda_grid: GridSpec,
}

impl Default for Ranges {
    fn default() -> Self {
        Ranges {
            n_max: 40,
            t_grid: GridSpec::Range("0.05:0.45:0.05".into()),
            lambda_grid: GridSpec::Range("0.5:6:0.5".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Default for Output {
    fn default() -> Self {
        Output { format: Format::Csv, path: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ranges: Ranges,
    #[serde(default)]
    pub output: Output,
}

fn default_model() -> ModelSpec {
    ModelSpec {
        alpha: 1.0,
        beta: 1.0,
        roots: vec![],
        series_order: 16,
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: default_model(),
            tolerances: Tolerances::default(),
            ranges: Ranges::default(),
            output: Output::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<Model> {
        let t = &self.tolerances;
        for (k, v) in [("ode_tol", t.ode_tol), ("eigen_tol", t.eigen_tol), ("quad_tol", t.quad_tol), ("route_tol", t.route_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        self.ranges.t_grid.points()?;
        self.ranges.lambda_grid.points()?;
        Model::from_spec(&self.model)
    }
}

#[derive(Parser, Debug)]
#[command(name = "slmaster", version, about = "Perturbed Jacobi-type Sturm-Liouville spectra and master-theorem checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML config (default from $SLMASTER_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// perturbation roots c_i > 1, comma separated; "" for B ≡ 1
    #[arg(long, global = true)]
    roots: Option<String>,
    #[arg(long, global = true)]
    series_order: Option<usize>,
    #[arg(long, global = true)]
    format: Option<Format>,
    /// write the main table here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model constants and condition report
    Model {
        #[command(subcommand)]
        action: ModelCmd,
    },
    /// Jacobi-type function φ_λ on a t grid
    Phi {
        #[command(subcommand)]
        action: PhiCmd,
    },
    /// Harish-Chandra c-function
    Cfunc {
        #[command(subcommand)]
        action: CfuncCmd,
    },
    /// Eigenvalues, nodes and norms
    Spectrum {
        #[command(subcommand)]
        action: SpectrumCmd,
    },
    /// Sine-type function residues
    Sinetype {
        #[command(subcommand)]
        action: SinetypeCmd,
    },
    /// Compare the reconstruction routes for a symbol
    Master {
        #[command(subcommand)]
        action: MasterCmd,
    },
    /// Property suite plus golden values; writes the baseline on first run
    Regress {
        #[arg(long, default_value = "regress_baseline.json")]
        baseline: PathBuf,
        /// overwrite the baseline with the current values
        #[arg(long)]
        update: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    Report,
    /// A, Ã, B or a log-derivative at complex points
    Eval {
        #[arg(long, value_enum)]
        which: CoefArg,
        /// RE,IM; repeatable
        #[arg(long = "z", value_parser = parse_complex, required = true)]
        z: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoefArg {
    A,
    Atilde,
    B,
    LogderivA,
    LogderivAtilde,
}

#[derive(Subcommand, Debug)]
enum PhiCmd {
    Eval {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        /// single value, comma list, or start:stop:step
        #[arg(long)]
        t: String,
        /// evaluate φ_λ(it) on the imaginary segment
        #[arg(long)]
        imag: bool,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Wronskian,
    Limit,
}

#[derive(Subcommand, Debug)]
enum CfuncCmd {
    Eval {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_enum, default_value = "wronskian")]
        method: MethodArg,
    },
}

#[derive(Subcommand, Debug)]
enum SpectrumCmd {
    Solve {
        #[arg(long)]
        nmax: Option<usize>,
        /// JSON sidecar path (default: <out>.json, or none on stdout)
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum SinetypeCmd {
    Table {
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = sinetype::DEFAULT_TRUNCATION)]
        truncation: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymbolArg {
    Zero,
    ExpShift,
    RationalDamped,
    Vanishing,
}

#[derive(Subcommand, Debug)]
enum MasterCmd {
    Verify {
        #[arg(long, value_enum, default_value = "exp-shift")]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// pole offset of rational_damped
        #[arg(long, default_value_t = 2.0)]
        offset: f64,
        /// nodes annihilated by the vanishing symbol
        #[arg(long, default_value_t = 40)]
        nvanish: usize,
        #[arg(long)]
        tgrid: Option<String>,
        #[arg(long)]
        lgrid: Option<String>,
        /// contour levels σ
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2")]
        sigma: Vec<f64>,
        #[arg(long)]
        nmax: Option<usize>,
        /// JSON summary path (default: stderr)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got '{s}'")),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::Domain(_) | Error::Pole(_) | Error::Regime(_) | Error::Config(_) => EXIT_INVALID,
        _ => EXIT_NUMERICAL,
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

struct Ctx {
    cfg: RunConfig,
    model: Model,
}

impl Ctx {
    fn emit(&self, table: &str) -> Result<()> {
        match &self.cfg.output.path {
            Some(p) => std::fs::write(p, table).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
            None => {
                print!("{table}");
                Ok(())
            }
        }
    }

    fn json(&self) -> bool {
        self.cfg.output.format == Format::Json
    }
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn build_config(c: &Common) -> Result<RunConfig> {
    let path = c.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(a) = c.alpha {
        cfg.model.alpha = a;
    }
    if let Some(b) = c.beta {
        cfg.model.beta = b;
    }
    if let Some(r) = &c.roots {
        cfg.model.roots = if r.trim().is_empty() { Vec::new() } else { parse_grid(r)? };
    }
    if let Some(n) = c.series_order {
        cfg.model.series_order = n;
    }
    if let Some(f) = c.format {
        cfg.output.format = f;
    }
    if let Some(o) = &c.out {
        cfg.output.path = Some(o.clone());
    }
    Ok(cfg)
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let cfg = build_config(&cli.common)?;
    let model = cfg.validate()?;
    let ctx = Ctx { cfg, model };
    match cli.command {
        Command::Model { action } => model_cmd(&ctx, action),
        Command::Phi { action: PhiCmd::Eval { lambda, t, imag, tol } } => phi_cmd(&ctx, lambda, &t, imag, tol),
        Command::Cfunc { action: CfuncCmd::Eval { lambda, method } } => cfunc_cmd(&ctx, lambda, method),
        Command::Spectrum { action: SpectrumCmd::Solve { nmax, sidecar } } => spectrum_cmd(&ctx, nmax, sidecar),
        Command::Sinetype { action: SinetypeCmd::Table { nmax, truncation } } => sinetype_cmd(&ctx, nmax, truncation),
        Command::Master { action } => master_cmd(&ctx, action),
        Command::Regress { baseline, update } => regress_cmd(&baseline, update),
    }
}

#[derive(Serialize)]
struct ModelSummary<'a> {
    model: ModelSpec,
    hash: String,
    rho: f64,
    rho0: f64,
    theta: f64,
    kappa: f64,
    nu_shift: f64,
    report: &'a crate::model::ConditionReport,
    conditions_ok: bool,
}

fn model_hash(spec: &ModelSpec) -> String {
    let text = serde_json::to_string(spec).unwrap_or_default();
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn model_cmd(ctx: &Ctx, action: ModelCmd) -> Result<i32> {
    let m = &ctx.model;
    match action {
        ModelCmd::Report => {
            let ok = m.report.all_ok();
            let s = ModelSummary {
                model: m.spec(),
                hash: model_hash(&m.spec()),
                rho: m.rho,
                rho0: m.rho0,
                theta: m.theta,
                kappa: m.kappa,
                nu_shift: m.nu_shift,
                report: &m.report,
                conditions_ok: ok,
            };
            let text = serde_json::to_string_pretty(&s).map_err(|e| Error::Config(e.to_string()))? + "\n";
            ctx.emit(&text)?;
            Ok(if ok { EXIT_OK } else { EXIT_NUMERICAL })
        }
        ModelCmd::Eval { which, z } => {
            let which = match which {
                CoefArg::A => Coefficient::A,
                CoefArg::Atilde => Coefficient::ATilde,
                CoefArg::B => Coefficient::B,
                CoefArg::LogderivA => Coefficient::LogDerivA,
                CoefArg::LogderivAtilde => Coefficient::LogDerivATilde,
            };
            let mut out = String::from("re_z,im_z,re,im\n");
            for zz in z {
                let v = m.eval_coefficient(zz, which)?;
                let _ = writeln!(out, "{},{},{},{}", fmt(zz.re), fmt(zz.im), fmt(v.re), fmt(v.im));
            }
            ctx.emit(&out)?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct PhiRow {
    t: f64,
    value: Complex64,
    deriv: Complex64,
    est_error: f64,
}

fn phi_cmd(ctx: &Ctx, lambda: Complex64, t: &str, imag: bool, tol: Option<f64>) -> Result<i32> {
    let ts = GridSpec::Range(t.into()).points()?;
    let tol = tol.unwrap_or(ctx.cfg.tolerances.ode_tol);
    let rows: Vec<PhiRow> = if imag {
        ts.iter()
            .map(|&t| {
                let (v, d) = phi::eval_phi_complex(&ctx.model, lambda, Complex64::new(0.0, t), tol)?;
                Ok(PhiRow { t, value: v, deriv: d, est_error: tol * v.norm() })
            })
            .collect::<Result<_>>()?
    } else {
        if ts[0] <= 0.0 {
            return Err(Error::Domain("t must be positive".into()));
        }
        let e = phi::eval_phi_nodes(&ctx.model, lambda, &ts, tol)?;
        ts.iter()
            .zip(e.values.iter().zip(&e.derivs))
            .map(|(&t, (v, d))| PhiRow { t, value: *v, deriv: *d, est_error: e.est_error })
            .collect()
    };
    if ctx.json() {
        ctx.emit(&(serde_json::to_string_pretty(&rows).map_err(|e| Error::Config(e.to_string()))? + "\n"))?;
    } else {
        let mut out = String::from("t,re_phi,im_phi,re_dphi,im_dphi,est_error\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt(r.t),
                fmt(r.value.re),
                fmt(r.value.im),
                fmt(r.deriv.re),
                fmt(r.deriv.im),
                fmt(r.est_error)
            );
        }
        ctx.emit(&out)?;
    }
    Ok(EXIT_OK)
}

fn cfunc_cmd(ctx: &Ctx, lambda: Complex64, method: MethodArg) -> Result<i32> {
    let method = match method {
        MethodArg::Wronskian => CMethod::Wronskian,
        MethodArg::Limit => CMethod::Limit,
    };
    let c = cfunc::eval_c(&ctx.model, lambda, method)?;
    if ctx.json() {
        ctx.emit(&(serde_json::to_string_pretty(&c).map_err(|e| Error::Config(e.to_string()))? + "\n"))?;
    } else {
        let name = match method {
            CMethod::Wronskian => "wronskian",
            CMethod::Limit => "limit",
        };
        let out = format!(
            "re_lambda,im_lambda,re_c,im_c,est_error,method\n{},{},{},{},{},{}\n",
            fmt(lambda.re),
            fmt(lambda.im),
            fmt(c.value.re),
            fmt(c.value.im),
            fmt(c.est_error),
            name
        );
        ctx.emit(&out)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumSidecar {
    model: ModelSpec,
    model_hash: String,
    eigen_tol: f64,
    ode_tol: f64,
    n_max: usize,
    m0: i64,
    n0: i64,
    nu_shift: f64,
    rho: f64,
}

fn spectrum_cmd(ctx: &Ctx, nmax: Option<usize>, sidecar: Option<PathBuf>) -> Result<i32> {
    let m = &ctx.model;
    let n_max = nmax.unwrap_or(ctx.cfg.ranges.n_max);
    let data = solve_eigen(m, n_max, ctx.cfg.tolerances.eigen_tol)?;
    let mut out = String::from("n,nu,sqrt_nu_plus_rho2,c_n,shoot_residual\n");
    for n in 0..=n_max {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            n,
            fmt(data.nus[n]),
            fmt(data.nodes[n]),
            fmt(data.norms[n]),
            fmt(data.diagnostics[n].shoot_residual)
        );
    }
    if ctx.json() {
        ctx.emit(&(serde_json::to_string_pretty(&data).map_err(|e| Error::Config(e.to_string()))? + "\n"))?;
    } else {
        ctx.emit(&out)?;
    }
    let side = sidecar.or_else(|| {
        ctx.cfg.output.path.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = side {
        let s = SpectrumSidecar {
            model: m.spec(),
            model_hash: model_hash(&m.spec()),
            eigen_tol: ctx.cfg.tolerances.eigen_tol,
            ode_tol: ctx.cfg.tolerances.ode_tol,
            n_max,
            m0: data.m0,
            n0: data.n0,
            nu_shift: m.nu_shift,
            rho: m.rho,
        };
        write_json(Some(&p), &s)?;
    }
    Ok(EXIT_OK)
}

fn sinetype_cmd(ctx: &Ctx, nmax: Option<usize>, truncation: usize) -> Result<i32> {
    let m = &ctx.model;
    let n_max = nmax.unwrap_or(ctx.cfg.ranges.n_max);
    let data = solve_eigen(m, n_max, ctx.cfg.tolerances.eigen_tol)?;
    let sine = build_sinetype(m, &data, truncation)?;
    let mut out = String::from("n,mu,re_d,im_d,ratio\n");
    for j in 0..sine.computed {
        let n = sine.first_index + j;
        let d = sinetype::residue_d(&sine, n)?;
        let mu = sine.mus[j];
        let _ = writeln!(out, "{},{},{},{},{}", n, fmt(mu), fmt(d.re), fmt(d.im), fmt(d.norm() / (mu * mu)));
    }
    ctx.emit(&out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifySummary {
    symbol: String,
    p: f64,
    sigmas: Vec<f64>,
    max_route_discrepancy: f64,
    max_forward_residual: f64,
    route_tol: f64,
    forward_tol: f64,
    quad_tol: f64,
    series_terms: usize,
    pass: bool,
}

fn master_cmd(ctx: &Ctx, action: MasterCmd) -> Result<i32> {
    let MasterCmd::Verify { symbol, p, offset, nvanish, tgrid, lgrid, sigma, nmax, summary } = action;
    let m = &ctx.model;
    let tol = ctx.cfg.tolerances.quad_tol;
    let ts = match tgrid {
        Some(s) => GridSpec::Range(s).points()?,
        None => ctx.cfg.ranges.t_grid.points()?,
    };
    let ls = match lgrid {
        Some(s) => GridSpec::Range(s).points()?,
        None => ctx.cfg.ranges.lambda_grid.points()?,
    };
    if ts[0] < 0.0 {
        return Err(Error::Domain("t grid must be nonnegative".into()));
    }
    let n_max = nmax.unwrap_or(ctx.cfg.ranges.n_max).max(nvanish + 10);
    let data = solve_eigen(m, n_max, ctx.cfg.tolerances.eigen_tol)?;
    let sine = build_sinetype(m, &data, sinetype::DEFAULT_TRUNCATION)?;
    let (a, name) = match symbol {
        SymbolArg::Zero => (SymbolFunction::zero(p)?, "zero"),
        SymbolArg::ExpShift => (SymbolFunction::exp_shift(p)?, "exp_shift"),
        SymbolArg::RationalDamped => (SymbolFunction::rational_damped(p, offset)?, "rational_damped"),
        SymbolArg::Vanishing => (SymbolFunction::vanishing(p, &sine.mus[..nvanish.min(sine.computed)])?, "vanishing"),
    };
    let zs: Vec<Complex64> = ts.iter().map(|t| Complex64::new(0.0, *t)).collect();
    let series = master::series_reconstruct_many(m, &data, &sine, &a, &zs, tol * 1e-2)?;
    let contours: Vec<Vec<Complex64>> = sigma
        .iter()
        .map(|s| master::contour_reconstruct_many(m, &sine, &a, &ts, *s, tol))
        .collect::<Result<_>>()?;
    let real = master::realline_reconstruct_many(m, &sine, &a, &ts, tol)?;
    let forward = master::forward_transform(m, &sine, &a, &ls, tol)?;

    let mut out = String::from("kind,x,re_series,im_series,re_contour,im_contour,re_realline,im_realline,discrepancy\n");
    let mut max_route = 0.0f64;
    for k in 0..ts.len() {
        let mut routes = vec![series.values[k], real[k]];
        routes.extend(contours.iter().map(|c| c[k]));
        let mut d = 0.0f64;
        for i in 0..routes.len() {
            for j in i + 1..routes.len() {
                d = d.max((routes[i] - routes[j]).norm());
            }
        }
        max_route = max_route.max(d);
        let c = contours.first().map_or(Complex64::new(0.0, 0.0), |c| c[k]);
        let s = series.values[k];
        let _ = writeln!(
            out,
            "route,{},{},{},{},{},{},{},{}",
            fmt(ts[k]),
            fmt(s.re),
            fmt(s.im),
            fmt(c.re),
            fmt(c.im),
            fmt(real[k].re),
            fmt(real[k].im),
            fmt(d)
        );
    }
    // forward rows: lhs in the series columns, rhs in the contour columns
    let mut max_fwd = 0.0f64;
    for f in &forward {
        let r = f.residual / (1.0 + f.rhs.norm());
        max_fwd = max_fwd.max(r);
        let _ = writeln!(
            out,
            "forward,{},{},{},{},{},{},{},{}",
            fmt(f.lambda),
            fmt(f.lhs.re),
            fmt(f.lhs.im),
            fmt(f.rhs.re),
            fmt(f.rhs.im),
            fmt(0.0),
            fmt(0.0),
            fmt(r)
        );
    }
    ctx.emit(&out)?;
    let route_tol = ctx.cfg.tolerances.route_tol;
    let forward_tol = 1e-4;
    let pass = max_route <= route_tol && max_fwd <= forward_tol;
    let s = VerifySummary {
        symbol: name.into(),
        p,
        sigmas: sigma,
        max_route_discrepancy: max_route,
        max_forward_residual: max_fwd,
        route_tol,
        forward_tol,
        quad_tol: tol,
        series_terms: series.terms,
        pass,
    };
    write_json(summary.as_deref(), &s)?;
    Ok(if pass { EXIT_OK } else { EXIT_NUMERICAL })
}

#[derive(Serialize)]
struct RegressReport {
    properties: Vec<regress::PropertyOutcome>,
    golden: Vec<regress::GoldenComparison>,
    baseline_written: bool,
    pass: bool,
}

fn regress_cmd(path: &Path, update: bool) -> Result<i32> {
    let props = regress::run_properties()?;
    let current = regress::golden_values()?;
    let (golden, written) = if path.exists() && !update {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base: regress::Baseline =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        (regress::compare(&base, &current)?, false)
    } else {
        let base = regress::Baseline { values: current };
        let text = serde_json::to_string_pretty(&base).map_err(|e| Error::Config(e.to_string()))? + "\n";
        std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        (Vec::new(), true)
    };
    for p in &props {
        println!("{} {} worst={} tol={}", if p.pass { "PASS" } else { "FAIL" }, p.name, fmt(p.worst), fmt(p.tolerance));
    }
    for g in &golden {
        println!("{} golden {} rel_diff={}", if g.pass { "PASS" } else { "FAIL" }, g.name, fmt(g.rel_diff));
    }
    if written {
        println!("baseline written to {}", path.display());
    }
    let pass = props.iter().all(|p| p.pass) && golden.iter().all(|g| g.pass);
    let report = RegressReport { properties: props, golden, baseline_written: written, pass };
    write_json(None, &report)?;
    Ok(if pass { EXIT_OK } else { EXIT_NUMERICAL })
}
