//! Run configuration and command dispatch behind the `polygreen` binary.

use crate::error::{Error, Result};
use crate::euclid::{
    c_nk, envelope_bound, eta, kernel_alpha, kernel_radial_derivative, remainder_ratio, ProblemParams,
    RadialKernel,
};
use crate::giraud::{certify_bound, compose_alpha, compose_euclid, CertifyOptions, EnvelopeSpec};
use crate::mass::mass_sweep;
use crate::parametrix::{
    assemble_and_compare, grid_sample_pairs, run_parametrix, u_envelope_constant, CutoffSpec, ErrorSpectrum,
    ParametrixConfig,
};
use crate::report::{Format, Report, ReportRow};
use crate::torus::{
    random_pairs, symmetry_positivity_scan, three_regime_bound, torus_distance, LatticeSum, RepresentationContext,
    TorusGeometry, TrigPoly,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

pub const COMMANDS: [&str; 11] = [
    "kernel eval",
    "kernel asym",
    "kernel deriv",
    "giraud compose",
    "giraud certify",
    "torus green",
    "torus verify",
    "torus scan",
    "parametrix run",
    "mass sweep",
    "help",
];

/// Cutoff radius: a number or "auto" (0.9·(L/2)/(n+2)).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tau0 {
    #[default]
    Auto,
    Value(f64),
}

impl std::str::FromStr for Tau0 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Tau0::Auto);
        }
        s.parse::<f64>()
            .map(Tau0::Value)
            .map_err(|_| Error::Domain(format!("tau0 must be a number or \"auto\", got {s:?}")))
    }
}

impl Serialize for Tau0 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau0::Auto => s.serialize_str("auto"),
            Tau0::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Tau0 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Tau0::Value(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Everything a command may need. Every field is optional so a JSON config
/// file and command-line flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Two words, e.g. "torus verify".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Order of the second kernel in `giraud certify`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<Tau0>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Pass/fail tolerance of the command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Certified tail of the lattice sums.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Derivative order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Sweep window in the scaled distance √α r.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<EnvelopeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<EnvelopeSpec>,
    /// Compose with the α-free Euclidean rule instead of the α-dependent one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclid: Option<bool>,
    /// Parametrix spectra: "radial" (default, with folding) or "grid".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<ErrorSpectrum>,
    /// Neighbouring bands folded onto the grid with radial spectra (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_images: Option<usize>,
    /// Energy share allowed above 2/3 Nyquist; a negative value disables the guard.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aliasing_tol: Option<f64>,
    /// Directory receiving the parametrix fields as TFLD files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<PathBuf>,
    /// A path, or "csv" / "json" for standard output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! layer {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    /// Fields set in `top` win over those in `self`.
    pub fn layered(self, top: RunConfig) -> RunConfig {
        let base = self;
        layer!(base, top; command, n, k, k2, alpha, alphas, length, grid, tau0, epsilon, tol, lattice_tol,
            seed, pairs, r, order, x, y, points, t_min, t_max, d_min, d_max, first, second, euclid,
            spectra, band_images, aliasing_tol, dump, counterexample, out, format)
    }

    fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
        v.clone().ok_or_else(|| Error::Domain(format!("missing --{flag}")))
    }

    fn params(&self) -> Result<ProblemParams> {
        ProblemParams::new(Self::need(&self.n, "n")?, Self::need(&self.k, "k")?, Self::need(&self.alpha, "alpha")?)
    }

    /// n and k with α = 1, for commands sweeping a list of α.
    fn shape(&self) -> Result<ProblemParams> {
        ProblemParams::new(Self::need(&self.n, "n")?, Self::need(&self.k, "k")?, 1.0)
    }

    fn alpha_list(&self) -> Result<Vec<f64>> {
        match (&self.alphas, self.alpha) {
            (Some(a), _) if !a.is_empty() => Ok(a.clone()),
            (_, Some(a)) => Ok(vec![a]),
            _ => Err(Error::Domain("missing --alphas (or --alpha)".into())),
        }
    }

    fn geometry(&self) -> Result<TorusGeometry> {
        TorusGeometry::new(Self::need(&self.n, "n")?, self.length.unwrap_or(1.0))
    }

    fn cutoff(&self, g: &TorusGeometry, k: u32) -> Result<CutoffSpec> {
        let c = match self.tau0.unwrap_or_default() {
            Tau0::Auto => CutoffSpec::auto(g, k)?,
            Tau0::Value(t) => CutoffSpec::new(t, 2 * k + 2)?,
        };
        c.validate(g, k)?;
        Ok(c)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Report format and destination (`None` = standard output).
    pub fn destination(&self) -> (Format, Option<PathBuf>) {
        match self.out.as_deref() {
            None => (self.format.unwrap_or(Format::Json), None),
            Some("csv") => (Format::Csv, None),
            Some("json") => (Format::Json, None),
            Some(p) => {
                let inferred = if p.ends_with(".csv") { Format::Csv } else { Format::Json };
                (self.format.unwrap_or(inferred), Some(PathBuf::from(p)))
            }
        }
    }
}

/// Result of one command before it is written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Option<Report>,
    /// Plain answer printed when no report destination is requested.
    pub text: Option<String>,
    pub counterexample: Option<Value>,
}

impl Outcome {
    fn verified(&self) -> bool {
        self.counterexample.is_none() && self.report.as_ref().map_or(true, |r| r.pass)
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || points == 0 {
        return Err(Error::Domain(format!("bad sweep window [{lo}, {hi}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { hi } else { lo * (step * i as f64).exp() }).collect())
}

fn origin_axis(n: u32, d: f64) -> Vec<f64> {
    let mut v = vec![0.0; n as usize];
    v[0] = d;
    v
}

/// Runs the command named in `config.command`.
pub fn dispatch(config: &RunConfig) -> Result<Outcome> {
    let cmd = config.command.clone().ok_or_else(|| Error::Domain("no command given".into()))?;
    let mut out = match cmd.as_str() {
        "kernel eval" => kernel_eval(config),
        "kernel asym" => kernel_asym(config),
        "kernel deriv" => kernel_deriv(config),
        "giraud compose" => giraud_compose(config),
        "giraud certify" => giraud_certify(config),
        "torus green" => torus_green(config),
        "torus verify" => torus_verify(config),
        "torus scan" => torus_scan(config),
        "parametrix run" => parametrix_run(config),
        "mass sweep" => mass_cmd(config),
        other => Err(Error::Domain(format!("unknown command {other:?}"))),
    }?;
    if let Some(r) = out.report.as_mut() {
        r.note("config", config)?;
    }
    Ok(out)
}

fn kernel_eval(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let r = RunConfig::need(&cfg.r, "r")?;
    let v = kernel_alpha(p, r)?;
    let mut rep = Report::new("kernel eval");
    rep.rows.push(ReportRow::new(p.alpha, r, v, envelope_bound(p, r)?));
    Ok(Outcome { report: Some(rep), text: Some(format!("{v}")), counterexample: None })
}

fn kernel_deriv(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let r = RunConfig::need(&cfg.r, "r")?;
    let l = cfg.order.unwrap_or(1);
    let v = kernel_radial_derivative(p, r, l as i32)?;
    // Each derivative costs r^{−1} near and √α far.
    let env = if p.sqrt_alpha() * r <= 1.0 {
        envelope_bound(p, r)? * r.powi(-(l as i32))
    } else {
        envelope_bound(p, r)? * p.alpha.powf(l as f64 / 2.0)
    };
    let mut rep = Report::new("kernel deriv");
    rep.rows.push(ReportRow::new(p.alpha, r, v, env));
    Ok(Outcome { report: Some(rep), text: Some(format!("{v}")), counterexample: None })
}

fn kernel_asym(cfg: &RunConfig) -> Result<Outcome> {
    let shape = cfg.shape()?;
    let ts = log_grid(cfg.t_min.unwrap_or(1e-3), cfg.t_max.unwrap_or(1.0), cfg.points.unwrap_or(31))?;
    let factor = cfg.tol.unwrap_or(2.0);
    let c = c_nk(shape.n, shape.k)?;
    let mut rep = Report::new("kernel asym");
    let mut fitted = Vec::new();
    for alpha in cfg.alpha_list()? {
        let p = shape.with_alpha(alpha)?;
        let mut rows = Vec::with_capacity(ts.len());
        for &t in &ts {
            let r = t / p.sqrt_alpha();
            let dev = (kernel_alpha(p, r)? * r.powi((p.n - 2 * p.k) as i32) / c - 1.0).abs();
            let e = eta(t, p.n, p.k)?;
            let mut row = ReportRow::new(alpha, r, dev, e);
            row.ratio = remainder_ratio(p, r)?;
            rows.push(row);
        }
        let sup = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        fitted.push((alpha, sup));
        rep.rows.extend(rows.into_iter().map(|r| r.with_fitted(sup)));
    }
    let max = fitted.iter().map(|f| f.1).fold(0.0, f64::max);
    let min = fitted.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    let spread = max / min;
    rep.pass = spread.is_finite() && spread <= factor;
    rep.note("fitted", &fitted)?;
    rep.note("spread", spread)?;
    let counterexample = (!rep.pass).then(|| json!({ "fitted": fitted, "spread": spread, "allowed": factor }));
    Ok(Outcome { report: Some(rep), text: None, counterexample })
}

fn giraud_compose(cfg: &RunConfig) -> Result<Outcome> {
    let n = RunConfig::need(&cfg.n, "n")?;
    let x = RunConfig::need(&cfg.first, "first")?;
    let y = RunConfig::need(&cfg.second, "second")?;
    let z = if cfg.euclid.unwrap_or(false) { compose_euclid(&x, &y, n)? } else { compose_alpha(&x, &y, n)? };
    let text = serde_json::to_string(&z).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Outcome { report: None, text: Some(text), counterexample: None })
}

fn giraud_certify(cfg: &RunConfig) -> Result<Outcome> {
    let shape = cfg.shape()?;
    let (n, k1) = (shape.n, shape.k);
    let k2 = cfg.k2.unwrap_or(k1);
    let composed = compose_alpha(&EnvelopeSpec::green(n, k1), &EnvelopeSpec::green(n, k2), n)?;
    let ts = log_grid(cfg.t_min.unwrap_or(0.05), cfg.t_max.unwrap_or(10.0), cfg.points.unwrap_or(12))?;
    let opts = CertifyOptions { drift_factor: cfg.tol.unwrap_or(2.0), ..CertifyOptions::default() };
    let kernel = |k: u32| move |alpha: f64| RadialKernel::green(ProblemParams { n, k, alpha });
    let alphas = cfg.alpha_list()?;
    for &a in &alphas {
        ProblemParams::new(n, k2, a)?;
    }
    let cert = certify_bound(kernel(k1), kernel(k2), &composed, n, &alphas, &ts, opts)?;
    let mut rep = Report::new("giraud certify");
    for s in &cert.samples {
        let c = cert.fitted.iter().find(|f| f.0 == s.alpha).map_or(f64::NAN, |f| f.1);
        rep.rows.push(ReportRow::new(s.alpha, s.r, s.conv, s.envelope).with_fitted(c));
    }
    rep.pass = cert.pass;
    rep.note("composed", &composed)?;
    rep.note("fitted", &cert.fitted)?;
    rep.note("drift", cert.drift)?;
    let counterexample = (!cert.pass).then(|| json!({ "fitted": cert.fitted, "drift": cert.drift, "sample": cert.counterexample }));
    Ok(Outcome { report: Some(rep), text: None, counterexample })
}

fn torus_green(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let g = cfg.geometry()?;
    let x = RunConfig::need(&cfg.x, "x")?;
    let y = RunConfig::need(&cfg.y, "y")?;
    let lattice = LatticeSum::new(p, g, cfg.lattice_tol.unwrap_or(1e-14), 0)?;
    let v = lattice.value(&x, &y)?;
    let (d, _) = torus_distance(&g, &x, &y);
    let env = three_regime_bound(p.alpha, d, (p.n - 2 * p.k) as f64, cfg.epsilon.unwrap_or(0.1), g.injectivity_radius());
    let mut rep = Report::new("torus green");
    rep.rows.push(ReportRow::new(p.alpha, d, v.value, env));
    rep.note("tail_bound", v.tail_bound)?;
    rep.note("principal", v.principal)?;
    rep.note("underflow", v.underflow)?;
    rep.note("images", lattice.image_count())?;
    Ok(Outcome { report: Some(rep), text: Some(format!("{}", v.value)), counterexample: None })
}

/// 1, cos 2πy₁, cos 2πy₁·cos 4πy₂ on the unit-scaled torus.
fn test_functions(n: u32) -> Vec<(String, TrigPoly)> {
    let mut modes = vec![vec![0i64; n as usize], origin_axis(n, 1.0).iter().map(|c| *c as i64).collect()];
    if n >= 2 {
        let mut q = vec![0i64; n as usize];
        q[0] = 1;
        q[1] = 2;
        modes.push(q);
    }
    modes.into_iter().map(|q| (format!("cos{q:?}"), TrigPoly::cos_product(&q))).collect()
}

fn torus_verify(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let g = cfg.geometry()?;
    let m = cfg.grid.unwrap_or(128);
    let tol = cfg.tol.unwrap_or(5e-4);
    let cutoff = cfg.cutoff(&g, p.k)?;
    let n = p.n as usize;
    let ctx = RepresentationContext::new(p, g, cutoff.clone(), m, &vec![0; n], cfg.lattice_tol.unwrap_or(1e-14))?;
    let mut rep = Report::new("torus verify");
    let mut details = Vec::new();
    let mut worst: Option<Value> = None;
    for (name, phi) in test_functions(p.n) {
        let r = ctx.check(&phi)?;
        rep.rows.push(ReportRow::new(p.alpha, 0.0, r.integral, r.u_x));
        if r.defect > tol && worst.is_none() {
            worst = Some(json!({ "phi": name, "report": r, "tol": tol }));
        }
        details.push(json!({ "phi": name, "report": r }));
    }
    let total = rep.rows[0].value;
    let expected = p.alpha.powi(-(p.k as i32));
    let identity_defect = (total - expected).abs();
    let identity_tol = 1e-6;
    if identity_defect > identity_tol && worst.is_none() {
        worst = Some(json!({ "identity": "integral of G = alpha^-k", "integral": total, "expected": expected }));
    }
    rep.pass = worst.is_none();
    rep.note("checks", details)?;
    rep.note("identity_defect", identity_defect)?;
    rep.note("cutoff", &cutoff)?;
    Ok(Outcome { report: Some(rep), text: None, counterexample: worst })
}

fn torus_scan(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let g = cfg.geometry()?;
    let tol = cfg.lattice_tol.unwrap_or(1e-13);
    let pairs = random_pairs(&g, cfg.pairs.unwrap_or(1000), cfg.seed());
    let scan = symmetry_positivity_scan(p, g, &pairs, tol)?;
    let lattice = LatticeSum::new(p, g, tol, 0)?;
    let eps = cfg.epsilon.unwrap_or(0.1);
    let mut rep = Report::new("torus scan");
    for (x, y) in &pairs {
        let (d, _) = torus_distance(&g, x, y);
        let v = lattice.value(x, y)?.value;
        rep.rows.push(ReportRow::new(p.alpha, d, v, three_regime_bound(p.alpha, d, (p.n - 2 * p.k) as f64, eps, g.injectivity_radius())));
    }
    rep.pass = scan.pass;
    rep.note("scan", &scan)?;
    let counterexample = scan.counterexample.as_ref().map(|c| json!({ "x": c.0, "y": c.1, "value": c.2 }));
    Ok(Outcome { report: Some(rep), text: None, counterexample })
}

fn parametrix_run(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params()?;
    let g = cfg.geometry()?;
    let m = cfg.grid.unwrap_or(128);
    let mut pc = match cfg.spectra.unwrap_or(ErrorSpectrum::Radial) {
        ErrorSpectrum::Radial => ParametrixConfig::folded(p, g, m, cfg.band_images.unwrap_or(1))?,
        ErrorSpectrum::Grid => ParametrixConfig { band_images: cfg.band_images.unwrap_or(0), ..ParametrixConfig::new(p, g, m)? },
    };
    pc.cutoff = cfg.cutoff(&g, p.k)?;
    if let Some(a) = cfg.aliasing_tol {
        pc.aliasing_tol = (a >= 0.0).then_some(a);
    }
    let state = run_parametrix(pc)?;
    if let Some(dir) = &cfg.dump {
        dump_state(&state, dir)?;
    }
    let oracle = LatticeSum::new(p, g, cfg.lattice_tol.unwrap_or(1e-16), 0)?;
    let d_min = cfg.d_min.unwrap_or(0.05);
    let d_max = cfg.d_max.unwrap_or(0.45);
    let idx = grid_sample_pairs(&g, m, cfg.pairs.unwrap_or(200), d_min, d_max, cfg.seed())?;
    let cmp = assemble_and_compare(&state, &oracle, &idx, cfg.tol.unwrap_or(1e-2))?;
    let mut rep = Report::new("parametrix run");
    for row in &cmp.rows {
        rep.rows.push(ReportRow::new(p.alpha, row.d, row.parametrix, row.oracle));
    }
    rep.pass = cmp.pass;
    rep.note("max_rel_err", cmp.max_rel_err)?;
    rep.note("worst", &cmp.worst)?;
    rep.note("depth", state.depth)?;
    rep.note("diagnostics", &state.diagnostics)?;
    rep.note("u_envelope_constant", u_envelope_constant(&state, cfg.epsilon.unwrap_or(0.1)))?;
    let counterexample = (!cmp.pass).then(|| json!({ "worst": cmp.worst, "tol": cmp.tol }));
    Ok(Outcome { report: Some(rep), text: None, counterexample })
}

fn dump_state(state: &crate::parametrix::ParametrixState, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write = |name: String, f: &crate::torus::TorusField| -> Result<()> {
        let file = std::fs::File::create(dir.join(name))?;
        f.write_tfld(std::io::BufWriter::new(file))
    };
    write("l.tfld".into(), &state.l)?;
    for (i, f) in state.gamma.iter().enumerate() {
        write(format!("gamma_{}.tfld", i + 1), f)?;
    }
    for (i, f) in state.layers.iter().enumerate() {
        write(format!("layer_{}.tfld", i + 1), f)?;
    }
    write("u.tfld".into(), &state.u)
}

fn mass_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let shape = cfg.shape()?;
    let g = cfg.geometry()?;
    let alphas = cfg.alpha_list()?;
    let tol = cfg.lattice_tol.unwrap_or(1e-15);
    let report = match mass_sweep(shape, g, &alphas, tol) {
        Ok(r) => r,
        Err(Error::Verification(msg)) => {
            return Ok(Outcome { report: None, text: Some(msg.clone()), counterexample: Some(json!({ "failure": msg })) });
        }
        Err(e) => return Err(e),
    };
    let mut rep = Report::new("mass sweep");
    for i in 0..report.alphas.len() {
        let a = report.alphas[i];
        let mut row = ReportRow::new(a, 0.0, report.mu[i], a.sqrt());
        row.ratio = report.scaled[i];
        rep.rows.push(row);
    }
    rep.pass = report.all_negative && report.widths_shrink;
    rep.note("bracket", report.bracket)?;
    rep.note("tail_widths", &report.tail_widths)?;
    let counterexample = (!rep.pass).then(|| json!({ "tail_widths": report.tail_widths, "mu": report.mu }));
    Ok(Outcome { report: Some(rep), text: None, counterexample })
}

fn default_counterexample_path(cfg: &RunConfig) -> PathBuf {
    if let Some(p) = &cfg.counterexample {
        return p.clone();
    }
    match cfg.destination().1 {
        Some(p) => PathBuf::from(format!("{}.counterexample.json", p.display())),
        None => PathBuf::from("polygreen-counterexample.json"),
    }
}

/// Dispatches, writes artifacts and returns the process exit code.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match run_inner(cfg, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "polygreen: {e}");
            EXIT_ERROR
        }
    }
}

fn run_inner(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let outcome = dispatch(cfg)?;
    let (format, path) = cfg.destination();
    match (&outcome.report, &outcome.text, &path, cfg.out.is_some()) {
        (_, Some(t), None, false) => writeln!(stdout, "{t}")?,
        (Some(r), _, Some(p), _) => crate::report::emit_report(r, format, p)?,
        (Some(r), _, None, _) => stdout.write_all(r.render(format)?.as_bytes())?,
        (None, Some(t), Some(p), _) => std::fs::write(p, format!("{t}\n"))?,
        (None, Some(t), None, true) => writeln!(stdout, "{t}")?,
        (None, None, _, _) => {}
    }
    if outcome.verified() {
        return Ok(EXIT_OK);
    }
    let path = default_counterexample_path(cfg);
    let body = json!({ "command": cfg.command, "counterexample": outcome.counterexample });
    std::fs::write(&path, serde_json::to_string_pretty(&body).map_err(|e| Error::Format(e.to_string()))? + "\n")?;
    writeln!(stderr, "polygreen: verification failed; counterexample written to {}", path.display())?;
    Ok(EXIT_VERIFICATION)
}
