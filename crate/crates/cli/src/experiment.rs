//! JSON-configured fourth-moment experiments writing a CSV of moment rows and
//! a JSON verdict.

use std::fs;
use std::path::{Path, PathBuf};

use chaos_core::exact::{cint, format_rational, to_f64};
use chaos_core::exec::Execution;
use chaos_core::fmt::{
    block_sum, check_distinct_degrees, contraction_norms, cross_estimates, doubled_pairs,
    exact_report, ks_distance, marginal_targets, nonnegativity_gaps, simulate_many,
    verdict, Case, ChaosVariable, CriterionSpec, Estimate, KsResult, MomentReport, Quantity, Role,
    Row, Verdict,
};
use chaos_core::tensor::ComplexKernel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Environment variable consulted when the config has no seed.
pub const SEED_ENV: &str = "CHAOS_SEED";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("missing input file {}: {msg}", path.display())]
    MissingFile { path: PathBuf, msg: String },
    #[error("execution failed: {0}")]
    Execution(String),
}

type Result<T> = std::result::Result<T, ExperimentError>;

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ExperimentError::Config(msg.into()))
}

fn exec_err(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Execution(e.to_string())
}

/// Where a kernel comes from.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSource {
    /// `e_1^{⊗m} ⊗ ē_1^{⊗n}` over one coordinate, summed over blocks.
    Block { m: usize, n: usize },
    /// Path to a kernel text file, relative to the config file.
    File(PathBuf),
    /// Kernel text inline.
    Inline(String),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    pub case: String,
    pub sigma2: f64,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default = "default_chi_scale")]
    pub chi_square_scale: f64,
}

fn default_chi_scale() -> f64 {
    0.5
}

impl CriterionConfig {
    fn to_spec(&self) -> Result<CriterionSpec> {
        let Some(case) = Case::parse(&self.case) else {
            return config_err(format!(
                "unknown case `{}`; expected gaussian-offdiag, gaussian-diag, gaussian-degenerate, \
                 chi-square-offdiag, chi-square-diag or multichaos",
                self.case
            ));
        };
        Ok(CriterionSpec {
            case,
            sigma2: self.sigma2,
            a: self.a,
            b: self.b,
            chi_square_scale: self.chi_square_scale,
        })
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Component {
    #[serde(default)]
    pub kernel: Option<KernelSource>,
    #[serde(default)]
    pub kernels: Vec<KernelSource>,
    pub criterion: CriterionConfig,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kernel: Option<KernelSource>,
    /// Kernels summed into one variable (sums across bidegrees).
    #[serde(default)]
    pub kernels: Vec<KernelSource>,
    /// Components of a multivariate experiment.
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub criterion: Option<CriterionConfig>,
    /// Block counts; each `F_k` is the normalized sum of `k` independent
    /// copies of the configured variable.
    #[serde(default = "default_k")]
    pub k: Vec<u64>,
    /// When false the configured variable is used as is, at `k = 1` only.
    #[serde(default = "default_true")]
    pub blocks: bool,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Exact oracle moments instead of Monte Carlo.
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_true")]
    pub ks_test: bool,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_k() -> Vec<u64> {
    vec![1]
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::MissingFile {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        Self::from_json(&text)
    }
}

fn load_kernel(src: &KernelSource, base: &Path) -> Result<(ComplexKernel, bool)> {
    let parse = |text: &str| {
        ComplexKernel::from_text(text).map_err(|e| ExperimentError::Config(format!("kernel: {e}")))
    };
    match src {
        KernelSource::Block { m, n } => Ok((ComplexKernel::rank_one(&[cint(1)], *m, *n), true)),
        KernelSource::Inline(text) => Ok((parse(text)?, false)),
        KernelSource::File(p) => {
            let path = if p.is_absolute() { p.clone() } else { base.join(p) };
            let text = fs::read_to_string(&path).map_err(|e| ExperimentError::MissingFile {
                path: path.clone(),
                msg: e.to_string(),
            })?;
            Ok((parse(&text)?, false))
        }
    }
}

fn load_variable(single: &Option<KernelSource>, many: &[KernelSource], base: &Path) -> Result<(ChaosVariable, bool)> {
    let sources: Vec<&KernelSource> = single.iter().chain(many).collect();
    if sources.is_empty() {
        return config_err("no kernel given");
    }
    let mut kernels = Vec::new();
    let mut all_blocks = true;
    for s in sources {
        let (k, block) = load_kernel(s, base)?;
        all_blocks &= block;
        kernels.push(k);
    }
    let dim = kernels.iter().map(ComplexKernel::dim).max().unwrap_or(1);
    let kernels = kernels
        .into_iter()
        .map(|k| k.embed(0, dim))
        .collect::<chaos_core::Result<Vec<_>>>()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let var = ChaosVariable::new(kernels, chaos_core::exact::rat(1)).map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok((var, all_blocks))
}

fn validate_common(cfg: &ExperimentConfig) -> Result<Vec<u64>> {
    if cfg.k.is_empty() {
        return config_err("`k` must list at least one block count");
    }
    if cfg.k.contains(&0) {
        return config_err("block counts must be positive");
    }
    if cfg.k.windows(2).any(|w| w[0] >= w[1]) {
        return config_err("`k` must be strictly increasing");
    }
    if !cfg.blocks && cfg.k != [1] {
        return config_err("`blocks: false` runs a single variable; set `k` to [1] or omit it");
    }
    if !cfg.exact {
        match cfg.n {
            Some(n) if n >= 2 => {}
            Some(n) => return config_err(format!("`n` must be at least 2, got {n}")),
            None => return config_err("`n` is required for Monte Carlo runs"),
        }
    }
    Ok(cfg.k.clone())
}

fn resolve_seed(cfg: &ExperimentConfig) -> Result<u64> {
    if let Some(s) = cfg.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| ExperimentError::Config(format!("{SEED_ENV}=`{v}` is not a 64-bit seed"))),
        Err(_) if cfg.exact => Ok(0),
        Err(_) => config_err(format!("a seed is required: set `seed` or {SEED_ENV}")),
    }
}

/// Everything an experiment writes.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub csv: String,
    pub json: Value,
    pub pass: bool,
}

fn report_json(k: u64, r: &MomentReport) -> Value {
    let values: serde_json::Map<String, Value> = Quantity::ALL
        .iter()
        .map(|&q| {
            let e = r.get(q);
            (q.name().to_string(), json!({ "re": e.re, "im": e.im, "stderr": e.stderr }))
        })
        .collect();
    json!({ "k": k, "n": r.n, "exact": r.exact, "values": values })
}

fn gaps_json(var: &ChaosVariable, k: u64) -> Result<Value> {
    let g = nonnegativity_gaps(var).map_err(exec_err)?;
    Ok(json!({
        "k": k,
        "u": format_rational(&g.u),
        "v": format_rational(&g.v),
        "uv": format_rational(&g.uv),
        "nonnegative": g.all_nonnegative(),
    }))
}

fn ks_json(values: &[Complex64], v: &Verdict) -> Value {
    let (re_t, im_t) = marginal_targets(v);
    let one = |xs: Vec<f64>, t| match ks_distance(&xs, &t) {
        Ok(KsResult { n, statistic, p_value }) => json!({
            "target": format!("{t:?}"),
            "n": n,
            "statistic": statistic,
            "p_value": p_value,
        }),
        Err(e) => json!({ "target": format!("{t:?}"), "skipped": e.to_string() }),
    };
    json!({
        "re": one(values.iter().map(|z| z.re).collect(), re_t),
        "im": one(values.iter().map(|z| z.im).collect(), im_t),
    })
}

fn csv_of(rows: &[Row]) -> String {
    let mut s = String::from(Row::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Runs a configuration whose relative kernel paths resolve against `base`.
pub fn run(cfg: &ExperimentConfig, base: &Path, exec: Execution) -> Result<ExperimentOutput> {
    let ks = validate_common(cfg)?;
    let seed = resolve_seed(cfg)?;
    if !cfg.components.is_empty() {
        if cfg.kernel.is_some() || !cfg.kernels.is_empty() || cfg.criterion.is_some() {
            return config_err("use either `components` or a top-level kernel with `criterion`");
        }
        return run_multivariate(cfg, &ks, seed, base, exec);
    }
    let (base_var, from_block) = load_variable(&cfg.kernel, &cfg.kernels, base)?;
    if from_block && !cfg.blocks {
        return config_err("`block` kernels need `blocks: true`");
    }
    let Some(crit) = &cfg.criterion else {
        return config_err("`criterion` is required");
    };
    let spec = crit.to_spec()?;
    spec.validate(&base_var.bidegrees()).map_err(|e| ExperimentError::Config(e.to_string()))?;

    let mut reports = Vec::new();
    let mut gaps = Vec::new();
    let mut contractions = Vec::new();
    let mut last_values = None;
    for &k in &ks {
        let var = if cfg.blocks { block_sum(&base_var, k).map_err(exec_err)? } else { base_var.clone() };
        let report = if cfg.exact {
            exact_report(&var).map_err(exec_err)?
        } else {
            let n = cfg.n.expect("validated");
            let values = simulate_many(&[&var], n, seed, exec).map_err(exec_err)?.remove(0);
            let r = MomentReport::from_values(&values, seed).map_err(exec_err)?;
            last_values = Some(values);
            r
        };
        gaps.push(gaps_json(&var, k)?);
        if spec.case == Case::Multichaos {
            contractions.push((k, contraction_norms(&var).map_err(exec_err)?));
        }
        reports.push((k, report));
    }
    let mut v = verdict(&reports, &spec).map_err(exec_err)?;
    if let Some((_, first)) = contractions.first() {
        for (ri, &(r, _, _)) in first.iter().enumerate() {
            for (part, pick) in [("u", 1usize), ("v", 2)] {
                let points: Vec<(u64, Estimate)> = contractions
                    .iter()
                    .map(|(k, rows)| {
                        let q = if pick == 1 { &rows[ri].1 } else { &rows[ri].2 };
                        (*k, Estimate::exact(Complex64::new(to_f64(q), 0.0)))
                    })
                    .collect();
                let name = format!("|{part}(x)_{r}{part}|^2");
                v.push_sequence(&name, Role::Criterion, &points, Complex64::new(0.0, 0.0), false);
            }
        }
    }
    let ks_result = match (&last_values, cfg.ks_test) {
        (Some(vals), true) => ks_json(vals, &v),
        _ => Value::Null,
    };
    let json = json!({
        "seed": seed,
        "n": cfg.n,
        "k": ks,
        "exact": cfg.exact,
        "verdict": v,
        "reports": reports.iter().map(|(k, r)| report_json(*k, r)).collect::<Vec<_>>(),
        "nonnegativity_gaps": gaps,
        "ks": ks_result,
        "pass": v.pass,
    });
    Ok(ExperimentOutput {
        csv: csv_of(&v.rows),
        pass: v.pass,
        json,
    })
}

fn total_degree(var: &ChaosVariable) -> Result<usize> {
    let degrees: Vec<usize> = var.bidegrees().iter().map(|(m, n)| m + n).collect();
    if degrees.iter().any(|&d| d != degrees[0]) {
        return config_err("each component must have one total degree");
    }
    Ok(degrees[0])
}

fn run_multivariate(
    cfg: &ExperimentConfig,
    ks: &[u64],
    seed: u64,
    base: &Path,
    exec: Execution,
) -> Result<ExperimentOutput> {
    if cfg.exact {
        return config_err("multivariate experiments run by Monte Carlo only");
    }
    let mut vars = Vec::new();
    let mut specs = Vec::new();
    for (i, c) in cfg.components.iter().enumerate() {
        let (var, from_block) = load_variable(&c.kernel, &c.kernels, base)?;
        if from_block && !cfg.blocks {
            return config_err("`block` kernels need `blocks: true`");
        }
        let spec = c.criterion.to_spec()?;
        spec.validate(&var.bidegrees())
            .map_err(|e| ExperimentError::Config(format!("component {}: {e}", i + 1)))?;
        vars.push(var);
        specs.push(spec);
    }
    let chi = specs[0].case.is_chi_square();
    if specs.iter().any(|s| s.case.is_chi_square() != chi) {
        return config_err("components must all target Gaussian laws or all chi-square laws");
    }
    let degrees = vars.iter().map(total_degree).collect::<Result<Vec<_>>>()?;
    check_distinct_degrees(&degrees).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let dim = vars.iter().map(ChaosVariable::dim).max().unwrap_or(1);
    let vars = vars
        .iter()
        .map(|v| v.widen(dim))
        .collect::<chaos_core::Result<Vec<_>>>()
        .map_err(exec_err)?;
    let pairs = doubled_pairs(&degrees);
    let n = cfg.n.expect("validated");

    let mut per_component: Vec<Vec<(u64, MomentReport)>> = vec![Vec::new(); vars.len()];
    let mut cross: Vec<Vec<(u64, Estimate, Estimate)>> = vec![Vec::new(); pairs.len()];
    for &k in ks {
        let fk = vars
            .iter()
            .map(|v| if cfg.blocks { block_sum(v, k) } else { Ok(v.clone()) })
            .collect::<chaos_core::Result<Vec<_>>>()
            .map_err(exec_err)?;
        let refs: Vec<&ChaosVariable> = fk.iter().collect();
        let values = simulate_many(&refs, n, seed, exec).map_err(exec_err)?;
        for (i, vals) in values.iter().enumerate() {
            per_component[i].push((k, MomentReport::from_values(vals, seed).map_err(exec_err)?));
        }
        for (p, &(j, i)) in pairs.iter().enumerate() {
            let (sq, ab) = cross_estimates(&values[j], &values[i]).map_err(exec_err)?;
            cross[p].push((k, sq, ab));
        }
    }
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut pass = true;
    for (i, (reports, spec)) in per_component.iter().zip(&specs).enumerate() {
        let mut v = verdict(reports, spec).map_err(exec_err)?;
        for r in &mut v.rows {
            r.quantity = format!("F{} {}", i + 1, r.quantity);
        }
        pass &= v.pass;
        rows.extend(v.rows.iter().cloned());
        verdicts.push(v);
    }
    // cross conditions enter the chi-square theorem only
    let role = if chi { Role::Criterion } else { Role::Auxiliary };
    let mut holder = Verdict {
        case: specs[0].case,
        sigma2: specs[0].sigma2,
        a: 0.0,
        b: 0.0,
        rows: Vec::new(),
        sequences: Vec::new(),
        stated_limits: Vec::new(),
        configured_law: None,
        notes: Vec::new(),
        pass: true,
    };
    for (p, &(j, i)) in pairs.iter().enumerate() {
        let sq: Vec<(u64, Estimate)> = cross[p].iter().map(|(k, a, _)| (*k, *a)).collect();
        let ab: Vec<(u64, Estimate)> = cross[p].iter().map(|(k, _, b)| (*k, *b)).collect();
        let zero = Complex64::new(0.0, 0.0);
        holder.push_sequence(&format!("E[F{}^2 F{}]", j + 1, i + 1), role, &sq, zero, true);
        holder.push_sequence(&format!("E[|F{}|^2 F{}]", j + 1, i + 1), role, &ab, zero, true);
    }
    pass &= holder.pass;
    rows.extend(holder.rows.iter().cloned());
    let json = json!({
        "seed": seed,
        "n": n,
        "k": ks,
        "degrees": degrees,
        "components": verdicts,
        "cross": holder.sequences,
        "reports": per_component
            .iter()
            .map(|rs| rs.iter().map(|(k, r)| report_json(*k, r)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    Ok(ExperimentOutput {
        csv: csv_of(&rows),
        json,
        pass,
    })
}

/// Writes `moments.csv` and `verdict.json` into `out`.
pub fn write_outputs(out: &Path, o: &ExperimentOutput) -> Result<()> {
    fs::create_dir_all(out).map_err(exec_err)?;
    fs::write(out.join("moments.csv"), &o.csv).map_err(exec_err)?;
    let mut text = serde_json::to_string_pretty(&o.json).map_err(exec_err)?;
    text.push('\n');
    fs::write(out.join("verdict.json"), text).map_err(exec_err)?;
    Ok(())
}

/// Short human summary of a finished run.
pub fn summary(o: &ExperimentOutput) -> String {
    let rows = o.csv.lines().count().saturating_sub(1);
    format!("{rows} moment rows; overall verdict {}", if o.pass { "PASS" } else { "FAIL" })
}
