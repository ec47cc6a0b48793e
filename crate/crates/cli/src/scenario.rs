//! Validated scenario files.

use std::collections::BTreeMap;

use lightfol_core::foliation::{FoliationSpec, RadicalChoice};
use lightfol_core::forms::Convention;
use lightfol_core::killingflow::FlowScenario;
use lightfol_core::lightfn::LightlikeFunctionScenario;
use lightfol_core::scenario::{AnyMetric, Scenario};
use lightfol_core::warped::{FibreMetric, WarpedMetric};
use lightfol_core::{parse_expression, Expr, Metric, MetricField, VectorField};

use crate::file::{self, Entry, RawFile, Section};
use crate::sampling::Sampling;
use crate::LoadError;

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// A foliated chart; `lightlike` is set for a single level function
    /// with `radical = gradient`.
    Foliation { scenario: Scenario, lightlike: Option<LightlikeFunctionScenario> },
    Flow(FlowScenario),
    /// A warped product with a degenerate fibre, foliated by the fibres.
    Warped(WarpedMetric),
}

/// Which check families apply to a body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Foliation,
    Lightlike,
    Flow,
    Warped,
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Foliation { scenario, .. } => scenario.dim(),
            Body::Flow(f) => f.dim(),
            Body::Warped(w) => w.dim(),
        }
    }

    pub fn families(&self) -> Vec<Family> {
        match self {
            Body::Foliation { lightlike: Some(_), .. } => vec![Family::Foliation, Family::Lightlike],
            Body::Foliation { .. } => vec![Family::Foliation],
            Body::Flow(_) => vec![Family::Flow],
            Body::Warped(_) => vec![Family::Warped],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub convention: Convention,
    pub tolerances: BTreeMap<String, f64>,
    /// Added to κ in the Rummler checks.
    pub kappa_offset: f64,
    /// Negates the κ term of the divergence identity.
    pub divergence_flip: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { convention: Convention::UnitShuffle, tolerances: BTreeMap::new(), kappa_offset: 0.0, divergence_flip: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub radical: String,
    pub complement: String,
    pub convention: String,
    /// `seeded`, or `auto` when screens come from the pivot rule replayed
    /// from the first sample.
    pub screen: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub name: String,
    pub body: Body,
    pub checks: Vec<String>,
    pub sampling: Sampling,
    pub options: Options,
    pub provenance: Provenance,
}

fn parse_err(e: &Entry, message: impl std::fmt::Display) -> LoadError {
    LoadError::Parse { line: e.line, message: message.to_string() }
}

fn invalid(field: &str, message: impl std::fmt::Display) -> LoadError {
    LoadError::Validation { field: field.to_string(), message: message.to_string() }
}

fn require<'a>(sec: &'a Section, sname: &str, key: &str) -> Result<&'a Entry, LoadError> {
    sec.get(key).ok_or_else(|| invalid(&format!("{sname}.{key}"), "missing"))
}

fn expr(e: &Entry, text: &str, dim: usize) -> Result<Expr, LoadError> {
    parse_expression(text, dim).map_err(|err| parse_err(e, format!("`{text}`: {err}")))
}

fn number<T: std::str::FromStr>(e: &Entry) -> Result<T, LoadError> {
    e.value.parse().map_err(|_| parse_err(e, format!("expected a number, found `{}`", e.value)))
}

fn index(e: Option<&Entry>) -> Result<Option<usize>, LoadError> {
    match e {
        None => Ok(None),
        Some(e) if e.value == "none" => Ok(None),
        Some(e) => number(e).map(Some),
    }
}

fn vector(e: &Entry, text: &str, dim: usize) -> Result<VectorField, LoadError> {
    let parts = file::tuple(text).ok_or_else(|| parse_err(e, format!("expected `(c1, …, c{dim})`, found `{text}`")))?;
    if parts.len() != dim {
        return Err(parse_err(e, format!("vector has {} components, chart has {dim}", parts.len())));
    }
    Ok(VectorField::new(parts.iter().map(|p| expr(e, p, dim)).collect::<Result<_, _>>()?))
}

fn vectors(e: &Entry, dim: usize) -> Result<Vec<VectorField>, LoadError> {
    file::split_top(&e.value, ';').iter().map(|t| vector(e, t, dim)).collect()
}

fn exprs(e: &Entry, dim: usize) -> Result<Vec<Expr>, LoadError> {
    file::split_top(&e.value, ';').iter().map(|t| expr(e, t, dim)).collect()
}

/// `diag(a, b, …)` or rows `(g11, g12, …); (g21, …); …`.
fn metric(e: &Entry, dim: usize, idx: Option<usize>) -> Result<MetricField, LoadError> {
    let m = if let Some((name, args)) = file::call(&e.value) {
        if name != "diag" {
            return Err(parse_err(e, format!("unknown metric form `{name}`")));
        }
        if args.len() != dim {
            return Err(parse_err(e, format!("diag has {} entries, chart has {dim}", args.len())));
        }
        MetricField::diagonal(idx, args.iter().map(|a| expr(e, a, dim)).collect::<Result<_, _>>()?)
    } else {
        let rows = file::split_top(&e.value, ';');
        if rows.len() != dim {
            return Err(parse_err(e, format!("metric has {} rows, chart has {dim}", rows.len())));
        }
        let mut entries = Vec::new();
        for r in rows {
            let parts = file::tuple(&r).ok_or_else(|| parse_err(e, format!("expected a row tuple, found `{r}`")))?;
            if parts.len() != dim {
                return Err(parse_err(e, format!("metric row has {} entries, chart has {dim}", parts.len())));
            }
            entries.push(parts.iter().map(|p| expr(e, p, dim)).collect::<Result<Vec<_>, _>>()?);
        }
        MetricField::new(idx, entries)
    };
    m.map_err(|err| parse_err(e, err))
}

fn metric_dim(e: &Entry) -> usize {
    match file::call(&e.value) {
        Some((_, args)) => args.len(),
        None => file::split_top(&e.value, ';').len(),
    }
}

fn manifold(raw: &RawFile) -> Result<(AnyMetric, usize), LoadError> {
    let sec = raw.section("manifold").ok_or_else(|| invalid("manifold", "section missing"))?;
    let dim: usize = number(require(sec, "manifold", "dim")?)?;
    if !(1..=lightfol_core::jet::MAX_DIM).contains(&dim) {
        return Err(invalid("manifold.dim", format!("dimension must lie in 1..={}", lightfol_core::jet::MAX_DIM)));
    }
    let idx = index(sec.get("index"))?;
    Ok((metric(require(sec, "manifold", "metric")?, dim, idx)?.into(), dim))
}

fn warped(sec: &Section) -> Result<WarpedMetric, LoadError> {
    let base_e = require(sec, "warped", "base_metric")?;
    let q = metric_dim(base_e);
    let base = metric(base_e, q, index(sec.get("base_index"))?)?;
    let fibre = if let Some(e) = sec.get("fibre_metric") {
        FibreMetric::Field(metric(e, metric_dim(e), index(sec.get("fibre_index"))?)?)
    } else {
        let emb = require(sec, "warped", "fibre_embedding")?;
        let target_e = require(sec, "warped", "fibre_target")?;
        let td = metric_dim(target_e);
        let target = metric(target_e, td, index(sec.get("fibre_target_index"))?)?;
        let fd: usize = number(require(sec, "warped", "fibre_dim")?)?;
        let parts = file::tuple(&emb.value).ok_or_else(|| parse_err(emb, "expected an embedding tuple"))?;
        if parts.len() != td {
            return Err(parse_err(emb, format!("embedding has {} components, target has {td}", parts.len())));
        }
        let embedding = parts.iter().map(|p| expr(emb, p, fd)).collect::<Result<Vec<_>, _>>()?;
        FibreMetric::Pullback { target, embedding }
    };
    let warp_e = require(sec, "warped", "warp")?;
    let warp = expr(warp_e, &warp_e.value, q)?;
    let rho: usize = sec.get("rho").map(number).transpose()?.unwrap_or(0);
    WarpedMetric::new(base, fibre, warp, rho).map_err(|err| invalid("warped", err))
}

fn foliation(raw: &RawFile, metric: AnyMetric, n: usize, conv: Convention) -> Result<(Body, Provenance), LoadError> {
    let sec = raw.section("foliation").ok_or_else(|| invalid("foliation", "section missing"))?;
    let spec = match (sec.get("level"), sec.get("frame")) {
        (Some(e), None) => {
            let funcs = exprs(e, n)?;
            let pivots = match sec.get("pivots") {
                Some(pe) => Some(
                    file::split_top(&pe.value, ';')
                        .iter()
                        .map(|t| match t.parse::<usize>() {
                            Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                            _ => Err(parse_err(pe, format!("pivot `{t}` is not a coordinate index"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            if pivots.as_ref().is_some_and(|p| p.len() != funcs.len()) {
                return Err(invalid("foliation.pivots", "one pivot per level function"));
            }
            FoliationSpec::LevelFunctions { funcs, pivots }
        }
        (None, Some(e)) => FoliationSpec::ExplicitFrame { fields: vectors(e, n)? },
        _ => return Err(invalid("foliation", "exactly one of `level` and `frame` is required")),
    };
    let comp_sec = raw.section("complement").ok_or_else(|| invalid("complement", "section missing"))?;
    let ce = require(comp_sec, "complement", "fields")?;
    let complement = vectors(ce, n)?;
    let mut scn = Scenario::new(metric, spec, complement);
    scn.convention = conv;
    let radical_text = sec.get("radical").map_or("auto".to_string(), |e| e.value.clone());
    scn.foliation.radical = match radical_text.as_str() {
        "auto" => RadicalChoice::Auto,
        "gradient" => RadicalChoice::Gradient(0),
        _ => {
            let e = sec.get("radical").expect("present");
            if let Some(k) = radical_text.strip_prefix("gradient") {
                let k: usize = k.trim().parse().map_err(|_| parse_err(e, "expected `gradient K`"))?;
                RadicalChoice::Gradient(k.checked_sub(1).ok_or_else(|| parse_err(e, "gradient index is 1-based"))?)
            } else {
                RadicalChoice::Fields(vectors(e, n)?)
            }
        }
    };
    if let Some(e) = sec.get("screen") {
        scn.foliation.screen_tan_seed = Some(vectors(e, n)?);
    }
    if let Some(e) = sec.get("screen_perp") {
        scn.foliation.screen_perp_seed = Some(vectors(e, n)?);
    }
    let lightlike = match (&scn.foliation.spec, &scn.foliation.radical) {
        (FoliationSpec::LevelFunctions { funcs, .. }, RadicalChoice::Gradient(0)) if funcs.len() == 1 => {
            let mut l = LightlikeFunctionScenario::new(scn.metric.clone(), funcs[0].clone(), scn.complement[0].clone());
            l.screen_seed = scn.foliation.screen_tan_seed.clone();
            l.convention = conv;
            Some(l)
        }
        _ => None,
    };
    let screen = if sec.get("screen").is_some() || sec.get("screen_perp").is_some() { "seeded" } else { "auto" };
    let prov = Provenance {
        radical: radical_text,
        complement: ce.value.clone(),
        convention: conv.name().to_string(),
        screen: screen.to_string(),
    };
    Ok((Body::Foliation { scenario: scn, lightlike }, prov))
}

fn flow(raw: &RawFile, metric: AnyMetric, n: usize, conv: Convention) -> Result<(Body, Provenance), LoadError> {
    let sec = raw.section("flow").expect("caller checked");
    let xi_e = require(sec, "flow", "xi")?;
    let v_e = require(sec, "flow", "v")?;
    let xi = vector(xi_e, &xi_e.value, n)?;
    let v = vector(v_e, &v_e.value, n)?;
    let w = sec.get("w").map(|e| vector(e, &e.value, n)).transpose()?;
    let mut f = FlowScenario::new(metric, xi, v, w);
    f.convention = conv;
    let prov = Provenance {
        radical: xi_e.value.clone(),
        complement: v_e.value.clone(),
        convention: conv.name().to_string(),
        screen: "none".to_string(),
    };
    Ok((Body::Flow(f), prov))
}

fn options(raw: &RawFile) -> Result<Options, LoadError> {
    let mut o = Options::default();
    let Some(sec) = raw.section("options") else { return Ok(o) };
    for (k, e) in &sec.entries {
        match k.as_str() {
            "convention" => {
                o.convention = match e.value.as_str() {
                    "unit" => Convention::UnitShuffle,
                    "factorial" => Convention::FactorialAlternation,
                    other => return Err(parse_err(e, format!("unknown convention `{other}`"))),
                }
            }
            "kappa_offset" => o.kappa_offset = number(e)?,
            "divergence_flip" => {
                o.divergence_flip = e.value.parse().map_err(|_| parse_err(e, "expected true or false"))?
            }
            _ => match k.strip_prefix("tol.") {
                Some(name) => {
                    o.tolerances.insert(name.to_string(), number(e)?);
                }
                None => return Err(parse_err(e, format!("unknown option `{k}`"))),
            },
        }
    }
    Ok(o)
}

fn sampling(raw: &RawFile, n: usize) -> Result<Sampling, LoadError> {
    let sec = raw.section("sampling").ok_or_else(|| invalid("sampling", "section missing"))?;
    let nums = |e: &Entry, t: &str| -> Result<Vec<f64>, LoadError> {
        let parts = file::tuple(t).ok_or_else(|| parse_err(e, format!("expected a tuple, found `{t}`")))?;
        parts.iter().map(|p| p.parse::<f64>().map_err(|_| parse_err(e, format!("`{p}` is not a number")))).collect()
    };
    match (sec.get("points"), sec.get("box")) {
        (Some(e), None) => {
            let pts = file::split_top(&e.value, ';').iter().map(|t| nums(e, t)).collect::<Result<Vec<_>, _>>()?;
            if pts.iter().any(|p| p.len() != n) {
                return Err(parse_err(e, format!("sample points need {n} coordinates")));
            }
            Ok(Sampling::Points(pts))
        }
        (None, Some(e)) => {
            let ranges = file::split_top(&e.value, ';').iter().map(|t| nums(e, t)).collect::<Result<Vec<_>, _>>()?;
            if ranges.len() != n || ranges.iter().any(|r| r.len() != 2 || !(r[0] <= r[1])) {
                return Err(parse_err(e, format!("box needs {n} ranges `(lo, hi)`")));
            }
            let count = sec.get("count").map(number).transpose()?.unwrap_or(8);
            let seed = sec.get("seed").map(number).transpose()?.unwrap_or(0);
            Ok(Sampling::Box { lo: ranges.iter().map(|r| r[0]).collect(), hi: ranges.iter().map(|r| r[1]).collect(), count, seed })
        }
        _ => Err(invalid("sampling", "exactly one of `points` and `box` is required")),
    }
}

/// Parses and validates a scenario. Evaluation errors are left to the run.
pub fn load_str(text: &str, default_name: &str) -> Result<ScenarioFile, LoadError> {
    let raw = file::read(text)?;
    let known = ["scenario", "manifold", "foliation", "complement", "flow", "warped", "checks", "sampling", "options"];
    if let Some(s) = raw.sections.keys().find(|s| !known.contains(&s.as_str())) {
        return Err(invalid(s, "unknown section"));
    }
    let name = raw
        .section("scenario")
        .and_then(|s| s.get("name"))
        .map_or(default_name.to_string(), |e| e.value.clone());
    let opts = options(&raw)?;
    let conv = opts.convention;
    let has = |s: &str| raw.section(s).is_some();
    let (body, provenance) = if has("flow") {
        if has("foliation") || has("warped") {
            return Err(invalid("flow", "a flow scenario carries no [foliation] or [warped] section"));
        }
        let (m, n) = manifold(&raw)?;
        flow(&raw, m, n, conv)?
    } else if let Some(sec) = raw.section("warped") {
        if has("manifold") {
            return Err(invalid("manifold", "a warped scenario builds its own metric"));
        }
        let w = warped(sec)?;
        if has("foliation") {
            let n = w.dim();
            foliation(&raw, w.into(), n, conv)?
        } else {
            let prov = Provenance {
                radical: "fibre".into(),
                complement: "none".into(),
                convention: conv.name().into(),
                screen: "none".into(),
            };
            (Body::Warped(w), prov)
        }
    } else {
        let (m, n) = manifold(&raw)?;
        if m.dim() != n {
            return Err(invalid("manifold.metric", "metric size differs from dim"));
        }
        foliation(&raw, m, n, conv)?
    };
    let n = body.dim();
    let checks_sec = raw.section("checks").ok_or_else(|| invalid("checks", "section missing"))?;
    let run = require(checks_sec, "checks", "run")?;
    let checks: Vec<String> = file::split_top(&run.value, ',').into_iter().filter(|s| !s.is_empty()).collect();
    let families = body.families();
    for c in &checks {
        match crate::checks::find(c) {
            Some(def) if families.contains(&def.family) => {}
            Some(_) => return Err(invalid("checks.run", format!("check `{c}` does not apply to this scenario"))),
            None => return Err(parse_err(run, format!("unknown check `{c}`"))),
        }
    }
    for name in opts.tolerances.keys() {
        if crate::checks::find(name).is_none() {
            return Err(invalid(&format!("options.tol.{name}"), "unknown check"));
        }
    }
    let sampling = sampling(&raw, n)?;
    Ok(ScenarioFile { name, body, checks, sampling, options: opts, provenance })
}

pub fn load_scenario(path: &std::path::Path) -> Result<ScenarioFile, LoadError> {
    let bytes = std::fs::read(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|_| LoadError::Io(format!("{}: not UTF-8", path.display())))?;
    let stem = path.file_stem().map_or("scenario".to_string(), |s| s.to_string_lossy().into_owned());
    load_str(&text, &stem)
}
