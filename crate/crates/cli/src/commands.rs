//! Subcommand implementations. Each returns an [`Output`] holding both the
//! machine-readable JSON and a short human-readable rendering.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use monocat::cluster::{self, ClusterError, Limits, Seed};
use monocat::fpoly::{self, FPoly, FpolyError};
use monocat::grass::{self, GrassError};
use monocat::laurent::{LaurentError, LaurentPoly};
use monocat::levels::{self, LevelsError};
use monocat::qchar::{self, FmOptions, QcharError, Route, YMonomial};
use monocat::roots::{DynkinData, RootVector, RootsError};
use monocat::verify::{self, VerificationReport};

/// Environment variable holding default limits, in the `--limits` syntax.
pub const LIMITS_ENV: &str = "MONOCAT_LIMITS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Limit(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::LimitExceeded(m) => CliError::Limit(m),
            ClusterError::FrozenDirection(_) | ClusterError::UnknownLabel(_) | ClusterError::Malformed(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<RootsError> for CliError {
    fn from(e: RootsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<LaurentError> for CliError {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<FpolyError> for CliError {
    fn from(e: FpolyError) -> Self {
        match e {
            FpolyError::Cluster(c) => c.into(),
            FpolyError::Roots(r) => r.into(),
            FpolyError::Laurent(l) => l.into(),
            FpolyError::NotTwoRestricted(_) | FpolyError::NotAlmostPositive(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<QcharError> for CliError {
    fn from(e: QcharError) -> Self {
        match e {
            QcharError::CapExceeded(m) => CliError::Limit(m),
            QcharError::Cluster(c) => c.into(),
            QcharError::Fpoly(f) => f.into(),
            QcharError::Roots(r) => r.into(),
            QcharError::NotDominant(_)
            | QcharError::NotJDominant { .. }
            | QcharError::NotC1(_)
            | QcharError::Parse(_)
            | QcharError::OutOfProvedScope(_)
            | QcharError::NotMinuscule(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<GrassError> for CliError {
    fn from(e: GrassError) -> Self {
        match e {
            GrassError::ScaleExceeded(m) => CliError::Limit(m),
            GrassError::Cluster(c) => c.into(),
            GrassError::UnsupportedRoot(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<LevelsError> for CliError {
    fn from(e: LevelsError) -> Self {
        match e {
            LevelsError::Cluster(c) => c.into(),
            LevelsError::Qchar(q) => q.into(),
            LevelsError::Laurent(l) => l.into(),
            LevelsError::OutOfRange(_) => CliError::Usage(e.to_string()),
        }
    }
}

/// Result of one subcommand. `success == false` maps to exit code 1.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub success: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, success: true }
    }
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

pub fn root_json(r: &RootVector) -> Value {
    Value::Array(r.0.iter().map(s).collect())
}

/// Parses `seeds=N,terms=M`; missing keys keep the values of `base`.
pub fn parse_limits(spec: &str, base: Limits) -> Result<Limits, CliError> {
    let mut out = base;
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("limit {:?} is not key=value", part)))?;
        let v: usize = v
            .trim()
            .replace('_', "")
            .parse()
            .map_err(|_| CliError::Usage(format!("limit value {:?} is not a count", v)))?;
        match k.trim() {
            "seeds" => out.max_seeds = v,
            "terms" => out.max_terms = v,
            other => return Err(CliError::Usage(format!("unknown limit {:?}", other))),
        }
    }
    Ok(out)
}

/// Limits from the environment, then the command line.
pub fn resolve_limits(flag: Option<&str>) -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Ok(env) = std::env::var(LIMITS_ENV) {
        limits = parse_limits(&env, limits)?;
    }
    if let Some(f) = flag {
        limits = parse_limits(f, limits)?;
    }
    Ok(limits)
}

pub fn parse_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| CliError::Usage(format!("{:?} is not an integer", p))))
        .collect()
}

pub fn dynkin(type_name: &str, i0: Option<&str>) -> Result<DynkinData, CliError> {
    match i0 {
        None => Ok(DynkinData::parse(type_name)?),
        Some(list) => {
            let v: Vec<usize> = parse_list(list)?
                .into_iter()
                .map(|x| usize::try_from(x).map_err(|_| CliError::Usage(format!("bad vertex {}", x))))
                .collect::<Result<_, _>>()?;
            Ok(DynkinData::parse_with_i0(type_name, Some(&v))?)
        }
    }
}

pub fn root(d: &DynkinData, s: &str) -> Result<RootVector, CliError> {
    let v = parse_list(s.trim_matches(|c| c == '(' || c == ')'))?;
    if v.len() != d.n {
        return Err(CliError::Usage(format!("root {:?} needs {} coordinates", s, d.n)));
    }
    Ok(RootVector(v.into_iter().map(|x| x as i32).collect()))
}

fn dynkin_json(d: &DynkinData) -> Value {
    json!({ "type": d.name(), "i0": d.i0().iter().map(s).collect::<Vec<_>>() })
}

/// Initial seed of `C_1` (for `ell == 1`) or of `Γ_ℓ`.
pub fn initial_seed(d: &DynkinData, ell: usize) -> Result<Seed, CliError> {
    match ell {
        0 => Err(CliError::Usage("ell must be at least 1".into())),
        1 => Ok(cluster::build_c1_seed(d)),
        _ => Ok(levels::build_gamma_ell_seed(d, ell).seed),
    }
}

fn relation_json(seed: &Seed, rel: &cluster::ExchangeRelation) -> Value {
    let side = |mono: &[(usize, u32)]| {
        let p = mono
            .iter()
            .fold(LaurentPoly::one(), |acc, &(row, e)| acc.mul(&seed.vars[row].pow(e)));
        json!({
            "factors": mono.iter().map(|&(row, e)| json!({ "position": s(row + 1), "exponent": s(e) })).collect::<Vec<_>>(),
            "value": p.to_string(),
        })
    };
    json!({
        "direction": s(rel.direction + 1),
        "plus": side(&rel.plus),
        "minus": side(&rel.minus),
        "old": rel.old.to_string(),
        "new": rel.new.to_string(),
    })
}

/// Applies 1-based directions in order, recording each relation.
pub fn mutate(start: Seed, seq: &[i64]) -> Result<Output, CliError> {
    let mut seed = start;
    let mut rels = Vec::new();
    let mut text = String::new();
    for &k in seq {
        let k0 = usize::try_from(k - 1).map_err(|_| CliError::Usage(format!("direction {} is not positive", k)))?;
        let (next, rel) = seed.mutate_with_relation(k0)?;
        text.push_str(&format!(
            "mu_{}: ({}) * ({}) = {}\n",
            k,
            rel.old,
            rel.new,
            rel.old.mul(&rel.new)
        ));
        rels.push(relation_json(&seed, &rel));
        seed = next;
    }
    for (i, v) in seed.vars.iter().enumerate() {
        text.push_str(&format!("{}: {}\n", i + 1, v));
    }
    Ok(Output::ok(json!({ "seed": seed.to_json(), "relations": rels }), text))
}

/// Summary of an atlas. For `ell == 1` variables carry root labels.
pub fn enumerate(d: &DynkinData, ell: usize, limits: Limits, dims: bool) -> Result<Output, CliError> {
    let seed = initial_seed(d, ell)?;
    let atlas = cluster::enumerate_atlas(&seed, limits)?;
    let labels: Option<Vec<RootVector>> = if ell == 1 {
        Some(cluster::label_by_denominator(atlas.clone(), d)?.labels)
    } else {
        None
    };
    let dimensions = if dims {
        Some({
        let (v, f) = match ell {
            1 => levels::c1_atlas_dimensions(d, &atlas)?,
            _ => levels::atlas_dimensions(d, ell, &atlas)?,
        };
        let strings = |xs: Vec<_>| xs.iter().map(ToString::to_string).collect::<Vec<String>>();
        (strings(v), strings(f))
    })
    } else {
        None
    };
    let variables: Vec<Value> = atlas
        .variables
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut v = json!({ "index": s(i), "value": p.to_string() });
            if let Some(l) = &labels {
                v["label"] = root_json(&l[i]);
            }
            if let Some((dv, _)) = &dimensions {
                v["dimension"] = s(&dv[i]);
            }
            v
        })
        .collect();
    let frozen: Vec<Value> = atlas
        .frozen
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut v = json!({ "index": s(i), "value": p.to_string() });
            if let Some((_, df)) = &dimensions {
                v["dimension"] = s(&df[i]);
            }
            v
        })
        .collect();
    let clusters: Vec<Value> = atlas
        .clusters
        .iter()
        .map(|c| match &labels {
            Some(l) => Value::Array(c.iter().map(|&v| root_json(&l[v])).collect()),
            None => Value::Array(c.iter().map(s).collect()),
        })
        .collect();
    let mut text = format!(
        "{} ell={}: {} clusters, {} cluster variables, {} frozen\n",
        d.name(),
        ell,
        atlas.clusters.len(),
        atlas.variables.len(),
        atlas.frozen.len()
    );
    for (i, p) in atlas.variables.iter().enumerate() {
        let tag = labels.as_ref().map(|l| format!("x[{}]", l[i])).unwrap_or_else(|| format!("#{}", i));
        let dim = dimensions.as_ref().map(|(dv, _)| format!("  (dim {})", dv[i])).unwrap_or_default();
        text.push_str(&format!("{} = {}{}\n", tag, p, dim));
    }
    let json = json!({
        "dynkin": dynkin_json(d),
        "ell": s(ell),
        "counts": {
            "clusters": s(atlas.clusters.len()),
            "variables": s(atlas.variables.len()),
            "frozen": s(atlas.frozen.len()),
            "seeds": s(atlas.seeds.len()),
        },
        "variables": variables,
        "frozen": frozen,
        "clusters": clusters,
    });
    Ok(Output::ok(json, text))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpolyRoute {
    Principal,
    Combinatorial,
    Geometric,
    /// Principal and combinatorial.
    Both,
    All,
}

impl std::str::FromStr for FpolyRoute {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "principal" => FpolyRoute::Principal,
            "combinatorial" => FpolyRoute::Combinatorial,
            "geometric" => FpolyRoute::Geometric,
            "both" => FpolyRoute::Both,
            "all" => FpolyRoute::All,
            _ => return Err(CliError::Usage(format!("unknown route {:?}", s))),
        })
    }
}

pub fn fpoly_cmd(d: &DynkinData, alpha: &RootVector, route: FpolyRoute) -> Result<Output, CliError> {
    let mut polys: Vec<(&str, FPoly)> = Vec::new();
    if matches!(route, FpolyRoute::Principal | FpolyRoute::Both | FpolyRoute::All) {
        polys.push(("principal", fpoly::f_poly_principal(alpha, d)?));
    }
    if matches!(route, FpolyRoute::Combinatorial | FpolyRoute::Both | FpolyRoute::All) {
        polys.push(("combinatorial", fpoly::f_poly_combinatorial(alpha, d)?));
    }
    if matches!(route, FpolyRoute::Geometric | FpolyRoute::All) {
        polys.push(("geometric", grass::geometric_fpoly(alpha, d)?));
    }
    let agree = polys.windows(2).all(|w| w[0].1 == w[1].1);
    let mut text = String::new();
    let mut routes = serde_json::Map::new();
    for (name, f) in &polys {
        text.push_str(&format!("{} ({} terms): {}\n", name, f.len(), f));
        routes.insert(name.to_string(), json!({ "poly": f.to_string(), "terms": s(f.len()) }));
    }
    if polys.len() > 1 {
        text.push_str(if agree { "match\n" } else { "MISMATCH\n" });
    }
    let json = json!({
        "dynkin": dynkin_json(d),
        "root": root_json(alpha),
        "routes": routes,
        "match": agree,
    });
    Ok(Output { json, text, success: agree })
}

fn char_output(c: &qchar::DecoratedQChar) -> Output {
    Output::ok(
        c.to_json(),
        format!("{}\n{} terms, {} monomials counted with multiplicity\n", c, c.len(), c.dimension()),
    )
}

pub fn qchar_fm(d: &DynkinData, mono: &str, truncate: Option<u32>, max_monomials: Option<usize>) -> Result<Output, CliError> {
    let m: YMonomial = mono.parse()?;
    let mut opts = match truncate {
        None => FmOptions::default(),
        Some(2) => FmOptions::truncated_le2(),
        Some(t) => FmOptions {
            max_spectral: Some(t as i32),
            ..FmOptions::default()
        },
    };
    if let Some(cap) = max_monomials {
        opts.max_monomials = cap;
    }
    Ok(char_output(&qchar::frenkel_mukhin(&m, d, &opts)?))
}

pub fn qchar_kr(d: &DynkinData, vertex: usize, k: u32, r: i32) -> Result<Output, CliError> {
    if vertex == 0 || vertex > d.n {
        return Err(CliError::Usage(format!("vertex {} out of range", vertex)));
    }
    Ok(char_output(&qchar::kr_character(vertex - 1, k, r, d)?))
}

pub fn qchar_c1(d: &DynkinData, mono: &str, route: Route) -> Result<Output, CliError> {
    let m: YMonomial = mono.parse()?;
    Ok(char_output(&qchar::truncated_char_c1(&m, d, route)?))
}

pub fn qchar_simple(d: &DynkinData, alpha: &RootVector, route: Route) -> Result<Output, CliError> {
    Ok(char_output(&qchar::truncated_char_c1(&qchar::y_gamma(alpha, d), d, route)?))
}

/// Simple constituents of `⊗ S(α)` over the given roots.
pub fn qchar_decompose(d: &DynkinData, roots: &[RootVector]) -> Result<Output, CliError> {
    if roots.is_empty() {
        return Err(CliError::Usage("no factors given".into()));
    }
    let table = |m: &YMonomial| qchar::truncated_char_c1(m, d, Route::Fpoly);
    let chars = roots
        .iter()
        .map(|r| table(&qchar::y_gamma(r, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let parts: BTreeMap<YMonomial, u64> = qchar::decompose_product(&chars, table)?;
    let mut text = String::new();
    let list: Vec<Value> = parts
        .iter()
        .map(|(m, k)| {
            let (c, gamma) = qchar::c1_factorization(m, d).unwrap_or((vec![], RootVector::zero(d.n)));
            text.push_str(&format!("{} x L({})  [F^{:?} Y^{}]\n", k, m, c, gamma));
            json!({ "highest": m.to_string(), "multiplicity": s(k), "gamma": root_json(&gamma) })
        })
        .collect();
    let json = json!({
        "dynkin": dynkin_json(d),
        "factors": roots.iter().map(root_json).collect::<Vec<_>>(),
        "constituents": list,
        "simple": parts.len() == 1 && parts.values().all(|&k| k == 1),
    });
    Ok(Output::ok(json, text))
}

/// `χ(Gr_γ(M))` for every `γ ≤ dim M`, listing the nonempty ones.
pub fn grass_euler(d: &DynkinData, gamma: &RootVector, generic: bool) -> Result<Output, CliError> {
    let family = |p: u64| {
        if generic {
            grass::generic_rep(gamma, d, p)
        } else {
            grass::indecomposable_rep(gamma, d, p)
        }
    };
    family(2)?;
    let table = grass::grassmannian_table(&family, gamma)?;
    let nonempty: Vec<&grass::GrassCount> = table.iter().filter(|g| g.polynomial.iter().any(|&c| c != 0)).collect();
    let mut text = format!("{} nonempty Grassmannians\n", nonempty.len());
    for g in &nonempty {
        text.push_str(&format!("{}  chi = {}  counts {:?}\n", g.gamma, g.euler, g.counts));
    }
    let rows: Vec<Value> = nonempty
        .iter()
        .map(|g| {
            json!({
                "gamma": root_json(&g.gamma),
                "euler": s(g.euler),
                "polynomial": g.polynomial.iter().map(s).collect::<Vec<_>>(),
                "counts": g.counts.iter().map(|(p, c)| json!({ "p": s(p), "count": s(c) })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = json!({
        "dynkin": dynkin_json(d),
        "dimension_vector": root_json(gamma),
        "generic": generic,
        "nonempty": s(nonempty.len()),
        "table": rows,
    });
    Ok(Output::ok(json, text))
}

pub fn levels_seed(d: &DynkinData, ell: usize) -> Result<Output, CliError> {
    if ell == 0 {
        return Err(CliError::Usage("ell must be at least 1".into()));
    }
    let ls = levels::build_gamma_ell_seed(d, ell);
    let labels: Vec<Value> = ls
        .labels
        .iter()
        .map(|l| json!({ "vertex": s(l.vertex + 1), "k": s(l.k), "r": s(l.r), "highest": l.highest_monomial().to_string() }))
        .collect();
    let mut text = String::new();
    for (row, l) in ls.labels.iter().enumerate() {
        text.push_str(&format!("{} = W({})_{{{},{}}}  {:?}\n", ls.seed.vars[row], l.vertex + 1, l.k, l.r, ls.seed.matrix.to_rows()[row]));
    }
    Ok(Output::ok(json!({ "seed": ls.seed.to_json(), "labels": labels }), text))
}

pub fn levels_tsystem(d: &DynkinData, ell: usize) -> Result<Output, CliError> {
    let inst = levels::verify_initial_tsystem(d, ell)?;
    let ok = inst.iter().all(|t| t.holds);
    let text = inst
        .iter()
        .map(|t| format!("({},{}) -> r={} {}\n", t.vertex + 1, t.k, t.new_r, if t.holds { "ok" } else { "FAIL" }))
        .collect();
    let json = json!({
        "dynkin": dynkin_json(d),
        "ell": s(ell),
        "instances": inst.iter().map(|t| json!({ "vertex": s(t.vertex + 1), "k": s(t.k), "new_r": s(t.new_r), "holds": t.holds })).collect::<Vec<_>>(),
        "pass": ok,
    });
    Ok(Output { json, text, success: ok })
}

pub fn levels_grass36() -> Result<Output, CliError> {
    let rep = levels::grassmannian_check()?;
    let mut text = format!("frozen minors equal 1: {}\n", rep.frozen_minors_are_one);
    for e in &rep.entries {
        text.push_str(&format!("{} = {} (dim {}) {}\n", e.module, e.value, e.dimension, if e.ok { "ok" } else { "FAIL" }));
    }
    text.push_str(&format!("[2,3,6][1,4,5] - 1 = {}\n", rep.closing_value));
    let json = json!({
        "frozen_minors_are_one": rep.frozen_minors_are_one,
        "entries": rep.entries.iter().map(|e| json!({ "module": e.module, "value": s(e.value), "dimension": e.dimension, "ok": e.ok })).collect::<Vec<_>>(),
        "closing_value": s(rep.closing_value),
        "pass": rep.pass,
    });
    Ok(Output { json, text, success: rep.pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyCheck {
    All,
    Conjecture,
    Periodic,
    Triples,
    TwoRestricted,
}

impl std::str::FromStr for VerifyCheck {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "all" => VerifyCheck::All,
            "conjecture" => VerifyCheck::Conjecture,
            "periodic" => VerifyCheck::Periodic,
            "triples" => VerifyCheck::Triples,
            "two-restricted" => VerifyCheck::TwoRestricted,
            _ => return Err(CliError::Usage(format!("unknown check {:?}", s))),
        })
    }
}

pub fn verify_cmd(d: &DynkinData, check: VerifyCheck, gamma: Option<&RootVector>) -> Result<Output, CliError> {
    let reports: Vec<VerificationReport> = match check {
        VerifyCheck::All => verify::verify_all(d),
        VerifyCheck::Conjecture => vec![verify::verify_conjecture_c1(d)],
        VerifyCheck::Periodic => vec![verify::periodic_tsystem_verify(d)],
        VerifyCheck::Triples => vec![verify::triple_spot_check(d)],
        VerifyCheck::TwoRestricted => {
            let g = gamma.ok_or_else(|| CliError::Usage("two-restricted needs --gamma".into()))?;
            vec![verify::two_restricted_check(g, d)]
        }
    };
    let success = reports.iter().all(|r| r.passed());
    let text = reports
        .iter()
        .map(|r| format!("{:<40} {:?} ({} ms) {}\n", r.id, r.status, r.runtime_ms, r.witness))
        .collect();
    let json = json!({ "reports": reports, "pass": success });
    Ok(Output { json, text, success })
}
