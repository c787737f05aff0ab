//! Exchange matrices, seeds, finite-type atlases, denominator labels,
//! compatibility and cluster expansions.
//!
//! Cluster variables are always Laurent polynomials in the variables of the
//! initial seed.  Rows of an exchange matrix index all `r` variables (mutable
//! ones first, frozen ones last); columns index the `r - n` mutable ones.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::laurent::{LaurentError, LaurentPoly, VarId};
use crate::roots::{DynkinData, RootVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("direction {0} is frozen or out of range")]
    FrozenDirection(usize),
    #[error("exchange polynomial is not divisible by the old variable")]
    NonExactDivision,
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("denominator vectors do not match the almost positive roots: {0}")]
    LabelingFailure(String),
    #[error("{0} has no cluster expansion")]
    NoExpansion(RootVector),
    #[error("{0} has more than one cluster expansion")]
    MultipleExpansions(RootVector),
    #[error("{0} is not a label of this atlas")]
    UnknownLabel(RootVector),
    #[error("malformed seed: {0}")]
    Malformed(String),
}

impl From<LaurentError> for ClusterError {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::NonExactDivision => ClusterError::NonExactDivision,
            other => ClusterError::Malformed(other.to_string()),
        }
    }
}

/// Integer `r × (r-n)` matrix with skew-symmetric principal part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i32>,
}

impl ExchangeMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExchangeMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i32>]) -> Result<Self, ClusterError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) || rows.len() < cols {
            return Err(ClusterError::Malformed("ragged or too few rows".into()));
        }
        let m = ExchangeMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        };
        if !m.principal_is_skew() {
            return Err(ClusterError::Malformed("principal part is not skew-symmetric".into()));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn frozen(&self) -> usize {
        self.rows - self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i32>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).take(self.rows).collect()
    }

    pub fn column(&self, k: usize) -> Vec<i32> {
        (0..self.rows).map(|i| self.get(i, k)).collect()
    }

    pub fn principal_is_skew(&self) -> bool {
        (0..self.cols).all(|i| (0..self.cols).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    /// Matrix mutation in (0-based) direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Self, ClusterError> {
        if k >= self.cols {
            return Err(ClusterError::FrozenDirection(k + 1));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let b = self.get(i, j);
                let v = if i == k || j == k {
                    -b
                } else {
                    let (bik, bkj) = (self.get(i, k), self.get(k, j));
                    b + (bik.abs() * bkj + bik * bkj.abs()) / 2
                };
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

/// The two monomials of an exchange relation `x_k x_k' = plus + minus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeRelation {
    pub direction: usize,
    /// `(row, exponent)` pairs of `∏_{b_ik > 0} x_i^{b_ik}`.
    pub plus: Vec<(usize, u32)>,
    /// `(row, exponent)` pairs of `∏_{b_ik < 0} x_i^{-b_ik}`.
    pub minus: Vec<(usize, u32)>,
    pub old: LaurentPoly,
    pub new: LaurentPoly,
}

fn exchange_monomials(m: &ExchangeMatrix, k: usize) -> (Vec<(usize, u32)>, Vec<(usize, u32)>) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for i in 0..m.rows() {
        let b = m.get(i, k);
        if b > 0 {
            plus.push((i, b as u32));
        } else if b < 0 {
            minus.push((i, (-b) as u32));
        }
    }
    (plus, minus)
}

fn product(vars: &[LaurentPoly], mono: &[(usize, u32)]) -> LaurentPoly {
    mono.iter().fold(LaurentPoly::one(), |acc, &(i, e)| acc.mul(&vars[i].pow(e)))
}

/// A seed: exchange matrix plus one Laurent polynomial per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub matrix: ExchangeMatrix,
    pub vars: Vec<LaurentPoly>,
}

impl Seed {
    pub fn new(matrix: ExchangeMatrix, vars: Vec<LaurentPoly>) -> Result<Self, ClusterError> {
        if vars.len() != matrix.rows() {
            return Err(ClusterError::Malformed("one variable per row required".into()));
        }
        Ok(Seed { matrix, vars })
    }

    /// Seed whose variables are fresh indeterminates with the given names.
    pub fn with_names(matrix: ExchangeMatrix, names: &[String]) -> Result<Self, ClusterError> {
        Self::new(matrix, names.iter().map(|s| LaurentPoly::named(s)).collect())
    }

    pub fn n_mutable(&self) -> usize {
        self.matrix.cols()
    }

    pub fn n_frozen(&self) -> usize {
        self.matrix.frozen()
    }

    /// Seed mutation in 0-based direction `k`, also returning the relation fired.
    pub fn mutate_with_relation(&self, k: usize) -> Result<(Seed, ExchangeRelation), ClusterError> {
        let matrix = self.matrix.mutate(k)?;
        let (plus, minus) = exchange_monomials(&self.matrix, k);
        let numer = product(&self.vars, &plus).add(&product(&self.vars, &minus));
        let new = numer.exact_div(&self.vars[k])?;
        let mut vars = self.vars.clone();
        let old = std::mem::replace(&mut vars[k], new.clone());
        Ok((
            Seed { matrix, vars },
            ExchangeRelation {
                direction: k,
                plus,
                minus,
                old,
                new,
            },
        ))
    }

    pub fn mutate(&self, k: usize) -> Result<Seed, ClusterError> {
        Ok(self.mutate_with_relation(k)?.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeedJson {
            matrix: self.matrix.to_rows(),
            frozen: self.n_frozen(),
            vars: self.vars.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ClusterError> {
        let raw: SeedJson =
            serde_json::from_value(v.clone()).map_err(|e| ClusterError::Malformed(e.to_string()))?;
        let matrix = ExchangeMatrix::from_rows(&raw.matrix)?;
        if matrix.frozen() != raw.frozen {
            return Err(ClusterError::Malformed("frozen count disagrees with matrix shape".into()));
        }
        Seed::new(matrix, raw.vars)
    }
}

/// Seed file layout. Integers are written as decimal strings; plain JSON
/// numbers are accepted on input.
#[derive(Serialize, Deserialize)]
struct SeedJson {
    #[serde(with = "decimal_matrix")]
    matrix: Vec<Vec<i32>>,
    #[serde(with = "decimal")]
    frozen: usize,
    vars: Vec<LaurentPoly>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

impl IntOrString {
    fn parse<T: std::str::FromStr + TryFrom<i64>>(self) -> Result<T, String> {
        match self {
            IntOrString::Int(x) => T::try_from(x).map_err(|_| format!("{} out of range", x)),
            IntOrString::Str(s) => s.trim().parse().map_err(|_| format!("bad integer {:?}", s)),
        }
    }
}

mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        super::IntOrString::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod decimal_matrix {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<i32>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<i32>>, D::Error> {
        let raw: Vec<Vec<super::IntOrString>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_iter().map(|x| x.parse().map_err(D::Error::custom)).collect())
            .collect()
    }
}

/// Names of the initial variables of a `C_1` seed: `x1..xn`, then `f1..fn`.
pub fn c1_variable_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|i| format!("x{}", i))
        .chain((1..=n).map(|i| format!("f{}", i)))
        .collect()
}

/// The `2n × n` exchange matrix of the quiver attached to a bipartite diagram:
/// arrows go from `I1` to adjacent `I0` vertices and every vertex is joined
/// to its own frozen copy.
pub fn c1_matrix(d: &DynkinData) -> ExchangeMatrix {
    let n = d.n;
    let mut m = ExchangeMatrix::zero(2 * n, n);
    for i in 0..n {
        for j in d.neighbors(i) {
            m.set(i, j, if d.is_i0(i) { -1 } else { 1 });
        }
        m.set(n + i, i, if d.is_i0(i) { -1 } else { 1 });
    }
    m
}

pub fn build_c1_seed(d: &DynkinData) -> Seed {
    Seed::with_names(c1_matrix(d), &c1_variable_names(d.n)).expect("shape is consistent")
}

/// Bounds on atlas enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_seeds: usize,
    pub max_terms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_seeds: 100_000,
            max_terms: 1_000_000,
        }
    }
}

/// One seed of an atlas: variable indices per row-position and its matrix.
#[derive(Clone, Debug)]
pub struct SeedRecord {
    /// Index into [`Atlas::variables`] for each mutable position.
    pub vars: Vec<usize>,
    pub matrix: ExchangeMatrix,
}

/// All seeds reachable from an initial seed, up to cluster equality.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub initial: Seed,
    /// Distinct non-frozen cluster variables; the first `n_mutable` are initial.
    pub variables: Vec<LaurentPoly>,
    pub frozen: Vec<LaurentPoly>,
    pub seeds: Vec<SeedRecord>,
    /// Sorted variable indices of each seed.
    pub clusters: Vec<Vec<usize>>,
    /// `(seed, direction, seed)` mutation edges.
    pub edges: Vec<(usize, usize, usize)>,
}

impl Atlas {
    pub fn n_mutable(&self) -> usize {
        self.initial.n_mutable()
    }

    pub fn seed(&self, s: usize) -> Seed {
        let rec = &self.seeds[s];
        let vars = rec
            .vars
            .iter()
            .map(|&v| self.variables[v].clone())
            .chain(self.frozen.iter().cloned())
            .collect();
        Seed {
            matrix: rec.matrix.clone(),
            vars,
        }
    }

    pub fn cluster_index(&self, vars: &[usize]) -> Option<usize> {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.clusters.iter().position(|c| *c == key)
    }

    /// Pairs `(x, y, seed, k)` of variables exchanged along some edge, each
    /// pair once: mutating `seed` in direction `k` replaces `x` by `y`.
    ///
    /// Seeds are stored in the order they were first reached, so the new
    /// variable is located by cluster difference rather than by position.
    pub fn exchange_pairs(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &(a, k, b) in &self.edges {
            let x = self.seeds[a].vars[k];
            let Some(&y) = self.clusters[b].iter().find(|v| !self.clusters[a].contains(v)) else {
                continue;
            };
            let key = (x.min(y), x.max(y));
            if seen.insert(key) {
                out.push((x, y, a, k));
            }
        }
        out
    }
}

struct Interner {
    vars: Vec<LaurentPoly>,
    index: HashMap<LaurentPoly, usize>,
}

impl Interner {
    fn intern(&mut self, p: LaurentPoly) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        self.vars.push(p.clone());
        self.index.insert(p, self.vars.len() - 1);
        self.vars.len() - 1
    }
}

/// Breadth-first enumeration of all seeds reachable from `s0`.
pub fn enumerate_atlas(s0: &Seed, limits: Limits) -> Result<Atlas, ClusterError> {
    let n = s0.n_mutable();
    let frozen: Vec<LaurentPoly> = s0.vars[n..].to_vec();
    let mut interner = Interner {
        vars: Vec::new(),
        index: HashMap::new(),
    };
    let init_ids: Vec<usize> = s0.vars[..n].iter().map(|v| interner.intern(v.clone())).collect();
    let mut seeds = vec![SeedRecord {
        vars: init_ids.clone(),
        matrix: s0.matrix.clone(),
    }];
    let mut cluster_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut key0 = init_ids;
    key0.sort_unstable();
    cluster_of.insert(key0.clone(), 0);
    let mut clusters = vec![key0];
    // A codimension-one face of a finite-type cluster lies in exactly two
    // clusters, so each face records the pair of variables completing it.
    let mut faces: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];

    while !frontier.is_empty() {
        let mut jobs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        let mut known: Vec<(usize, usize, usize)> = Vec::new();
        for &s in &frontier {
            for k in 0..n {
                let mut face: Vec<usize> = seeds[s].vars.iter().enumerate().filter(|&(p, _)| p != k).map(|(_, &v)| v).collect();
                face.sort_unstable();
                let old = seeds[s].vars[k];
                match faces.get(&face) {
                    Some(&(a, b)) if a == old => known.push((s, k, b)),
                    Some(&(a, b)) if b == old => known.push((s, k, a)),
                    _ => jobs.push((s, k, face)),
                }
            }
        }
        let computed: Vec<Result<(usize, usize, Vec<usize>, LaurentPoly), ClusterError>> = jobs
            .into_par_iter()
            .map(|(s, k, face)| {
                let rec = &seeds[s];
                let vars: Vec<LaurentPoly> = rec
                    .vars
                    .iter()
                    .map(|&v| interner.vars[v].clone())
                    .chain(frozen.iter().cloned())
                    .collect();
                let seed = Seed {
                    matrix: rec.matrix.clone(),
                    vars,
                };
                let (plus, minus) = exchange_monomials(&seed.matrix, k);
                let numer = product(&seed.vars, &plus).add(&product(&seed.vars, &minus));
                if numer.len() > limits.max_terms {
                    return Err(ClusterError::LimitExceeded(format!(
                        "exchange numerator with {} terms",
                        numer.len()
                    )));
                }
                let new = numer.exact_div(&seed.vars[k])?;
                Ok((s, k, face, new))
            })
            .collect();
        let mut results: Vec<(usize, usize, usize)> = known;
        for r in computed {
            let (s, k, face, poly) = r?;
            let id = interner.intern(poly);
            let old = seeds[s].vars[k];
            faces.insert(face, (old, id));
            results.push((s, k, id));
        }
        results.sort_unstable();
        let mut next = Vec::new();
        for (s, k, id) in results {
            let mut vars = seeds[s].vars.clone();
            vars[k] = id;
            let mut key = vars.clone();
            key.sort_unstable();
            let target = match cluster_of.get(&key) {
                Some(&t) => t,
                None => {
                    if seeds.len() >= limits.max_seeds {
                        return Err(ClusterError::LimitExceeded(format!(
                            "more than {} seeds",
                            limits.max_seeds
                        )));
                    }
                    let matrix = seeds[s].matrix.mutate(k)?;
                    seeds.push(SeedRecord { vars, matrix });
                    clusters.push(key.clone());
                    cluster_of.insert(key, seeds.len() - 1);
                    next.push(seeds.len() - 1);
                    seeds.len() - 1
                }
            };
            edges.push((s, k, target));
        }
        frontier = next;
    }
    Ok(Atlas {
        initial: s0.clone(),
        variables: interner.vars,
        frozen,
        seeds,
        clusters,
        edges,
    })
}

/// Denominator vector with respect to the given initial variables:
/// `d_i = -(minimal exponent of x_i)`.
pub fn denominator_vector(p: &LaurentPoly, initial: &[VarId]) -> RootVector {
    RootVector(initial.iter().map(|&v| -p.min_exponent(v)).collect())
}

/// An atlas of a `C_1`-type seed whose variables are labelled by `Φ≥−1`.
#[derive(Clone, Debug)]
pub struct LabeledAtlas {
    pub dynkin: DynkinData,
    pub atlas: Atlas,
    /// Label of each entry of `atlas.variables`.
    pub labels: Vec<RootVector>,
    pub index: HashMap<RootVector, usize>,
    compat: Vec<Vec<bool>>,
    inverses: Vec<Vec<Vec<Ratio<i64>>>>,
}

/// Labels each non-frozen variable by its denominator vector and checks that
/// the labels are exactly the almost positive roots.
pub fn label_by_denominator(atlas: Atlas, d: &DynkinData) -> Result<LabeledAtlas, ClusterError> {
    let n = atlas.n_mutable();
    let initial: Vec<VarId> = atlas.initial.vars[..n]
        .iter()
        .map(|p| {
            p.as_term()
                .and_then(|(m, _)| m.variables().next())
                .ok_or_else(|| ClusterError::LabelingFailure("initial variables must be indeterminates".into()))
        })
        .collect::<Result<_, _>>()?;
    let labels: Vec<RootVector> = atlas.variables.iter().map(|p| denominator_vector(p, &initial)).collect();
    let phi = d.almost_positive_roots();
    let got: HashSet<&RootVector> = labels.iter().collect();
    let want: HashSet<&RootVector> = phi.iter().collect();
    if got != want || labels.len() != phi.len() {
        return Err(ClusterError::LabelingFailure(format!(
            "{} variables, {} distinct labels, {} almost positive roots",
            labels.len(),
            got.len(),
            phi.len()
        )));
    }
    let index: HashMap<RootVector, usize> = labels.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let nv = labels.len();
    let mut compat = vec![vec![false; nv]; nv];
    for c in &atlas.clusters {
        for &a in c {
            for &b in c {
                compat[a][b] = true;
            }
        }
    }
    let inverses = atlas
        .clusters
        .iter()
        .map(|c| {
            let cols: Vec<&RootVector> = c.iter().map(|&v| &labels[v]).collect();
            invert(&cols).ok_or_else(|| ClusterError::LabelingFailure("cluster labels are not a basis".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LabeledAtlas {
        dynkin: d.clone(),
        atlas,
        labels,
        index,
        compat,
        inverses,
    })
}

/// Inverse of the square matrix whose columns are `cols`, over `Q`.
fn invert(cols: &[&RootVector]) -> Option<Vec<Vec<Ratio<i64>>>> {
    let n = cols.len();
    let mut a: Vec<Vec<Ratio<i64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Ratio::from_integer(cols[j].0[i] as i64))
                .chain((0..n).map(|j| Ratio::from_integer((i == j) as i64)))
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c] != Ratio::from_integer(0))?;
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c && a[r][c] != Ratio::from_integer(0) {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row_c) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl LabeledAtlas {
    pub fn variable(&self, label: &RootVector) -> Option<&LaurentPoly> {
        self.index.get(label).map(|&i| &self.atlas.variables[i])
    }

    pub fn compatible(&self, a: &RootVector, b: &RootVector) -> Result<bool, ClusterError> {
        let ia = *self.index.get(a).ok_or_else(|| ClusterError::UnknownLabel(a.clone()))?;
        let ib = *self.index.get(b).ok_or_else(|| ClusterError::UnknownLabel(b.clone()))?;
        Ok(self.compat[ia][ib])
    }

    /// Labels of each cluster, in the order of `atlas.clusters`.
    pub fn labeled_clusters(&self) -> Vec<Vec<RootVector>> {
        self.atlas
            .clusters
            .iter()
            .map(|c| c.iter().map(|&v| self.labels[v].clone()).collect())
            .collect()
    }

    /// The unique expansion `γ = Σ n_α α` over a single cluster.
    ///
    /// Clusters sharing a face yield the same expansion when the
    /// coefficient of the non-shared variable vanishes, so expansions are
    /// compared after dropping zero coefficients.
    pub fn cluster_expansion(&self, gamma: &RootVector) -> Result<BTreeMap<RootVector, u32>, ClusterError> {
        let mut found: Vec<BTreeMap<RootVector, u32>> = Vec::new();
        for (c, inv) in self.atlas.clusters.iter().zip(&self.inverses) {
            let coeffs: Vec<Ratio<i64>> = inv
                .iter()
                .map(|row| row.iter().zip(&gamma.0).map(|(a, &g)| a * g as i64).sum())
                .collect();
            if coeffs.iter().all(|x| x.is_integer() && *x.numer() >= 0) {
                let exp: BTreeMap<RootVector, u32> = c
                    .iter()
                    .zip(&coeffs)
                    .filter(|(_, x)| *x.numer() != 0)
                    .map(|(&v, x)| (self.labels[v].clone(), *x.numer() as u32))
                    .collect();
                if !found.contains(&exp) {
                    found.push(exp);
                }
            }
        }
        match found.len() {
            0 => Err(ClusterError::NoExpansion(gamma.clone())),
            1 => Ok(found.pop().expect("one element")),
            _ => Err(ClusterError::MultipleExpansions(gamma.clone())),
        }
    }
}

/// Enumerates and labels the `C_1` atlas of a diagram.
pub fn c1_atlas(d: &DynkinData, limits: Limits) -> Result<LabeledAtlas, ClusterError> {
    label_by_denominator(enumerate_atlas(&build_c1_seed(d), limits)?, d)
}

/// [`c1_atlas`] with default limits, memoized per diagram.
pub fn c1_atlas_cached(d: &DynkinData) -> Result<Arc<LabeledAtlas>, ClusterError> {
    static CACHE: OnceLock<Mutex<HashMap<DynkinData, Arc<LabeledAtlas>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().expect("cache poisoned").get(d) {
        return Ok(a.clone());
    }
    let a = Arc::new(c1_atlas(d, Limits::default())?);
    cache.lock().expect("cache poisoned").insert(d.clone(), a.clone());
    Ok(a)
}
