//! q-characters in the Y/A-monomial calculus.
//!
//! A character is kept in decorated form: a dominant highest monomial `m`
//! together with the multiplicities of the monomials `m·∏A_{i,r}^{-e_{i,r}}`,
//! indexed by the exponent vectors `e`. The `A_{i,r}` are algebraically
//! independent, so the decoration is unique and truncations by spectral
//! parameter are well defined.
//!
//! Spectral parameters are integers `r` standing for `q^r`; vertices are
//! 0-based internally and printed 1-based (`Y[1,0]` is `Y_{1,q^0}`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cluster::{self, ClusterError};
use crate::fpoly::{self, FPoly, FpolyError};
use crate::laurent::{LaurentPoly, Monomial, VarId};
use crate::roots::{DynkinData, DynkinKind, RootVector, RootsError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QcharError {
    #[error("{0} is not dominant")]
    NotDominant(YMonomial),
    #[error("{m} is not dominant at vertices {vertices:?}")]
    NotJDominant { m: YMonomial, vertices: Vec<usize> },
    #[error("Frenkel-Mukhin limit exceeded: {0}")]
    CapExceeded(String),
    #[error("outside the proved scope: {0}")]
    OutOfProvedScope(String),
    #[error("{0} is not supported on Y[i,xi_i] and Y[i,xi_i+2]")]
    NotC1(YMonomial),
    #[error("decomposition went negative at {0}")]
    NegativeRemainder(YMonomial),
    #[error("the restricted simple module with highest monomial {0} is not minuscule")]
    NotMinuscule(YMonomial),
    #[error("independent computations disagree for {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Fpoly(#[from] FpolyError),
    #[error(transparent)]
    Roots(#[from] RootsError),
}

fn y_name(i: usize, r: i32) -> String {
    format!("Y[{},{}]", i + 1, r)
}

fn parse_indexed(name: &str, head: char) -> Option<(usize, i32)> {
    let inner = name.strip_prefix(head)?.strip_prefix('[')?.strip_suffix(']')?;
    let (a, b) = inner.split_once(',')?;
    let i: usize = a.trim().parse().ok()?;
    let r: i32 = b.trim().parse().ok()?;
    (i >= 1).then(|| (i - 1, r))
}

/// A Laurent monomial `∏ Y_{i,r}^{u_{i,r}}`, stored sparsely.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YMonomial(BTreeMap<(usize, i32), i32>);

impl YMonomial {
    pub fn one() -> Self {
        YMonomial::default()
    }

    pub fn y(i: usize, r: i32) -> Self {
        YMonomial::y_pow(i, r, 1)
    }

    pub fn y_pow(i: usize, r: i32, e: i32) -> Self {
        let mut m = YMonomial::one();
        m.add_exponent(i, r, e);
        m
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = ((usize, i32), i32)>) -> Self {
        let mut m = YMonomial::one();
        for ((i, r), e) in pairs {
            m.add_exponent(i, r, e);
        }
        m
    }

    fn add_exponent(&mut self, i: usize, r: i32, e: i32) {
        if e == 0 {
            return;
        }
        let slot = self.0.entry((i, r)).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.0.remove(&(i, r));
        }
    }

    pub fn exponent(&self, i: usize, r: i32) -> i32 {
        self.0.get(&(i, r)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, i32)> + '_ {
        self.0.iter().map(|(&(i, r), &e)| (i, r, e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &YMonomial) -> YMonomial {
        let mut m = self.clone();
        for (&(i, r), &e) in &o.0 {
            m.add_exponent(i, r, e);
        }
        m
    }

    pub fn inv(&self) -> YMonomial {
        YMonomial(self.0.iter().map(|(&k, &e)| (k, -e)).collect())
    }

    pub fn div(&self, o: &YMonomial) -> YMonomial {
        self.mul(&o.inv())
    }

    pub fn pow(&self, k: i32) -> YMonomial {
        if k == 0 {
            return YMonomial::one();
        }
        YMonomial(self.0.iter().map(|(&key, &e)| (key, e * k)).collect())
    }

    pub fn is_dominant(&self) -> bool {
        self.0.values().all(|&e| e > 0)
    }

    pub fn is_j_dominant(&self, vertices: &[usize]) -> bool {
        self.0.iter().all(|(&(i, _), &e)| e > 0 || !vertices.contains(&i))
    }

    /// The factor supported on the given vertices.
    pub fn restrict(&self, vertices: &[usize]) -> YMonomial {
        YMonomial(self.0.iter().filter(|((i, _), _)| vertices.contains(i)).map(|(&k, &e)| (k, e)).collect())
    }

    /// Spectral parameters of `Y_{i,·}` listed with multiplicity (positive
    /// exponents only).
    pub fn positive_multiset(&self, i: usize) -> Vec<i32> {
        let mut out = Vec::new();
        for (&(j, r), &e) in &self.0 {
            if j == i && e > 0 {
                out.extend(std::iter::repeat(r).take(e as usize));
            }
        }
        out
    }

    pub fn spectral_range(&self) -> Option<(i32, i32)> {
        let lo = self.0.keys().map(|&(_, r)| r).min()?;
        let hi = self.0.keys().map(|&(_, r)| r).max()?;
        Some((lo, hi))
    }

    pub fn degree(&self) -> i32 {
        self.0.values().sum()
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_monomial(Monomial::from_pairs(
            self.0.iter().map(|(&(i, r), &e)| (VarId::named(&y_name(i, r)), e)),
        ))
    }

    /// Reads a monomial with coefficient 1 in the variables `Y[i,r]`.
    pub fn from_laurent(p: &LaurentPoly) -> Result<YMonomial, QcharError> {
        let (mono, c) = p
            .as_term()
            .ok_or_else(|| QcharError::Parse(format!("{} is not a single monomial", p)))?;
        if c != &num_bigint::BigInt::from(1) {
            return Err(QcharError::Parse(format!("{} has a coefficient", p)));
        }
        let mut out = YMonomial::one();
        for (v, e) in mono.iter() {
            let name = v.name();
            let (i, r) = parse_indexed(&name, 'Y').ok_or_else(|| QcharError::Parse(format!("bad variable {}", name)))?;
            out.add_exponent(i, r, e);
        }
        Ok(out)
    }
}

impl fmt::Display for YMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&(i, r), &e)| {
                if e == 1 {
                    y_name(i, r)
                } else {
                    format!("{}^{}", y_name(i, r), e)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for YMonomial {
    type Err = QcharError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "1" {
            return Ok(YMonomial::one());
        }
        let p: LaurentPoly = s.parse().map_err(|e| QcharError::Parse(format!("{}", e)))?;
        YMonomial::from_laurent(&p)
    }
}

impl Serialize for YMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for YMonomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponents of `A_{i,r}^{-1}` relative to a highest monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AVec(BTreeMap<(usize, i32), u32>);

impl AVec {
    pub fn zero() -> Self {
        AVec::default()
    }

    pub fn single(i: usize, r: i32, e: u32) -> Self {
        let mut a = AVec::zero();
        a.add_exponent(i, r, e);
        a
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = ((usize, i32), u32)>) -> Self {
        let mut a = AVec::zero();
        for ((i, r), e) in pairs {
            a.add_exponent(i, r, e);
        }
        a
    }

    fn add_exponent(&mut self, i: usize, r: i32, e: u32) {
        if e > 0 {
            *self.0.entry((i, r)).or_insert(0) += e;
        }
    }

    pub fn get(&self, i: usize, r: i32) -> u32 {
        self.0.get(&(i, r)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, u32)> + '_ {
        self.0.iter().map(|(&(i, r), &e)| (i, r, e))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &AVec) -> AVec {
        let mut a = self.clone();
        for (&(i, r), &e) in &o.0 {
            a.add_exponent(i, r, e);
        }
        a
    }

    /// `self − o` if it stays nonnegative.
    pub fn checked_sub(&self, o: &AVec) -> Option<AVec> {
        let mut a = self.clone();
        for (&k, &e) in &o.0 {
            let slot = a.0.get_mut(&k)?;
            if *slot < e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                a.0.remove(&k);
            }
        }
        Some(a)
    }

    pub fn degree(&self) -> u64 {
        self.0.values().map(|&e| e as u64).sum()
    }

    pub fn spectral_max(&self) -> Option<i32> {
        self.0.keys().map(|&(_, r)| r).max()
    }

    pub fn spectral_min(&self) -> Option<i32> {
        self.0.keys().map(|&(_, r)| r).min()
    }

    pub fn map_vertices(&self, f: impl Fn(usize) -> usize) -> AVec {
        AVec::from_pairs(self.0.iter().map(|(&(i, r), &e)| ((f(i), r), e)))
    }

    /// `∏ A_{i,r}^{-e_{i,r}}` as a Y-monomial.
    pub fn monomial(&self, d: &DynkinData) -> YMonomial {
        let mut m = YMonomial::one();
        for (&(i, r), &e) in &self.0 {
            m = m.mul(&a_monomial(i, r, d).pow(-(e as i32)));
        }
        m
    }
}

impl fmt::Display for AVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(&(i, r), &e)| format!("A[{},{}]^-{}", i + 1, r, e)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `A_{i,r} = Y_{i,r-1} Y_{i,r+1} ∏_{j~i} Y_{j,r}^{-1}`.
pub fn a_monomial(i: usize, r: i32, d: &DynkinData) -> YMonomial {
    let mut m = YMonomial::y(i, r - 1).mul(&YMonomial::y(i, r + 1));
    for j in d.neighbors(i) {
        m.add_exponent(j, r, -1);
    }
    m
}

/// The weight `Σ_i (Σ_r u_{i,r}) ϖ_i` in fundamental-weight coordinates.
pub fn omega_weight(m: &YMonomial, n: usize) -> Vec<i64> {
    let mut w = vec![0i64; n];
    for (i, _, e) in m.iter() {
        w[i] += e as i64;
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Keep terms whose `A^{-1}` factors all have spectral parameter ≤ 2.
    Le2,
    /// Keep terms whose `A^{-1}` factors all have spectral parameter ≥ 3.
    Ge3,
}

impl FromStr for Truncation {
    type Err = QcharError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "le2" | "2" => Ok(Truncation::Le2),
            "ge3" | "3" => Ok(Truncation::Ge3),
            _ => Err(QcharError::Parse(format!("unknown truncation {}", s))),
        }
    }
}

/// A character `m · Σ mult(e) ∏A^{-e}` over a fixed diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedQChar {
    pub dynkin: DynkinData,
    pub highest: YMonomial,
    pub terms: BTreeMap<AVec, u64>,
}

impl DecoratedQChar {
    /// The one-term character `m`.
    pub fn monomial(d: &DynkinData, m: YMonomial) -> Self {
        DecoratedQChar {
            dynkin: d.clone(),
            highest: m,
            terms: BTreeMap::from([(AVec::zero(), 1)]),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn multiplicity(&self, a: &AVec) -> u64 {
        self.terms.get(a).copied().unwrap_or(0)
    }

    pub fn monomial_of(&self, a: &AVec) -> YMonomial {
        self.highest.mul(&a.monomial(&self.dynkin))
    }

    /// Sum of all multiplicities: the dimension when the character is complete.
    pub fn dimension(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn flatten(&self) -> BTreeMap<YMonomial, u64> {
        let mut out = BTreeMap::new();
        for (a, &c) in &self.terms {
            *out.entry(self.monomial_of(a)).or_insert(0) += c;
        }
        out
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (m, c) in self.flatten() {
            p = p + m.to_laurent().scale(num_bigint::BigInt::from(c));
        }
        p
    }

    pub fn mul(&self, o: &DecoratedQChar) -> DecoratedQChar {
        let mut terms = BTreeMap::new();
        for (a, &x) in &self.terms {
            for (b, &y) in &o.terms {
                *terms.entry(a.add(b)).or_insert(0) += x * y;
            }
        }
        DecoratedQChar {
            dynkin: self.dynkin.clone(),
            highest: self.highest.mul(&o.highest),
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> DecoratedQChar {
        let mut out = DecoratedQChar::monomial(&self.dynkin, YMonomial::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn truncate(&self, mode: Truncation) -> DecoratedQChar {
        let keep = |a: &AVec| match mode {
            Truncation::Le2 => a.spectral_max().map_or(true, |r| r <= 2),
            Truncation::Ge3 => a.spectral_min().map_or(true, |r| r >= 3),
        };
        DecoratedQChar {
            dynkin: self.dynkin.clone(),
            highest: self.highest.clone(),
            terms: self.terms.iter().filter(|(a, _)| keep(a)).map(|(a, &c)| (a.clone(), c)).collect(),
        }
    }

    /// Terms whose monomial is dominant, with their multiplicities.
    pub fn dominant_terms(&self) -> Vec<(AVec, YMonomial, u64)> {
        self.terms
            .iter()
            .filter_map(|(a, &c)| {
                let m = self.monomial_of(a);
                m.is_dominant().then(|| (a.clone(), m, c))
            })
            .collect()
    }

    /// True when every multiplicity of `self` is at least that of `o` (same
    /// highest monomial required).
    pub fn dominates(&self, o: &DecoratedQChar) -> bool {
        self.highest == o.highest && o.terms.iter().all(|(a, &c)| self.multiplicity(a) >= c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.dynkin.name(),
            "highest": self.highest.to_string(),
            "dimension": self.dimension().to_string(),
            "terms": self.terms.iter().map(|(a, c)| serde_json::json!({
                "a_inverse": a.to_string(),
                "monomial": self.monomial_of(a).to_string(),
                "mult": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for DecoratedQChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, &c)| if c == 1 { a.to_string() } else { format!("{}*{}", c, a) })
            .collect();
        write!(f, "{}*({})", self.highest, parts.join(" + "))
    }
}

/// The segment `{a, a+2, ..., a+2k-2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QSegment {
    pub origin: i32,
    pub length: u32,
}

impl QSegment {
    pub fn new(origin: i32, length: u32) -> Self {
        assert!(length >= 1, "segments are nonempty");
        QSegment { origin, length }
    }

    pub fn end(&self) -> i32 {
        self.origin + 2 * (self.length as i32 - 1)
    }

    pub fn points(&self) -> Vec<i32> {
        (0..self.length as i32).map(|t| self.origin + 2 * t).collect()
    }

    pub fn contains(&self, o: &QSegment) -> bool {
        (o.origin - self.origin).rem_euclid(2) == 0 && self.origin <= o.origin && o.end() <= self.end()
    }

    /// Neither contains the other and the union is again a segment.
    pub fn special_position(&self, o: &QSegment) -> bool {
        if self.contains(o) || o.contains(self) || (o.origin - self.origin).rem_euclid(2) != 0 {
            return false;
        }
        let (lo, hi) = if self.origin <= o.origin { (self, o) } else { (o, self) };
        hi.origin <= lo.end() + 2
    }

    /// `χ_q(W_{k,a})` in `A`-exponent form: the term `t` carries
    /// `A_{a+2k-1}^{-1} ⋯ A_{a+2k-2t+1}^{-1}`.
    fn kr_terms(&self) -> Vec<Vec<i32>> {
        let k = self.length as i32;
        (0..=k).map(|t| (0..t).map(|s| self.origin + 2 * k - 2 * s - 1).collect()).collect()
    }
}

impl fmt::Display for QSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ({},{})", self.length, self.origin)
    }
}

/// Splits a multiset of spectral parameters into segments pairwise in
/// general position, ordered by `(origin, length)`.
pub fn segment_decompose(multiset: &[i32]) -> Vec<QSegment> {
    let mut rest: BTreeMap<i32, u32> = BTreeMap::new();
    for &r in multiset {
        *rest.entry(r).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    while let Some((&a, _)) = rest.iter().next() {
        let mut k = 0;
        while rest.get(&(a + 2 * k)).is_some_and(|&c| c > 0) {
            let c = rest.get_mut(&(a + 2 * k)).expect("present");
            *c -= 1;
            if *c == 0 {
                rest.remove(&(a + 2 * k));
            }
            k += 1;
        }
        out.push(QSegment::new(a, k as u32));
    }
    out.sort();
    out
}

/// The `sl_2` character of the simple module attached to a multiset, as a map
/// from `A`-parameter multisets (spectral parameter → exponent) to
/// multiplicities.
fn sl2_terms(multiset: &[i32]) -> BTreeMap<BTreeMap<i32, u32>, u64> {
    let mut acc: BTreeMap<BTreeMap<i32, u32>, u64> = BTreeMap::from([(BTreeMap::new(), 1)]);
    for seg in segment_decompose(multiset) {
        let mut next = BTreeMap::new();
        for (base, &c) in &acc {
            for t in seg.kr_terms() {
                let mut e = base.clone();
                for r in t {
                    *e.entry(r).or_insert(0) += 1;
                }
                *next.entry(e).or_insert(0) += c;
            }
        }
        acc = next;
    }
    acc
}

/// The rank-one diagram used for `sl_2` characters.
pub fn sl2_dynkin() -> DynkinData {
    DynkinData::standard(DynkinKind::A, 1).expect("A1 exists")
}

/// `χ_q` of the simple `U_q(\hat{sl}_2)`-module with highest monomial
/// `∏_{r ∈ multiset} Y_r`.
pub fn sl2_simple_qchar(multiset: &[i32]) -> DecoratedQChar {
    let d = sl2_dynkin();
    let high = YMonomial::from_pairs(multiset.iter().map(|&r| ((0, r), 1)));
    DecoratedQChar {
        terms: sl2_terms(multiset)
            .into_iter()
            .map(|(e, c)| (AVec::from_pairs(e.into_iter().map(|(r, x)| ((0, r), x))), c))
            .collect(),
        dynkin: d,
        highest: high,
    }
}

/// `φ_i(m)`: the `sl_2` character at vertex `i` of the `i`-dominant monomial `m`.
pub fn phi_i(m: &YMonomial, i: usize, d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    if !m.is_j_dominant(&[i]) {
        return Err(QcharError::NotJDominant {
            m: m.clone(),
            vertices: vec![i + 1],
        });
    }
    Ok(DecoratedQChar {
        dynkin: d.clone(),
        highest: m.clone(),
        terms: sl2_terms(&m.positive_multiset(i))
            .into_iter()
            .map(|(e, c)| (AVec::from_pairs(e.into_iter().map(|(r, x)| ((i, r), x))), c))
            .collect(),
    })
}

/// Ordering weight of `A_{i,r}^{-1}`; the enumeration order is by total
/// weight, so any positive weights give a linear extension of dominance.
pub type AWeight = Arc<dyn Fn(usize, i32) -> u64 + Send + Sync>;

/// Knobs for [`frenkel_mukhin`].
#[derive(Clone)]
pub struct FmOptions {
    /// Bound on the number of monomials visited.
    pub max_monomials: usize,
    /// Allowed distance of any `A`-parameter from the input's spectral range;
    /// `None` means twice the Coxeter number.
    pub margin: Option<i32>,
    /// Drop every term containing `A_{i,r}^{-1}` with `r` above this bound.
    pub max_spectral: Option<i32>,
    /// Run the algorithm for the subdiagram on these vertices only.
    pub vertices: Option<Vec<usize>>,
    pub weight: Option<AWeight>,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions {
            max_monomials: 1_000_000,
            margin: None,
            max_spectral: None,
            vertices: None,
            weight: None,
        }
    }
}

impl fmt::Debug for FmOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FmOptions")
            .field("max_monomials", &self.max_monomials)
            .field("margin", &self.margin)
            .field("max_spectral", &self.max_spectral)
            .field("vertices", &self.vertices)
            .field("weighted", &self.weight.is_some())
            .finish()
    }
}

impl FmOptions {
    pub fn truncated_le2() -> Self {
        FmOptions {
            max_spectral: Some(2),
            ..FmOptions::default()
        }
    }
}

/// The Frenkel–Mukhin polynomial `FM(m) = Σ s(m_t) m_t`.
///
/// Monomials are visited by increasing weighted `A`-degree. When `m_r` is
/// visited with final value `s(m_r)`, every vertex `i` at which `m_r` is
/// `i`-dominant pushes `(s(m_r) − s_i(m_r))·φ_i(m_r)` onto the accumulators
/// `s_i` of the lower monomials.
pub fn frenkel_mukhin(m: &YMonomial, d: &DynkinData, opts: &FmOptions) -> Result<DecoratedQChar, QcharError> {
    let vertices: Vec<usize> = opts.vertices.clone().unwrap_or_else(|| (0..d.n).collect());
    if !m.is_j_dominant(&vertices) {
        return Err(QcharError::NotDominant(m.clone()));
    }
    let (lo, hi) = m.spectral_range().unwrap_or((0, 0));
    let margin = opts.margin.unwrap_or(2 * d.coxeter_number() as i32);
    let weight = |a: &AVec| -> u64 {
        match &opts.weight {
            None => a.degree(),
            Some(w) => a.iter().map(|(i, r, e)| w(i, r) * e as u64).sum(),
        }
    };
    let n = d.n;
    let mut work: BTreeMap<(u64, AVec), Vec<u64>> = BTreeMap::new();
    work.insert((0, AVec::zero()), vec![0; n]);
    let mut out: BTreeMap<AVec, u64> = BTreeMap::new();
    let mut sl2_cache: HashMap<Vec<i32>, BTreeMap<BTreeMap<i32, u32>, u64>> = HashMap::new();
    while let Some(((_, a), acc)) = work.pop_first() {
        let s = if a.is_zero() { 1 } else { vertices.iter().map(|&i| acc[i]).max().unwrap_or(0) };
        if s == 0 {
            continue;
        }
        let y = m.mul(&a.monomial(d));
        for &i in &vertices {
            let c = s.saturating_sub(acc[i]);
            if c == 0 || !y.is_j_dominant(&[i]) {
                continue;
            }
            let ms = y.positive_multiset(i);
            if ms.is_empty() {
                continue;
            }
            let terms = sl2_cache.entry(ms.clone()).or_insert_with(|| sl2_terms(&ms));
            for (e, &coef) in terms.iter() {
                if e.is_empty() {
                    continue;
                }
                if opts.max_spectral.is_some_and(|b| e.keys().any(|&r| r > b)) {
                    continue;
                }
                if e.keys().any(|&r| r < lo - margin || r > hi + margin) {
                    return Err(QcharError::CapExceeded(format!(
                        "spectral parameter outside [{}, {}]",
                        lo - margin,
                        hi + margin
                    )));
                }
                let b = a.add(&AVec::from_pairs(e.iter().map(|(&r, &x)| ((i, r), x))));
                let key = (weight(&b), b);
                let slot = work.entry(key).or_insert_with(|| vec![0; n]);
                slot[i] += c * coef;
            }
        }
        out.insert(a, s);
        if out.len() + work.len() > opts.max_monomials {
            return Err(QcharError::CapExceeded(format!("more than {} monomials", opts.max_monomials)));
        }
    }
    Ok(DecoratedQChar {
        dynkin: d.clone(),
        highest: m.clone(),
        terms: out,
    })
}

/// `χ_q(W^{(i)}_{k,r})` by the Frenkel–Mukhin algorithm (exact: KR modules
/// are minuscule).
pub fn kr_character(i: usize, k: u32, r: i32, d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    let m = YMonomial::from_pairs((0..k as i32).map(|t| ((i, r + 2 * t), 1)));
    frenkel_mukhin(&m, d, &FmOptions::default())
}

fn add_flat(a: &mut BTreeMap<YMonomial, u64>, b: BTreeMap<YMonomial, u64>) {
    for (m, c) in b {
        *a.entry(m).or_insert(0) += c;
    }
}

/// Checks `[W_{k,r}][W_{k,r+2}] = [W_{k+1,r}][W_{k-1,r+2}] + ∏_{j~i}[W^{(j)}_{k,r+1}]`.
pub fn t_system_check(i: usize, k: u32, r: i32, d: &DynkinData) -> Result<bool, QcharError> {
    let lhs = kr_character(i, k, r, d)?.mul(&kr_character(i, k, r + 2, d)?).flatten();
    let mut rhs = kr_character(i, k + 1, r, d)?.mul(&kr_character(i, k - 1, r + 2, d)?).flatten();
    let mut prod = DecoratedQChar::monomial(d, YMonomial::one());
    for j in d.neighbors(i) {
        prod = prod.mul(&kr_character(j, k, r + 1, d)?);
    }
    add_flat(&mut rhs, prod.flatten());
    Ok(lhs == rhs)
}

/// Checks that `[W_{k,r}]` equals the tridiagonal determinant in the
/// `[W_{1,r+2t}]` for `sl_2`.
pub fn sl2_determinant_check(k: u32, r: i32) -> bool {
    let w1 = |t: u32| sl2_simple_qchar(&[r + 2 * t as i32]).to_laurent();
    let (mut prev, mut cur) = (LaurentPoly::zero(), LaurentPoly::one());
    for t in 0..k {
        let next = w1(t) * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    let points: Vec<i32> = (0..k as i32).map(|t| r + 2 * t).collect();
    cur == sl2_simple_qchar(&points).to_laurent()
}

/// Checks that the weight multiset of a character is invariant under every
/// simple reflection.
pub fn weyl_invariant(c: &DecoratedQChar) -> bool {
    let d = &c.dynkin;
    let mut weights: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for (m, x) in c.flatten() {
        *weights.entry(omega_weight(&m, d.n)).or_insert(0) += x;
    }
    (0..d.n).all(|i| {
        weights.iter().all(|(w, &x)| {
            let li = w[i];
            let s: Vec<i64> = w.iter().enumerate().map(|(j, &wj)| wj - li * d.cartan[i][j] as i64).collect();
            weights.get(&s).copied().unwrap_or(0) == x
        })
    })
}

/// Checks the spectral support rule: each `A_{j,b}^{-1}` occurring in a term
/// is reached from some `Y_{i,a}` of the highest monomial by a chain of
/// adjacent vertices whose offsets `b − a` start at 1, never decrease, and
/// have parity fixed by the bipartition, every intermediate `A` being present
/// in the same term.
pub fn support_rule_holds(c: &DecoratedQChar) -> bool {
    let d = &c.dynkin;
    let par_ok = |i: usize, j: usize, l: i32| (l.rem_euclid(2) == 1) == (d.xi[i] == d.xi[j]);
    for a in c.terms.keys() {
        for (j, b, _) in a.iter() {
            let ok = c.highest.iter().any(|(i, a0, e)| {
                if e <= 0 || b - a0 < 1 {
                    return false;
                }
                // Reachability over states (vertex, offset) with A present.
                let mut seen = BTreeSet::new();
                let mut stack = Vec::new();
                if a.get(i, a0 + 1) > 0 && par_ok(i, i, 1) {
                    stack.push((i, 1));
                }
                while let Some((v, l)) = stack.pop() {
                    if !seen.insert((v, l)) {
                        continue;
                    }
                    if v == j && l == b - a0 {
                        return true;
                    }
                    for w in d.neighbors(v) {
                        for l2 in l..=(b - a0) {
                            if a.get(w, a0 + l2) > 0 && par_ok(i, w, l2) {
                                stack.push((w, l2));
                            }
                        }
                    }
                }
                false
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Returns the vertices of a connected subset forming a path, ordered from
/// one end, or `None` if the subset is not a path.
fn path_order(d: &DynkinData, vertices: &[usize]) -> Option<Vec<usize>> {
    let deg = |v: usize| d.neighbors(v).into_iter().filter(|w| vertices.contains(w)).count();
    if vertices.iter().any(|&v| deg(v) > 2) {
        return None;
    }
    let start = if vertices.len() == 1 { vertices[0] } else { *vertices.iter().find(|&&v| deg(v) == 1)? };
    let mut order = vec![start];
    while order.len() < vertices.len() {
        let last = *order.last().expect("nonempty");
        let next = d
            .neighbors(last)
            .into_iter()
            .find(|w| vertices.contains(w) && !order.contains(w))?;
        order.push(next);
    }
    Some(order)
}

/// The type-A diagram on a path of vertices, with the inherited bipartition.
fn path_subdiagram(d: &DynkinData, order: &[usize]) -> Result<DynkinData, QcharError> {
    let i0: Vec<usize> = order.iter().enumerate().filter(|(_, &v)| d.xi[v] == 0).map(|(t, _)| t + 1).collect();
    let sub = DynkinData::new(DynkinKind::A, order.len(), &i0)?;
    debug_assert!(order.iter().enumerate().all(|(t, &v)| sub.xi[t] == d.xi[v]));
    Ok(sub)
}

fn relabel_monomial(m: &YMonomial, f: impl Fn(usize) -> Option<usize>) -> YMonomial {
    YMonomial::from_pairs(m.iter().filter_map(|(i, r, e)| f(i).map(|j| ((j, r), e))))
}

fn is_c1_form(m: &YMonomial, d: &DynkinData) -> bool {
    m.iter()
        .all(|(i, r, e)| e > 0 && (r == d.xi[i] as i32 || r == d.xi[i] as i32 + 2))
}

/// `φ_J(m)`: the part of `χ_q(L(m))` of the form `m·∏_{j∈J} A_{j,·}^{-1}`,
/// computed by the Frenkel–Mukhin algorithm on the subdiagram `J`.
///
/// When `J` is a path and `m` restricted to `J` is a `C_1` monomial, the
/// result is certified against the cluster route on that path; a mismatch
/// means the restricted simple module is not minuscule and is reported as
/// [`QcharError::NotMinuscule`].
pub fn phi_restricted(m: &YMonomial, vertices: &[usize], d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    if !m.is_j_dominant(vertices) {
        return Err(QcharError::NotJDominant {
            m: m.clone(),
            vertices: vertices.iter().map(|v| v + 1).collect(),
        });
    }
    if vertices.len() == 1 {
        return phi_i(m, vertices[0], d);
    }
    let opts = FmOptions {
        vertices: Some(vertices.to_vec()),
        ..FmOptions::default()
    };
    let full = frenkel_mukhin(m, d, &opts)?;
    if let Ok(cluster) = phi_restricted_le2_cluster(m, vertices, d) {
        if full.truncate(Truncation::Le2).terms != cluster.terms {
            return Err(QcharError::NotMinuscule(m.restrict(vertices)));
        }
    }
    Ok(full)
}

/// `φ_J(m)_{≤2}` via the truncated character of the restricted simple
/// module on the path `J` (cluster route), relabelled into the ambient diagram.
fn phi_restricted_le2_cluster(m: &YMonomial, vertices: &[usize], d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    let order = path_order(d, vertices).ok_or_else(|| QcharError::OutOfProvedScope("J is not a path".into()))?;
    let mbar = m.restrict(vertices);
    if !is_c1_form(&mbar, d) {
        return Err(QcharError::NotC1(mbar));
    }
    let sub = path_subdiagram(d, &order)?;
    let local = relabel_monomial(&mbar, |v| order.iter().position(|&w| w == v));
    let ch = truncated_char_c1(&local, &sub, Route::Fpoly)?;
    Ok(DecoratedQChar {
        dynkin: d.clone(),
        highest: m.clone(),
        terms: ch.terms.iter().map(|(a, &c)| (a.map_vertices(|t| order[t]), c)).collect(),
    })
}

/// `φ_J(m)_{≤2}`: uses the cluster route on the path `J` when available and
/// the truncated Frenkel–Mukhin algorithm otherwise.
pub fn phi_restricted_le2(m: &YMonomial, vertices: &[usize], d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    if !m.is_j_dominant(vertices) {
        return Err(QcharError::NotJDominant {
            m: m.clone(),
            vertices: vertices.iter().map(|v| v + 1).collect(),
        });
    }
    if vertices.len() > 1 {
        if let Ok(c) = phi_restricted_le2_cluster(m, vertices, d) {
            return Ok(c);
        }
    }
    let opts = FmOptions {
        vertices: Some(vertices.to_vec()),
        max_spectral: Some(2),
        ..FmOptions::default()
    };
    frenkel_mukhin(m, d, &opts)
}

/// How [`truncated_char_c1`] obtains the character of each cluster variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// `Y^β F_{τ_−(β)}(v)` with `v_i = A_{i,ξ_i+1}^{-1}`.
    Fpoly,
    /// Restricted characters along the support of multiplicity-free roots.
    #[serde(rename = "phiJ")]
    PhiJ,
}

impl FromStr for Route {
    type Err = QcharError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fpoly" => Ok(Route::Fpoly),
            "phiJ" | "phij" => Ok(Route::PhiJ),
            _ => Err(QcharError::Parse(format!("unknown route {}", s))),
        }
    }
}

/// `Y^γ`: `Y_{i,0}` / `Y_{i,3}` for positive coordinates at `I0` / `I1`, and
/// `Y_{i,2}` / `Y_{i,1}` for negative ones.
pub fn y_gamma(gamma: &RootVector, d: &DynkinData) -> YMonomial {
    YMonomial::from_pairs(gamma.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| {
        let xi = d.xi[i] as i32;
        let r = if c > 0 { xi - d.eps(i) + 1 } else { 2 - xi };
        ((i, r), c.abs())
    }))
}

/// Splits a `C_1` monomial as `∏ F_i^{c_i} · Y^γ`, returning `(c, γ)`.
pub fn c1_factorization(m: &YMonomial, d: &DynkinData) -> Result<(Vec<u32>, RootVector), QcharError> {
    if !is_c1_form(m, d) {
        return Err(QcharError::NotC1(m.clone()));
    }
    let mut c = vec![0; d.n];
    let mut gamma = RootVector::zero(d.n);
    for i in 0..d.n {
        let xi = d.xi[i] as i32;
        let low = m.exponent(i, xi);
        let high = m.exponent(i, xi + 2);
        c[i] = low.min(high) as u32;
        gamma.0[i] = if d.xi[i] == 0 { low - high } else { high - low };
    }
    Ok((c, gamma))
}

/// The highest monomial `Y_{i,ξ_i} Y_{i,ξ_i+2}` of the frozen module `F_i`.
pub fn frozen_monomial(i: usize, d: &DynkinData) -> YMonomial {
    let xi = d.xi[i] as i32;
    YMonomial::y(i, xi).mul(&YMonomial::y(i, xi + 2))
}

fn trivalent(d: &DynkinData) -> Option<usize> {
    (0..d.n).find(|&i| d.neighbors(i).len() == 3)
}

/// `χ_q(S(α))_{≤2}` for `α ∈ Φ≥−1` via the F-polynomial of `τ_−(α)`.
pub fn simple_char_fpoly(alpha: &RootVector, d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    let t = d.tau_minus(alpha);
    let f = if t.is_positive() {
        if t.0.iter().all(|&x| x <= 2) {
            fpoly::f_poly_combinatorial(&t, d)?
        } else {
            fpoly::f_poly_principal(&t, d)?
        }
    } else {
        FPoly::one(d.n)
    };
    Ok(char_from_fpoly(&f, y_gamma(alpha, d), d))
}

/// `high · F(v)` with `v_i = A_{i,ξ_i+1}^{-1}`.
pub fn char_from_fpoly(f: &FPoly, high: YMonomial, d: &DynkinData) -> DecoratedQChar {
    DecoratedQChar {
        dynkin: d.clone(),
        highest: high,
        terms: f
            .terms
            .iter()
            .map(|(e, &c)| (AVec::from_pairs(e.iter().enumerate().map(|(i, &x)| ((i, d.xi[i] as i32 + 1), x))), c))
            .collect(),
    }
}

/// `m Σ_ν ∏ A_{i,1+ξ_i}^{-ν_i}` over the 0/1 vectors `ν` allowed by `η`.
pub fn nu_formula(eta: &RootVector, d: &DynkinData) -> DecoratedQChar {
    let n = d.n;
    let mut terms = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        let nu = |i: usize| ((mask >> i) & 1) as i32;
        let ok = (0..n).all(|i| {
            if d.xi[i] == 0 {
                nu(i) <= eta.0[i]
            } else {
                let s: i32 = d.neighbors(i).into_iter().map(nu).sum();
                nu(i) <= (s - eta.0[i]).max(0)
            }
        });
        if ok {
            let a = AVec::from_pairs((0..n).filter(|&i| nu(i) == 1).map(|i| ((i, d.xi[i] as i32 + 1), 1)));
            terms.insert(a, 1);
        }
    }
    DecoratedQChar {
        dynkin: d.clone(),
        highest: y_gamma(eta, d),
        terms,
    }
}

/// Extends `φ_J(m)_{≤2}` to `χ_q(L(m))_{≤2}` by attaching the binomial
/// factors `(1 + A_{k,2}^{-1})^{μ_{j_k}}` at the `I1`-vertices `k` next to `J`.
pub fn extend_from_support(phi: &DecoratedQChar, support: &[usize]) -> DecoratedQChar {
    let d = &phi.dynkin;
    let outer: Vec<(usize, usize)> = (0..d.n)
        .filter(|k| !support.contains(k) && d.xi[*k] == 1)
        .filter_map(|k| d.neighbors(k).into_iter().find(|j| support.contains(j)).map(|j| (k, j)))
        .collect();
    let mut terms: BTreeMap<AVec, u64> = BTreeMap::new();
    for (a, &c) in &phi.terms {
        let mut acc: BTreeMap<AVec, u64> = BTreeMap::from([(a.clone(), c)]);
        for &(k, j) in &outer {
            let mu = a.get(j, d.xi[j] as i32 + 1);
            let mut next = BTreeMap::new();
            for (b, &x) in &acc {
                for t in 0..=mu {
                    *next.entry(b.add(&AVec::single(k, 2, t))).or_insert(0) += x * binomial(mu, t);
                }
            }
            acc = next;
        }
        for (b, x) in acc {
            *terms.entry(b).or_insert(0) += x;
        }
    }
    DecoratedQChar {
        dynkin: d.clone(),
        highest: phi.highest.clone(),
        terms,
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, t| acc * (n - t) as u64 / (t + 1) as u64)
}

/// The `D_4` highest root with the trivalent vertex in `I0`:
/// `1 + v2(2 + v1 + v3 + v4) + v2^2 (1+v1)(1+v3)(1+v4)`.
fn d4_highest_root_char(d: &DynkinData) -> DecoratedQChar {
    let mut f = FPoly::one(4);
    f.terms.clear();
    let e = |v: [u32; 4]| v.to_vec();
    f.add_term(e([0, 0, 0, 0]), 1);
    f.add_term(e([0, 1, 0, 0]), 2);
    for k in [0usize, 2, 3] {
        let mut x = [0, 1, 0, 0];
        x[k] = 1;
        f.add_term(e(x), 1);
    }
    for mask in 0..8u32 {
        let x = [mask & 1, 2, (mask >> 1) & 1, (mask >> 2) & 1];
        f.add_term(e(x), 1);
    }
    char_from_fpoly(&f, y_gamma(&RootVector(vec![1, 2, 1, 1]), d), d)
}

/// `χ_q(S(α))_{≤2}` for `α ∈ Φ≥−1` via restricted characters.
pub fn simple_char_phij(alpha: &RootVector, d: &DynkinData) -> Result<DecoratedQChar, QcharError> {
    let m = y_gamma(alpha, d);
    if alpha.negative_simple_index().is_some() {
        return frenkel_mukhin(&m, d, &FmOptions::truncated_le2());
    }
    if !alpha.is_positive() {
        return Err(FpolyError::NotAlmostPositive(alpha.clone()).into());
    }
    let tri = trivalent(d);
    if alpha.0.iter().all(|&x| x <= 1) {
        let support = alpha.support();
        if let Some(t) = tri {
            if support.contains(&t) && d.xi[t] == 1 {
                return Err(QcharError::OutOfProvedScope(format!(
                    "{} contains the trivalent vertex, which lies in I1",
                    alpha
                )));
            }
        }
        let by_nu = nu_formula(alpha, d);
        let phi = phi_restricted_le2(&m, &support, d)?;
        let by_support = extend_from_support(&phi, &support);
        if by_nu != by_support {
            return Err(QcharError::Inconsistent(format!("restricted characters of {}", alpha)));
        }
        return Ok(by_nu);
    }
    if d.kind == DynkinKind::D && d.n == 4 && tri.is_some_and(|t| d.xi[t] == 0) && alpha.0 == [1, 2, 1, 1] {
        return Ok(d4_highest_root_char(d));
    }
    Err(QcharError::OutOfProvedScope(format!("{} is not multiplicity-free", alpha)))
}

/// `χ_q(L(m))_{≤2}` for a `C_1` monomial `m = ∏F_i^{c_i}·Y^γ`, as the product
/// of the characters of the cluster variables in the cluster expansion of `γ`.
pub fn truncated_char_c1(m: &YMonomial, d: &DynkinData, route: Route) -> Result<DecoratedQChar, QcharError> {
    let (c, gamma) = c1_factorization(m, d)?;
    let frozen = YMonomial::from_pairs(
        (0..d.n).flat_map(|i| {
            let xi = d.xi[i] as i32;
            [((i, xi), c[i] as i32), ((i, xi + 2), c[i] as i32)]
        }),
    );
    let mut out = DecoratedQChar::monomial(d, frozen);
    if gamma.is_zero() {
        return Ok(out);
    }
    let atlas = cluster::c1_atlas_cached(d)?;
    let expansion = atlas.cluster_expansion(&gamma)?;
    if d.kind == DynkinKind::E {
        let single = expansion.len() == 1 && expansion.values().all(|&k| k == 1);
        let (alpha, _) = expansion.iter().next().expect("nonzero gamma");
        let t = d.tau_minus(alpha);
        let restricted = !t.is_positive() || t.0.iter().all(|&x| x <= 2);
        if !single || (route == Route::Fpoly && !restricted) {
            return Err(QcharError::OutOfProvedScope(format!("{} in type {}", gamma, d.name())));
        }
    }
    for (alpha, &k) in &expansion {
        let piece = match route {
            Route::Fpoly => simple_char_fpoly(alpha, d)?,
            Route::PhiJ => simple_char_phij(alpha, d)?,
        };
        out = out.mul(&piece.pow(k));
    }
    if &out.highest != m {
        return Err(QcharError::Inconsistent(format!("highest monomial of {}", m)));
    }
    Ok(out)
}

/// Splits a product of characters into simple constituents by repeatedly
/// removing the character of a maximal dominant monomial; all characters are
/// compared after truncation at 2.
pub fn decompose_product(
    factors: &[DecoratedQChar],
    table: impl Fn(&YMonomial) -> Result<DecoratedQChar, QcharError>,
) -> Result<BTreeMap<YMonomial, u64>, QcharError> {
    let first = factors.first().ok_or_else(|| QcharError::Parse("empty product".into()))?;
    let mut prod = DecoratedQChar::monomial(&first.dynkin, YMonomial::one());
    for f in factors {
        prod = prod.mul(f);
    }
    let prod = prod.truncate(Truncation::Le2);
    let mut rest: BTreeMap<AVec, i128> = prod.terms.iter().map(|(a, &c)| (a.clone(), c as i128)).collect();
    let mut found: BTreeMap<YMonomial, u64> = BTreeMap::new();
    while !rest.is_empty() {
        let top = rest
            .iter()
            .filter(|(a, &c)| c > 0 && prod.monomial_of(a).is_dominant())
            .min_by_key(|(a, _)| (a.degree(), (*a).clone()))
            .map(|(a, &c)| (a.clone(), c));
        let (a0, mult) = match top {
            Some(t) => t,
            None => {
                let (a, _) = rest.iter().next().expect("nonempty");
                return Err(QcharError::NegativeRemainder(prod.monomial_of(a)));
            }
        };
        let m = prod.monomial_of(&a0);
        let ch = table(&m)?.truncate(Truncation::Le2);
        if ch.highest != m {
            return Err(QcharError::Inconsistent(format!("table entry for {}", m)));
        }
        for (b, &x) in &ch.terms {
            let key = a0.add(b);
            let slot = rest.entry(key).or_insert(0);
            *slot -= mult * x as i128;
            if *slot < 0 {
                return Err(QcharError::NegativeRemainder(m));
            }
        }
        rest.retain(|_, c| *c != 0);
        *found.entry(m).or_insert(0) += mult as u64;
    }
    Ok(found)
}

/// Sum of multiplicities; use on complete characters.
pub fn dimension(c: &DecoratedQChar) -> u64 {
    c.dimension()
}
