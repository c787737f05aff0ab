//! Simply-laced root systems with a chosen bipartition, plus the
//! piecewise-linear maps `σ_i`, `τ_±`, `τ`, `E` and g-vectors.
//!
//! Vertices are 0-based internally; every user-facing string is 1-based.
//! Numbering follows Bourbaki: `A_n` is a path, `D_n` has its fork at
//! vertex `n-2`, and `E_n` is the chain `1-3-4-5-6-…` with `2` hanging off `4`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootsError {
    #[error("unsupported Dynkin type {0}")]
    UnsupportedType(String),
    #[error("vertex set {0:?} is not one side of a bipartition")]
    InvalidBipartition(Vec<usize>),
    #[error("{0} is not an almost positive root")]
    NotAlmostPositive(RootVector),
    #[error("cannot parse root vector: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DynkinKind {
    A,
    D,
    E,
}

/// Cartan data of an ADE diagram together with the bipartition `I = I0 ⊔ I1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DynkinData {
    pub kind: DynkinKind,
    pub n: usize,
    pub cartan: Vec<Vec<i32>>,
    /// `xi[i] = 0` for `i ∈ I0`, `1` for `i ∈ I1`.
    pub xi: Vec<u8>,
}

fn edges(kind: DynkinKind, n: usize) -> Result<Vec<(usize, usize)>, RootsError> {
    let bad = || RootsError::UnsupportedType(format!("{:?}{}", kind, n));
    Ok(match kind {
        DynkinKind::A if n >= 1 => (0..n - 1).map(|i| (i, i + 1)).collect(),
        DynkinKind::D if n >= 4 => {
            let mut e: Vec<_> = (0..n - 3).map(|i| (i, i + 1)).collect();
            e.push((n - 3, n - 2));
            e.push((n - 3, n - 1));
            e
        }
        DynkinKind::E if (6..=8).contains(&n) => {
            let mut e = vec![(0, 2), (1, 3)];
            e.extend((2..n - 1).map(|i| (i, i + 1)));
            e
        }
        _ => return Err(bad()),
    })
}

impl DynkinData {
    /// Diagram of the given type; `i0` lists the 1-based vertices of `I0`.
    pub fn new(kind: DynkinKind, n: usize, i0: &[usize]) -> Result<Self, RootsError> {
        let es = edges(kind, n)?;
        let mut cartan = vec![vec![0; n]; n];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(a, b) in &es {
            cartan[a][b] = -1;
            cartan[b][a] = -1;
        }
        let mut xi = vec![1u8; n];
        for &v in i0 {
            if v == 0 || v > n {
                return Err(RootsError::InvalidBipartition(i0.to_vec()));
            }
            xi[v - 1] = 0;
        }
        if es.iter().any(|&(a, b)| xi[a] == xi[b]) {
            return Err(RootsError::InvalidBipartition(i0.to_vec()));
        }
        Ok(DynkinData { kind, n, cartan, xi })
    }

    /// Diagram with vertex 1 placed in `I0`.
    pub fn standard(kind: DynkinKind, n: usize) -> Result<Self, RootsError> {
        let es = edges(kind, n)?;
        let mut xi = vec![u8::MAX; n];
        xi[0] = 0;
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &es {
                if xi[a] != u8::MAX && xi[b] == u8::MAX {
                    xi[b] = 1 - xi[a];
                    changed = true;
                } else if xi[b] != u8::MAX && xi[a] == u8::MAX {
                    xi[a] = 1 - xi[b];
                    changed = true;
                }
            }
        }
        let i0: Vec<usize> = (0..n).filter(|&i| xi[i] == 0).map(|i| i + 1).collect();
        Self::new(kind, n, &i0)
    }

    /// Parses `"A3"`, `"D4"`, `"E6"` with the standard bipartition.
    pub fn parse(name: &str) -> Result<Self, RootsError> {
        let (kind, n) = parse_type_name(name)?;
        Self::standard(kind, n)
    }

    /// Parses a type name and an optional 1-based `I0` list.
    pub fn parse_with_i0(name: &str, i0: Option<&[usize]>) -> Result<Self, RootsError> {
        let (kind, n) = parse_type_name(name)?;
        match i0 {
            Some(v) => Self::new(kind, n, v),
            None => Self::standard(kind, n),
        }
    }

    /// The same diagram with `I0` and `I1` exchanged.
    pub fn flipped(&self) -> Self {
        DynkinData {
            xi: self.xi.iter().map(|&x| 1 - x).collect(),
            ..self.clone()
        }
    }

    pub fn name(&self) -> String {
        format!("{:?}{}", self.kind, self.n)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_i0(&self, i: usize) -> bool {
        self.xi[i] == 0
    }

    pub fn eps(&self, i: usize) -> i32 {
        if self.xi[i] == 0 {
            1
        } else {
            -1
        }
    }

    /// 1-based vertices of `I0`.
    pub fn i0(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_i0(i)).map(|i| i + 1).collect()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.cartan[i][j] == -1
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.adjacent(i, j)).collect()
    }

    pub fn coxeter_number(&self) -> usize {
        match self.kind {
            DynkinKind::A => self.n + 1,
            DynkinKind::D => 2 * self.n - 2,
            DynkinKind::E => match self.n {
                6 => 12,
                7 => 18,
                _ => 30,
            },
        }
    }

    /// Pairing `<β, α_i^∨> = Σ_j β_j a_{ji}`.
    pub fn pairing(&self, beta: &RootVector, i: usize) -> i32 {
        (0..self.n).map(|j| beta.0[j] * self.cartan[j][i]).sum()
    }

    pub fn reflect(&self, beta: &RootVector, i: usize) -> RootVector {
        let mut out = beta.clone();
        out.0[i] -= self.pairing(beta, i);
        out
    }

    /// Positive roots by reflection closure of the simple roots, sorted by
    /// height and then with earlier vertices first.
    pub fn positive_roots(&self) -> Vec<RootVector> {
        let mut seen: std::collections::HashSet<RootVector> = std::collections::HashSet::new();
        let mut stack: Vec<RootVector> = (0..self.n).map(|i| RootVector::simple(self.n, i)).collect();
        while let Some(b) = stack.pop() {
            if !seen.insert(b.clone()) {
                continue;
            }
            for i in 0..self.n {
                let r = self.reflect(&b, i);
                if r.is_positive() && !seen.contains(&r) {
                    stack.push(r);
                }
            }
        }
        let mut out: Vec<RootVector> = seen.into_iter().collect();
        sort_roots(&mut out);
        out
    }

    /// `Φ≥−1`: the negative simple roots followed by the positive roots.
    pub fn almost_positive_roots(&self) -> Vec<RootVector> {
        let mut out: Vec<RootVector> = (0..self.n).map(|i| RootVector::simple(self.n, i).neg()).collect();
        out.extend(self.positive_roots());
        out
    }

    pub fn is_almost_positive(&self, r: &RootVector) -> bool {
        if r.0.iter().all(|&c| c <= 0) {
            return r.0.iter().map(|&c| c).sum::<i32>() == -1;
        }
        r.is_positive() && self.positive_roots().contains(r)
    }

    /// Highest root (the unique positive root of maximal height).
    pub fn highest_root(&self) -> RootVector {
        self.positive_roots().pop().expect("nonempty root system")
    }

    /// Applies one of the piecewise-linear maps.
    pub fn piecewise_linear(&self, map: PlMap, g: &RootVector) -> RootVector {
        match map {
            PlMap::Sigma(i) => self.sigma(i, g),
            PlMap::TauPlus => self.tau_eps(1, g),
            PlMap::TauMinus => self.tau_eps(-1, g),
            PlMap::Tau => self.tau_eps(1, &self.tau_eps(-1, g)),
            PlMap::TauInverse => self.tau_eps(-1, &self.tau_eps(1, g)),
            PlMap::E => RootVector((0..self.n).map(|i| -self.eps(i) * g.0[i]).collect()),
        }
    }

    fn sigma(&self, i: usize, g: &RootVector) -> RootVector {
        let mut out = g.clone();
        out.0[i] = -g.0[i]
            - (0..self.n)
                .filter(|&j| j != i)
                .map(|j| self.cartan[i][j] * g.0[j].max(0))
                .sum::<i32>();
        out
    }

    fn tau_eps(&self, eps: i32, g: &RootVector) -> RootVector {
        // Vertices of one colour are pairwise non-adjacent, so the σ_i commute.
        let mut out = g.clone();
        for i in 0..self.n {
            if self.eps(i) == eps {
                out.0[i] = self.sigma(i, g).0[i];
            }
        }
        out
    }

    pub fn tau_minus(&self, g: &RootVector) -> RootVector {
        self.piecewise_linear(PlMap::TauMinus, g)
    }

    pub fn tau_plus(&self, g: &RootVector) -> RootVector {
        self.piecewise_linear(PlMap::TauPlus, g)
    }

    /// `τ^j` for any integer `j`.
    pub fn tau_pow(&self, g: &RootVector, j: i64) -> RootVector {
        let map = if j >= 0 { PlMap::Tau } else { PlMap::TauInverse };
        (0..j.unsigned_abs()).fold(g.clone(), |acc, _| self.piecewise_linear(map, &acc))
    }

    /// `g(α) = E(τ_−(α))` for `α ∈ Φ≥−1`.
    pub fn g_vector(&self, alpha: &RootVector) -> Result<RootVector, RootsError> {
        if !self.is_almost_positive(alpha) {
            return Err(RootsError::NotAlmostPositive(alpha.clone()));
        }
        Ok(self.piecewise_linear(PlMap::E, &self.tau_minus(alpha)))
    }
}

fn parse_type_name(name: &str) -> Result<(DynkinKind, usize), RootsError> {
    let name = name.trim();
    let bad = || RootsError::UnsupportedType(name.to_string());
    let mut chars = name.chars();
    let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
        Some('A') => DynkinKind::A,
        Some('D') => DynkinKind::D,
        Some('E') => DynkinKind::E,
        _ => return Err(bad()),
    };
    let n: usize = chars.as_str().parse().map_err(|_| bad())?;
    edges(kind, n)?;
    Ok((kind, n))
}

/// Height first, then earlier vertices first (absolute values compared, so
/// `-α1` precedes `-α2` and `α1` precedes `α2`).
pub fn sort_roots(v: &mut [RootVector]) {
    v.sort_by(|a, b| {
        a.height().cmp(&b.height()).then_with(|| {
            let ka: Vec<i32> = a.0.iter().map(|c| c.abs()).collect();
            let kb: Vec<i32> = b.0.iter().map(|c| c.abs()).collect();
            kb.cmp(&ka)
        })
    });
}

#[derive(Serialize, Deserialize)]
struct DynkinJson {
    #[serde(rename = "type")]
    kind: DynkinKind,
    rank: usize,
    i0: Vec<usize>,
}

impl Serialize for DynkinData {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DynkinJson {
            kind: self.kind,
            rank: self.n,
            i0: self.i0(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DynkinData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DynkinJson::deserialize(d)?;
        DynkinData::new(j.kind, j.rank, &j.i0).map_err(serde::de::Error::custom)
    }
}

/// The maps of the piecewise-linear toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlMap {
    Sigma(usize),
    TauPlus,
    TauMinus,
    Tau,
    TauInverse,
    E,
}

/// Integer vector in the basis of simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVector(pub Vec<i32>);

impl RootVector {
    pub fn zero(n: usize) -> Self {
        RootVector(vec![0; n])
    }

    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        RootVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && !self.is_zero()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// `Some(i)` when the vector is `-α_i`.
    pub fn negative_simple_index(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != 0).collect();
        (nz.len() == 1 && self.0[nz[0]] == -1).then(|| nz[0])
    }

    pub fn height(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn neg(&self) -> Self {
        RootVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        RootVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        RootVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i32) -> Self {
        RootVector(self.0.iter().map(|c| c * k).collect())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }

    /// Componentwise `≤`.
    pub fn le(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl FromStr for RootVector {
    type Err = RootsError;

    /// Accepts `1,2,1,1`, `(1,2,1,1)` or `[1,2,1,1]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        body.split(',')
            .map(|t| t.trim().parse::<i32>().map_err(|_| RootsError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(RootVector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[i32]) -> RootVector {
        RootVector(v.to_vec())
    }

    #[test]
    fn a3_almost_positive_order() {
        let d = DynkinData::parse("A3").unwrap();
        let got = d.almost_positive_roots();
        let want = vec![
            rv(&[-1, 0, 0]),
            rv(&[0, -1, 0]),
            rv(&[0, 0, -1]),
            rv(&[1, 0, 0]),
            rv(&[0, 1, 0]),
            rv(&[0, 0, 1]),
            rv(&[1, 1, 0]),
            rv(&[0, 1, 1]),
            rv(&[1, 1, 1]),
        ];
        assert_eq!(got, want);
        assert_eq!(DynkinData::parse("A1").unwrap().almost_positive_roots().len(), 2);
    }

    #[test]
    fn root_counts_and_coxeter() {
        // |Φ+| = n h / 2 for simply-laced types.
        for name in ["A1", "A2", "A5", "D4", "D5", "D6", "E6", "E7", "E8"] {
            let d = DynkinData::parse(name).unwrap();
            assert_eq!(d.positive_roots().len(), d.n * d.coxeter_number() / 2, "{}", name);
        }
        assert_eq!(DynkinData::parse("D4").unwrap().highest_root(), rv(&[1, 2, 1, 1]));
        assert_eq!(DynkinData::parse("E8").unwrap().highest_root(), rv(&[2, 3, 4, 6, 5, 4, 3, 2]));
    }

    #[test]
    fn bipartitions() {
        let d = DynkinData::parse("D4").unwrap();
        assert_eq!(d.i0(), vec![1, 3, 4]);
        assert!(DynkinData::new(DynkinKind::A, 3, &[1, 2]).is_err());
        assert!(DynkinData::parse("B3").is_err());
        let e6 = DynkinData::parse("E6").unwrap();
        assert_eq!(e6.neighbors(3), vec![1, 2, 4]);
    }

    #[test]
    fn piecewise_linear_examples() {
        for name in ["A3", "D4", "E6"] {
            let d = DynkinData::parse(name).unwrap();
            for i in 0..d.n {
                let m = RootVector::simple(d.n, i).neg();
                assert_eq!(d.tau_minus(&m), RootVector::simple(d.n, i).scale(-d.eps(i)));
                assert_eq!(d.g_vector(&m).unwrap(), RootVector::simple(d.n, i));
            }
        }
        let a3 = DynkinData::new(DynkinKind::A, 3, &[2]).unwrap();
        assert_eq!(a3.tau_minus(&rv(&[1, 2, 1])), rv(&[1, 2, 1]));
        let d4 = DynkinData::new(DynkinKind::D, 4, &[1, 3, 4]).unwrap();
        assert_eq!(d4.tau_minus(&rv(&[1, 2, 1, 1])), rv(&[1, 1, 1, 1]));
    }

    #[test]
    fn involutions_and_preservation() {
        for name in ["A1", "A2", "A3", "A4", "A5", "D4", "D5"] {
            for d in [DynkinData::parse(name).unwrap(), DynkinData::parse(name).unwrap().flipped()] {
                let phi = d.almost_positive_roots();
                for g in &phi {
                    for map in [PlMap::TauPlus, PlMap::TauMinus] {
                        let img = d.piecewise_linear(map, g);
                        assert!(phi.contains(&img), "{} {:?} {}", name, map, g);
                        assert_eq!(d.piecewise_linear(map, &img), *g);
                    }
                    for i in 0..d.n {
                        let s = d.piecewise_linear(PlMap::Sigma(i), g);
                        assert_eq!(d.piecewise_linear(PlMap::Sigma(i), &s), *g);
                    }
                    assert_eq!(d.tau_pow(&d.tau_pow(g, 3), -3), *g);
                }
            }
        }
    }

    #[test]
    fn g_vectors_distinct_and_positive_case() {
        let d = DynkinData::parse("A3").unwrap();
        let phi = d.almost_positive_roots();
        let gs: std::collections::HashSet<_> = phi.iter().map(|a| d.g_vector(a).unwrap()).collect();
        assert_eq!(gs.len(), phi.len());
        for a in d.positive_roots() {
            let b = d.tau_minus(&a);
            if b.is_positive() {
                let want = RootVector((0..d.n).map(|i| -b.0[i] * d.eps(i)).collect());
                assert_eq!(d.g_vector(&a).unwrap(), want);
            }
        }
        assert!(d.g_vector(&rv(&[1, 0, 1])).is_err());
    }

    #[test]
    fn json_forms() {
        let d = DynkinData::new(DynkinKind::D, 4, &[2]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"type":"D","rank":4,"i0":[2]}"#);
        assert_eq!(serde_json::from_str::<DynkinData>(&s).unwrap(), d);
        assert_eq!(serde_json::to_string(&rv(&[1, -1])).unwrap(), "[1,-1]");
        assert_eq!("1,2,1,1".parse::<RootVector>().unwrap(), rv(&[1, 2, 1, 1]));
    }
}
