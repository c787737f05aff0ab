//! F-polynomials, tropical evaluation and the reconstruction of cluster
//! variables from an F-polynomial and a g-vector.
//!
//! Two independent routes produce `F_α`:
//!
//! * the principal route enumerates the atlas of the principal-coefficient
//!   seed built on the bipartite matrix `B_z` and sets the `u`-variables to 1;
//! * the combinatorial route sums `2^{e(γ,α)} v^γ` over α-acceptable vectors
//!   (valid when every coordinate of α is at most 2).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cluster::{self, ClusterError, ExchangeMatrix, LabeledAtlas, Limits, Seed};
use crate::laurent::{LaurentError, LaurentPoly, Monomial, VarId};
use crate::roots::{DynkinData, RootVector, RootsError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpolyError {
    #[error("{0} has a coordinate outside [0, 2]")]
    NotTwoRestricted(RootVector),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("{0} is not an almost positive root")]
    NotAlmostPositive(RootVector),
    #[error("principal cluster variable for {0} is not a polynomial with positive coefficients")]
    NotPositive(RootVector),
}

/// Polynomial in `v_1..v_n` with nonnegative integer coefficients, stored by
/// exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FPoly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, u64>,
}

/// The placeholder variable `v_{i+1}`.
pub fn v_var(i: usize) -> VarId {
    VarId::named(&format!("v{}", i + 1))
}

impl FPoly {
    pub fn one(n: usize) -> Self {
        FPoly {
            n,
            terms: BTreeMap::from([(vec![0; n], 1)]),
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: u64) {
        if c > 0 {
            *self.terms.entry(exps).or_insert(0) += c;
        }
    }

    pub fn mul(&self, other: &FPoly) -> FPoly {
        let mut out = FPoly {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.checked_mul(*cb).expect("F-polynomial coefficient overflow"));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> FPoly {
        (0..k).fold(FPoly::one(self.n), |acc, _| acc.mul(self))
    }

    pub fn constant_term(&self) -> u64 {
        self.terms.get(&vec![0; self.n]).copied().unwrap_or(0)
    }

    pub fn coefficient(&self, exps: &[u32]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients, i.e. the value at `v = (1,…,1)`.
    pub fn value_at_one(&self) -> u64 {
        self.terms.values().sum()
    }

    /// The monomial `v^a` with coefficient 1 dividing every other term, if any.
    pub fn maximal_monomial(&self) -> Option<Vec<u32>> {
        let top: Vec<u32> = (0..self.n)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        (self.coefficient(&top) == 1).then_some(top)
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(e, &c)| {
            (
                Monomial::from_pairs(e.iter().enumerate().map(|(i, &x)| (v_var(i), x as i32))),
                BigInt::from(c),
            )
        }))
    }

    /// Reads a polynomial in `v_1..v_n`; `None` unless all coefficients and
    /// exponents are nonnegative and only the `v` variables occur.
    pub fn from_laurent(n: usize, p: &LaurentPoly) -> Option<FPoly> {
        let vars: Vec<VarId> = (0..n).map(v_var).collect();
        let mut out = FPoly {
            n,
            terms: BTreeMap::new(),
        };
        for (m, c) in p.terms() {
            if m.variables().any(|v| !vars.contains(&v)) {
                return None;
            }
            let e: Option<Vec<u32>> = vars.iter().map(|&v| u32::try_from(m.exponent(v)).ok()).collect();
            let c = c.to_u64().filter(|&c| c > 0)?;
            out.add_term(e?, c);
        }
        Some(out)
    }

    /// Substitutes `v_j ↦ images[j]`.
    pub fn evaluate(&self, images: &[LaurentPoly]) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, &c) in &self.terms {
            let mut t = LaurentPoly::constant(c);
            for (j, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = t.mul(&images[j].pow(x));
                }
            }
            out = out.add(&t);
        }
        out
    }
}

impl fmt::Display for FPoly {
    /// Terms by increasing degree, e.g. `1 + 2*v2 + v1*v2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ts: Vec<(&Vec<u32>, &u64)> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        for (idx, (e, c)) in ts.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("v{}", i + 1) } else { format!("v{}^{}", i + 1, x) })
                .collect();
            match (factors.is_empty(), **c) {
                (true, c) => write!(f, "{}", c)?,
                (false, 1) => write!(f, "{}", factors.join("*"))?,
                (false, c) => write!(f, "{}*{}", c, factors.join("*"))?,
            }
        }
        if ts.is_empty() {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// The bipartite matrix `B_z`: `b_ij = ε_j a_ij` off the diagonal, `-1` at
/// `(n+j, j)`, and `-a_kj` at `(n+k, j)` for `j ∈ I0`, `k ≠ j`.
pub fn bz_matrix(d: &DynkinData) -> ExchangeMatrix {
    let n = d.n;
    let mut m = ExchangeMatrix::zero(2 * n, n);
    for j in 0..n {
        for i in 0..n {
            if i != j {
                m.set(i, j, d.eps(j) * d.cartan[i][j]);
            }
        }
        m.set(n + j, j, -1);
        if d.is_i0(j) {
            for k in 0..n {
                if k != j {
                    m.set(n + k, j, -d.cartan[k][j]);
                }
            }
        }
    }
    m
}

/// Seed `(z, B_z)` with fresh variables `z1..zn`, `f1..fn`.
pub fn z_seed(d: &DynkinData) -> Seed {
    let names: Vec<String> = (1..=d.n)
        .map(|i| format!("z{}", i))
        .chain((1..=d.n).map(|i| format!("f{}", i)))
        .collect();
    Seed::with_names(bz_matrix(d), &names).expect("consistent shape")
}

/// Principal-coefficient seed: principal part of `B_z` over the identity,
/// mutable variables `u_i`, frozen `v_i`.
pub fn principal_seed(d: &DynkinData) -> Seed {
    let n = d.n;
    let bz = bz_matrix(d);
    let mut m = ExchangeMatrix::zero(2 * n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, bz.get(i, j));
        }
        m.set(n + i, i, 1);
    }
    let names: Vec<String> = (1..=n)
        .map(|i| format!("u{}", i))
        .chain((1..=n).map(|i| format!("v{}", i)))
        .collect();
    Seed::with_names(m, &names).expect("consistent shape")
}

type PrincipalTable = Arc<HashMap<RootVector, FPoly>>;

/// All principal-route F-polynomials of a diagram (cached per diagram).
pub fn principal_table(d: &DynkinData) -> Result<PrincipalTable, FpolyError> {
    static CACHE: OnceLock<Mutex<HashMap<DynkinData, PrincipalTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache poisoned").get(d) {
        return Ok(t.clone());
    }
    let atlas = cluster::label_by_denominator(cluster::enumerate_atlas(&principal_seed(d), Limits::default())?, d)?;
    let ones: HashMap<VarId, LaurentPoly> = (1..=d.n)
        .map(|i| (VarId::named(&format!("u{}", i)), LaurentPoly::one()))
        .collect();
    let mut table = HashMap::new();
    for (var, label) in atlas.atlas.variables.iter().zip(&atlas.labels) {
        let f = var.substitute(&ones)?;
        let fp = FPoly::from_laurent(d.n, &f).ok_or_else(|| FpolyError::NotPositive(label.clone()))?;
        table.insert(label.clone(), fp);
    }
    let table = Arc::new(table);
    cache.lock().expect("cache poisoned").insert(d.clone(), table.clone());
    Ok(table)
}

pub fn f_poly_principal(alpha: &RootVector, d: &DynkinData) -> Result<FPoly, FpolyError> {
    principal_table(d)?
        .get(alpha)
        .cloned()
        .ok_or_else(|| FpolyError::NotAlmostPositive(alpha.clone()))
}

/// Vertices on the unique simple path between `p` and `q` in a tree diagram.
fn tree_path(d: &DynkinData, p: usize, q: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; d.n];
    let mut queue = std::collections::VecDeque::from([p]);
    parent[p] = p;
    while let Some(x) = queue.pop_front() {
        for y in d.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![q];
    let mut cur = q;
    while cur != p {
        cur = parent[cur];
        path.push(cur);
    }
    path
}

fn check_two_restricted(alpha: &RootVector) -> Result<(), FpolyError> {
    if !alpha.is_positive() || alpha.0.iter().any(|&a| a > 2) {
        return Err(FpolyError::NotTwoRestricted(alpha.clone()));
    }
    Ok(())
}

fn boxed_vectors(a: &[i32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &ai in a {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=ai as u32).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// The acceptable-vector formula, with conditions (i)–(iii) and the weight
/// `e(γ,α)` applied literally.  Accepts any nonzero vector with coordinates
/// in `[0,2]`, not only roots.
pub fn f_poly_acceptable(alpha: &RootVector, d: &DynkinData) -> Result<FPoly, FpolyError> {
    check_two_restricted(alpha)?;
    let a = &alpha.0;
    let n = d.n;
    let supp: Vec<usize> = alpha.support();
    let ends: Vec<usize> = supp.iter().copied().filter(|&i| a[i] == 1).collect();
    let paths: Vec<Vec<usize>> = ends
        .iter()
        .flat_map(|&p| ends.iter().filter(move |&&q| q > p).map(move |&q| (p, q)))
        .map(|(p, q)| tree_path(d, p, q))
        .filter(|path| path.iter().all(|&v| a[v] > 0))
        .collect();
    let mut out = FPoly {
        n,
        terms: BTreeMap::new(),
    };
    for c in boxed_vectors(a) {
        let cond_ii = (0..n).filter(|&i| !d.is_i0(i)).all(|i| {
            d.neighbors(i)
                .into_iter()
                .all(|j| c[i] as i32 <= (2 - a[j]) + c[j] as i32)
        });
        if !cond_ii {
            continue;
        }
        let special: Vec<bool> = (0..n)
            .map(|i| {
                if d.is_i0(i) {
                    c[i] as i32 == a[i] - 1
                } else {
                    c[i] == 1
                }
            })
            .collect();
        if paths.iter().any(|path| path.iter().all(|&v| special[v])) {
            continue;
        }
        let e = components(d, &special)
            .into_iter()
            .filter(|comp| comp.iter().all(|&i| a[i] == 2))
            .count();
        out.add_term(c, 1u64 << e);
    }
    Ok(out)
}

/// Connected components of the induced subgraph on `mask`.
fn components(d: &DynkinData, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; d.n];
    let mut out = Vec::new();
    for s in 0..d.n {
        if !mask[s] || seen[s] {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            comp.push(x);
            for y in d.neighbors(x) {
                if mask[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Shortcut for multiplicity-free vectors: `c ∈ {0,1}^supp` with
/// `c_i ≤ min{c_j : j ∈ supp adjacent to i}` for `i ∈ I1`.
pub fn f_poly_multiplicity_free(alpha: &RootVector, d: &DynkinData) -> Result<FPoly, FpolyError> {
    if !alpha.is_positive() || alpha.0.iter().any(|&x| x > 1) {
        return Err(FpolyError::NotTwoRestricted(alpha.clone()));
    }
    let mut out = FPoly {
        n: d.n,
        terms: BTreeMap::new(),
    };
    for c in boxed_vectors(&alpha.0) {
        let ok = (0..d.n).filter(|&i| !d.is_i0(i)).all(|i| {
            d.neighbors(i)
                .into_iter()
                .filter(|&j| alpha.0[j] > 0)
                .all(|j| c[i] <= c[j])
        });
        if ok {
            out.add_term(c, 1);
        }
    }
    Ok(out)
}

/// Combinatorial route: the shortcut for multiplicity-free vectors, the
/// literal acceptable-vector sum otherwise.
pub fn f_poly_combinatorial(alpha: &RootVector, d: &DynkinData) -> Result<FPoly, FpolyError> {
    if alpha.is_positive() && alpha.0.iter().all(|&x| x <= 1) {
        f_poly_multiplicity_free(alpha, d)
    } else {
        f_poly_acceptable(alpha, d)
    }
}

/// Element of the tropical semifield on `f_1..f_n`: an exponent vector.
pub type TropicalElem = Vec<i32>;

/// Evaluates `F` in the tropical semifield (`⊕` = componentwise min).
pub fn tropical_eval(f: &FPoly, images: &[TropicalElem]) -> TropicalElem {
    let width = images.first().map_or(0, |v| v.len());
    let mut out: Option<TropicalElem> = None;
    for e in f.terms.keys() {
        let mut t = vec![0; width];
        for (j, &x) in e.iter().enumerate() {
            for (k, tk) in t.iter_mut().enumerate() {
                *tk += x as i32 * images[j][k];
            }
        }
        out = Some(match out {
            None => t,
            Some(o) => o.iter().zip(&t).map(|(a, b)| *a.min(b)).collect(),
        });
    }
    out.unwrap_or_else(|| vec![0; width])
}

/// Tropical coefficients `y_j = ∏_i f_i^{b^z_{n+i,j}}`.
pub fn tropical_y(d: &DynkinData) -> Vec<TropicalElem> {
    let bz = bz_matrix(d);
    (0..d.n).map(|j| (0..d.n).map(|i| bz.get(d.n + i, j)).collect()).collect()
}

/// `ŷ_j = y_j ∏_i z_i^{b^z_{ij}}` as Laurent monomials in `z`, `f`.
pub fn y_hat(d: &DynkinData) -> Vec<LaurentPoly> {
    let bz = bz_matrix(d);
    (0..d.n)
        .map(|j| {
            LaurentPoly::from_monomial(Monomial::from_pairs((0..d.n).flat_map(|i| {
                [
                    (VarId::named(&format!("z{}", i + 1)), bz.get(i, j)),
                    (VarId::named(&format!("f{}", i + 1)), bz.get(d.n + i, j)),
                ]
            })))
        })
        .collect()
}

/// `z[α] = F_α(ŷ) z^{g(α)} / F_α|_P(y)`, using the principal route for `F_α`.
pub fn reconstruct_cluster_variable(alpha: &RootVector, d: &DynkinData) -> Result<LaurentPoly, FpolyError> {
    let f = f_poly_principal(alpha, d)?;
    let g = d.g_vector(alpha)?;
    let numer = f.evaluate(&y_hat(d));
    let trop = tropical_eval(&f, &tropical_y(d));
    let shift = Monomial::from_pairs((0..d.n).flat_map(|i| {
        [
            (VarId::named(&format!("z{}", i + 1)), g.0[i]),
            (VarId::named(&format!("f{}", i + 1)), -trop[i]),
        ]
    }));
    Ok(numer.mul_monomial(&shift))
}

/// Atlas of the `z`-seed, labelled by denominators in `z`.
pub fn z_atlas(d: &DynkinData) -> Result<LabeledAtlas, FpolyError> {
    Ok(cluster::label_by_denominator(
        cluster::enumerate_atlas(&z_seed(d), Limits::default())?,
        d,
    )?)
}
