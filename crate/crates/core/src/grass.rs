//! Representations of the bipartite Dynkin quiver over prime fields and
//! point counts of their quiver Grassmannians.
//!
//! Arrows go from the `I1` vertices (sources) to the adjacent `I0` vertices
//! (sinks). A subrepresentation is fixed by its sink subspaces up to a free
//! choice, at each source `k`, of a subspace of `∩_j M_{kj}^{-1}(N_j)`, so
//! point counts are sums over sink subspaces of products of Gaussian
//! binomials. An exhaustive enumerator is kept as an independent check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{self, ClusterError};
use crate::fpoly::FPoly;
use crate::roots::{DynkinData, DynkinKind, RootVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrassError {
    #[error("no representation is constructed for {0} in this type")]
    UnsupportedRoot(RootVector),
    #[error("point counts {0:?} do not come from one integer polynomial")]
    InterpolationMismatch(Vec<(u64, u128)>),
    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("constructed representation for {0} is not indecomposable")]
    Decomposable(RootVector),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// An arrow `source → target` with a `dims[target] × dims[source]` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuiverRep {
    #[serde(skip)]
    pub dynkin: DynkinData,
    pub p: u64,
    pub dims: Vec<usize>,
    pub arrows: Vec<Arrow>,
}

/// Point counts of one Grassmannian and the polynomial they determine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrassCount {
    pub gamma: RootVector,
    pub counts: Vec<(u64, u128)>,
    /// Coefficients of the counting polynomial, constant term first.
    pub polynomial: Vec<i64>,
    pub euler: i64,
}

/// The arrows `(source, target)` of the bipartite quiver.
pub fn quiver_arrows(d: &DynkinData) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..d.n {
        if d.xi[k] == 1 {
            for j in d.neighbors(k) {
                out.push((k, j));
            }
        }
    }
    out
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Row-reduces in place and returns the pivot columns.
fn rref(rows: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] % p != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for t in 0..width {
                    rows[i][t] = (rows[i][t] + p * p - f * rows[r][t] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Basis of `{x : A x = 0}` for `A` with `width` columns.
fn kernel(rows: &[Vec<u64>], width: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let pivots = rref(&mut m, p);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; width];
            v[f] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = (p - m[r][f] % p) % p;
            }
            v
        })
        .collect()
}

/// All `g`-dimensional subspaces of `F_p^n`, each as a reduced basis.
fn subspaces(n: usize, g: usize, p: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    choose_pivots(n, g, 0, &mut pivots, &mut |piv: &[usize]| {
        // Free entries: row r, column c > piv[r], c not a pivot.
        let slots: Vec<(usize, usize)> = (0..g)
            .flat_map(|r| ((piv[r] + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = (p as usize).pow(slots.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![0u64; n]; g];
            for (r, &c) in piv.iter().enumerate() {
                rows[r][c] = 1;
            }
            let mut x = code;
            for &(r, c) in &slots {
                rows[r][c] = (x % p as usize) as u64;
                x /= p as usize;
            }
            out.push(rows);
        }
    });
    out
}

fn choose_pivots(n: usize, g: usize, start: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if acc.len() == g {
        f(acc);
        return;
    }
    for c in start..n {
        acc.push(c);
        choose_pivots(n, g, c + 1, acc, f);
        acc.pop();
    }
}

/// Number of `k`-dimensional subspaces of `F_p^n`.
pub fn gaussian_binomial(n: usize, k: usize, p: u64) -> u128 {
    if k > n {
        return 0;
    }
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for t in 0..k {
        num *= p.pow((n - t) as u32) - 1;
        den *= p.pow((t + 1) as u32) - 1;
    }
    num / den
}

fn apply(matrix: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    matrix.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b % p).sum::<u64>() % p).collect()
}

impl QuiverRep {
    fn zero(d: &DynkinData, dims: Vec<usize>, p: u64) -> Self {
        let arrows = quiver_arrows(d)
            .into_iter()
            .map(|(s, t)| Arrow {
                source: s,
                target: t,
                matrix: vec![vec![0; dims[s]]; dims[t]],
            })
            .collect();
        QuiverRep {
            dynkin: d.clone(),
            p,
            dims,
            arrows,
        }
    }

    pub fn dimension_vector(&self) -> RootVector {
        RootVector(self.dims.iter().map(|&x| x as i32).collect())
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn direct_sum(&self, o: &QuiverRep) -> QuiverRep {
        let dims: Vec<usize> = self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect();
        let mut out = QuiverRep::zero(&self.dynkin, dims, self.p);
        for (k, arrow) in out.arrows.iter_mut().enumerate() {
            let (a, b) = (&self.arrows[k], &o.arrows[k]);
            let (sa, ta) = (self.dims[arrow.source], self.dims[arrow.target]);
            for (r, row) in a.matrix.iter().enumerate() {
                arrow.matrix[r][..sa].copy_from_slice(row);
            }
            for (r, row) in b.matrix.iter().enumerate() {
                arrow.matrix[ta + r][sa..].copy_from_slice(row);
            }
        }
        out
    }

    /// Dimension of `End(M)`: solutions of `φ_t M_a = M_a φ_s` for all arrows.
    pub fn endomorphism_dim(&self) -> usize {
        let p = self.p;
        let offsets: Vec<usize> = self
            .dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d * d;
                Some(o)
            })
            .collect();
        let unknowns: usize = self.dims.iter().map(|d| d * d).sum();
        let var = |i: usize, r: usize, c: usize| offsets[i] + r * self.dims[i] + c;
        let mut rows = Vec::new();
        for a in &self.arrows {
            let (s, t) = (a.source, a.target);
            for r in 0..self.dims[t] {
                for c in 0..self.dims[s] {
                    // (φ_t M)[r][c] − (M φ_s)[r][c] = 0
                    let mut row = vec![0u64; unknowns];
                    for x in 0..self.dims[t] {
                        row[var(t, r, x)] = (row[var(t, r, x)] + a.matrix[x][c]) % p;
                    }
                    for x in 0..self.dims[s] {
                        row[var(s, x, c)] = (row[var(s, x, c)] + p - a.matrix[r][x] % p) % p;
                    }
                    rows.push(row);
                }
            }
        }
        unknowns - if rows.is_empty() { 0 } else { rank(&rows, p) }
    }
}

/// The indecomposable representation with dimension vector `α`.
///
/// Thin roots get identity maps along their support. The `D_4` highest root
/// puts `F_p^2` at the trivalent vertex and the three lines spanned by
/// `(1,0)`, `(0,1)`, `(1,1)` at the legs.
pub fn indecomposable_rep(alpha: &RootVector, d: &DynkinData, p: u64) -> Result<QuiverRep, GrassError> {
    let supported = match d.kind {
        DynkinKind::A => true,
        DynkinKind::D => d.n == 4,
        DynkinKind::E => false,
    };
    if !supported || !alpha.is_positive() || !d.positive_roots().contains(alpha) {
        return Err(GrassError::UnsupportedRoot(alpha.clone()));
    }
    let dims: Vec<usize> = alpha.0.iter().map(|&x| x as usize).collect();
    let mut m = QuiverRep::zero(d, dims, p);
    if alpha.0.iter().all(|&x| x <= 1) {
        for a in m.arrows.iter_mut() {
            if alpha.0[a.source] == 1 && alpha.0[a.target] == 1 {
                a.matrix = vec![vec![1]];
            }
        }
    } else if alpha.0 == [1, 2, 1, 1] {
        let lines = [[1u64, 0], [0, 1], [1, 1]];
        let mut legs = 0;
        for a in m.arrows.iter_mut() {
            let line = lines[legs];
            legs += 1;
            a.matrix = if a.target == 1 {
                line.iter().map(|&x| vec![x]).collect()
            } else {
                vec![line.to_vec()]
            };
        }
    } else {
        return Err(GrassError::UnsupportedRoot(alpha.clone()));
    }
    if m.endomorphism_dim() != 1 {
        return Err(GrassError::Decomposable(alpha.clone()));
    }
    Ok(m)
}

/// A representation of dimension vector `γ ≥ 0` built as the direct sum of
/// indecomposables along the cluster expansion of `γ`.
pub fn generic_rep(gamma: &RootVector, d: &DynkinData, p: u64) -> Result<QuiverRep, GrassError> {
    let mut m = QuiverRep::zero(d, vec![0; d.n], p);
    if gamma.is_zero() {
        return Ok(m);
    }
    let atlas = cluster::c1_atlas_cached(d)?;
    for (alpha, &k) in &atlas.cluster_expansion(gamma)? {
        if !alpha.is_positive() {
            return Err(GrassError::UnsupportedRoot(gamma.clone()));
        }
        let piece = indecomposable_rep(alpha, d, p)?;
        for _ in 0..k {
            m = m.direct_sum(&piece);
        }
    }
    Ok(m)
}

const MAX_TOTAL_DIMENSION: usize = 10;
const MAX_ENUMERATION: u128 = 50_000_000;

/// `|Gr_γ(M)(F_p)|`: sink subspaces are enumerated, source subspaces counted.
pub fn count_subreps(m: &QuiverRep, gamma: &RootVector) -> Result<u128, GrassError> {
    let p = m.p;
    let d = &m.dynkin;
    if gamma.0.iter().zip(&m.dims).any(|(&g, &n)| g < 0 || g as usize > n) {
        return Ok(0);
    }
    if m.total_dimension() > MAX_TOTAL_DIMENSION {
        return Err(GrassError::ScaleExceeded(format!("total dimension {}", m.total_dimension())));
    }
    let sinks: Vec<usize> = (0..d.n).filter(|&i| d.xi[i] == 0).collect();
    let sources: Vec<usize> = (0..d.n).filter(|&i| d.xi[i] == 1).collect();
    let size: u128 = sinks
        .iter()
        .map(|&j| gaussian_binomial(m.dims[j], gamma.0[j] as usize, p))
        .product();
    if size > MAX_ENUMERATION {
        return Err(GrassError::ScaleExceeded(format!("{} sink configurations", size)));
    }
    let choices: Vec<Vec<Vec<Vec<u64>>>> = sinks
        .iter()
        .map(|&j| subspaces(m.dims[j], gamma.0[j] as usize, p))
        .collect();
    // Annihilator rows of each candidate sink subspace.
    let annihilators: Vec<Vec<Vec<Vec<u64>>>> = sinks
        .iter()
        .zip(&choices)
        .map(|(&j, cs)| cs.iter().map(|basis| kernel(basis, m.dims[j], p)).collect())
        .collect();
    let mut total = 0u128;
    let mut idx = vec![0usize; sinks.len()];
    loop {
        let mut term = 1u128;
        for &k in &sources {
            let mut stack: Vec<Vec<u64>> = Vec::new();
            for a in m.arrows.iter().filter(|a| a.source == k) {
                let t = sinks.iter().position(|&j| j == a.target).expect("arrows end at sinks");
                for q in &annihilators[t][idx[t]] {
                    // Row q·M_a.
                    let row: Vec<u64> = (0..m.dims[k])
                        .map(|c| (0..m.dims[a.target]).map(|r| q[r] * a.matrix[r][c] % p).sum::<u64>() % p)
                        .collect();
                    stack.push(row);
                }
            }
            let free = m.dims[k] - if stack.is_empty() { 0 } else { rank(&stack, p) };
            term *= gaussian_binomial(free, gamma.0[k] as usize, p);
            if term == 0 {
                break;
            }
        }
        total += term;
        // Advance the mixed-radix index.
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn in_span(basis: &[Vec<u64>], v: &[u64], p: u64) -> bool {
    let mut rows = basis.to_vec();
    let r0 = rank(&rows, p);
    rows.push(v.to_vec());
    rank(&rows, p) == r0
}

/// `|Gr_γ(M)(F_p)|` by enumerating every tuple of subspaces and testing
/// closure under all arrows.
pub fn count_subreps_exhaustive(m: &QuiverRep, gamma: &RootVector) -> u128 {
    let p = m.p;
    if gamma.0.iter().zip(&m.dims).any(|(&g, &n)| g < 0 || g as usize > n) {
        return 0;
    }
    let choices: Vec<Vec<Vec<Vec<u64>>>> = (0..m.dims.len())
        .map(|i| subspaces(m.dims[i], gamma.0[i] as usize, p))
        .collect();
    let mut idx = vec![0usize; choices.len()];
    let mut total = 0u128;
    loop {
        let closed = m.arrows.iter().all(|a| {
            choices[a.source][idx[a.source]]
                .iter()
                .all(|v| in_span(&choices[a.target][idx[a.target]], &apply(&a.matrix, v, p), p))
        });
        if closed {
            total += 1;
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn primes(k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 2u64;
    while out.len() < k {
        if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Lagrange interpolation through `points`, returned constant term first.
fn interpolate(points: &[(u64, u128)]) -> Vec<BigRational> {
    let k = points.len();
    let mut coeffs = vec![BigRational::zero(); k];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // Basis polynomial ∏_{j≠i} (x − x_j)/(x_i − x_j).
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (t, c) in basis.iter().enumerate() {
                next[t + 1] += c;
                next[t] -= c * BigRational::from_integer(BigInt::from(xj));
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xi as i64 - xj as i64));
        }
        let scale = BigRational::from_integer(BigInt::from(yi)) / denom;
        for (t, c) in basis.into_iter().enumerate() {
            coeffs[t] += c * &scale;
        }
    }
    coeffs
}

/// Euler characteristic of `Gr_γ(M)` for a family `p ↦ M(F_p)`: counts over
/// enough primes to pin down a polynomial of degree `Σγ_i(dim_i − γ_i)`,
/// with at least one extra prime as a consistency check.
pub fn euler_characteristic(
    family: &(dyn Fn(u64) -> Result<QuiverRep, GrassError> + Sync),
    gamma: &RootVector,
) -> Result<GrassCount, GrassError> {
    let probe = family(2)?;
    let degree: usize = gamma
        .0
        .iter()
        .zip(&probe.dims)
        .map(|(&g, &n)| if g < 0 || g as usize > n { 0 } else { g as usize * (n - g as usize) })
        .sum();
    let ps = primes((degree + 2).max(3));
    let counts: Vec<(u64, u128)> = ps
        .par_iter()
        .map(|&p| Ok((p, count_subreps(&family(p)?, gamma)?)))
        .collect::<Result<_, GrassError>>()?;
    let coeffs = interpolate(&counts[..degree + 1]);
    let mismatch = || GrassError::InterpolationMismatch(counts.clone());
    let mut poly = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if !c.is_integer() {
            return Err(mismatch());
        }
        poly.push(c.to_integer().to_i64().ok_or_else(mismatch)?);
    }
    for &(p, y) in &counts[degree + 1..] {
        let v: i128 = poly.iter().rev().fold(0i128, |acc, &c| acc * p as i128 + c as i128);
        if v != y as i128 {
            return Err(mismatch());
        }
    }
    while poly.len() > 1 && poly.last() == Some(&0) {
        poly.pop();
    }
    Ok(GrassCount {
        gamma: gamma.clone(),
        euler: poly.iter().sum(),
        counts,
        polynomial: poly,
    })
}

/// Every `γ` with `0 ≤ γ ≤ dims`, with its Grassmannian data.
pub fn grassmannian_table(
    family: &(dyn Fn(u64) -> Result<QuiverRep, GrassError> + Sync),
    dims: &RootVector,
) -> Result<Vec<GrassCount>, GrassError> {
    let mut gammas = vec![RootVector::zero(dims.len())];
    for (i, &x) in dims.0.iter().enumerate() {
        gammas = gammas
            .into_iter()
            .flat_map(|g| {
                (0..=x).map(move |t| {
                    let mut h = g.clone();
                    h.0[i] = t;
                    h
                })
            })
            .collect();
    }
    gammas.par_iter().map(|g| euler_characteristic(family, g)).collect()
}

/// `Σ_γ χ(Gr_γ(M)) v^γ` for a family of representations.
pub fn fpoly_of_family(
    family: &(dyn Fn(u64) -> Result<QuiverRep, GrassError> + Sync),
    dims: &RootVector,
) -> Result<FPoly, GrassError> {
    let mut f = FPoly::one(dims.len());
    f.terms = BTreeMap::new();
    for g in grassmannian_table(family, dims)? {
        if g.euler != 0 {
            f.add_term(g.gamma.0.iter().map(|&x| x as u32).collect(), g.euler as u64);
        }
    }
    Ok(f)
}

/// `F_α = Σ_γ χ(Gr_γ(M[α])) v^γ`.
pub fn geometric_fpoly(alpha: &RootVector, d: &DynkinData) -> Result<FPoly, GrassError> {
    indecomposable_rep(alpha, d, 2)?;
    let family = |p: u64| indecomposable_rep(alpha, d, p);
    fpoly_of_family(&family, alpha)
}
