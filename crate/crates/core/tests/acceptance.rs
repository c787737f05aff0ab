//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Run with `cargo test -p monocat --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use monocat::cluster::{self, c1_atlas, ExchangeMatrix, LabeledAtlas, Limits, Seed};
use monocat::fpoly::{self, FPoly};
use monocat::grass;
use monocat::laurent::{LaurentPoly, Monomial, VarId};
use monocat::levels;
use monocat::qchar::{
    self, a_monomial, frenkel_mukhin, frozen_monomial, y_gamma, AWeight, DecoratedQChar, FmOptions, Route,
    Truncation, YMonomial,
};
use monocat::roots::{DynkinData, DynkinKind, RootVector};
use monocat::verify;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rv(v: &[i32]) -> RootVector {
    RootVector(v.to_vec())
}

fn a(n: usize) -> DynkinData {
    DynkinData::standard(DynkinKind::A, n).unwrap()
}

fn d4() -> DynkinData {
    DynkinData::standard(DynkinKind::D, 4).unwrap()
}

fn d4_trivalent_i0() -> DynkinData {
    DynkinData::new(DynkinKind::D, 4, &[2]).unwrap()
}

fn poly(s: &str) -> LaurentPoly {
    s.parse().unwrap_or_else(|e| panic!("{}: {}", s, e))
}

/// `numerator / ∏ denominator`.
fn frac(numerator: &str, denominator: &[&str]) -> LaurentPoly {
    let m = Monomial::from_pairs(denominator.iter().map(|v| (VarId::named(v), -1)));
    poly(numerator).mul_monomial(&m)
}

// ---------------------------------------------------------------------------
// 1. A3 atlas

fn a3_cluster_list() -> BTreeSet<BTreeSet<RootVector>> {
    let lists: [[[i32; 3]; 3]; 14] = [
        [[-1, 0, 0], [0, -1, 0], [0, 0, -1]],
        [[1, 0, 0], [0, -1, 0], [0, 0, -1]],
        [[-1, 0, 0], [0, 1, 0], [0, 0, -1]],
        [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 1]],
        [[-1, 0, 0], [0, 1, 0], [0, 1, 1]],
        [[-1, 0, 0], [0, 0, 1], [0, 1, 1]],
        [[0, 0, -1], [0, 1, 0], [1, 1, 0]],
        [[0, 0, -1], [1, 0, 0], [1, 1, 0]],
        [[1, 1, 0], [0, 1, 0], [0, 1, 1]],
        [[1, 0, 0], [0, 0, 1], [1, 1, 1]],
        [[1, 0, 0], [1, 1, 0], [1, 1, 1]],
        [[0, 0, 1], [0, 1, 1], [1, 1, 1]],
        [[1, 1, 0], [0, 1, 1], [1, 1, 1]],
    ];
    lists.iter().map(|c| c.iter().map(|r| rv(r)).collect()).collect()
}

fn criterion_1() -> Outcome {
    let d = a(3);
    let start = Instant::now();
    let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
    let x = |r: &[i32]| atlas.variable(&rv(r)).cloned().unwrap();
    let f = |i: usize| LaurentPoly::named(&format!("f{}", i));

    ensure!(atlas.atlas.clusters.len() == 14, "{} clusters", atlas.atlas.clusters.len());
    ensure!(atlas.atlas.variables.len() == 9, "{} variables", atlas.atlas.variables.len());
    ensure!(atlas.atlas.frozen.len() == 3, "{} frozen", atlas.atlas.frozen.len());
    let got: BTreeSet<BTreeSet<RootVector>> =
        atlas.labeled_clusters().into_iter().map(|c| c.into_iter().collect()).collect();
    ensure!(got == a3_cluster_list(), "cluster list differs: {:?}", got);

    let expansions = [
        ([1, 0, 0], frac("x2 + f1", &["x1"])),
        ([0, 1, 0], frac("x1*x3 + f2", &["x2"])),
        ([0, 0, 1], frac("x2 + f3", &["x3"])),
        ([1, 1, 0], frac("f2*x2 + f1*x1*x3 + f1*f2", &["x1", "x2"])),
        ([0, 1, 1], frac("f2*x2 + f3*x1*x3 + f2*f3", &["x2", "x3"])),
        (
            [1, 1, 1],
            frac("f2*x2^2 + f1*f3*x1*x3 + f1*f2*x2 + f2*f3*x2 + f1*f2*f3", &["x1", "x2", "x3"]),
        ),
    ];
    for (label, want) in &expansions {
        ensure!(x(label) == *want, "x[{:?}] = {}", label, x(label));
    }

    let (m1, m2, m3) = (x(&[-1, 0, 0]), x(&[0, -1, 0]), x(&[0, 0, -1]));
    let (p1, p2, p3) = (x(&[1, 0, 0]), x(&[0, 1, 0]), x(&[0, 0, 1]));
    let identities = [
        ("f1", f(1), &m1 * &p1 - m2.clone()),
        ("f2", f(2), &m2 * &p2 - &m1 * &m3),
        ("f3", f(3), &m3 * &p3 - m2.clone()),
        ("x[a1+a2]", x(&[1, 1, 0]), &p1 * &p2 - m3.clone()),
        ("x[a2+a3]", x(&[0, 1, 1]), &p2 * &p3 - m1.clone()),
        (
            "x[a1+a2+a3]",
            x(&[1, 1, 1]),
            &(&(&p1 * &p2) * &p3) - &(&m1 * &p1) - &m3 * &p3 + m2.clone(),
        ),
    ];
    for (name, lhs, rhs) in &identities {
        ensure!(lhs == rhs, "generator identity for {} fails", name);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {:?}", elapsed);
    Ok(format!("14 clusters, 9+3 variables, 6 expansions, 6 identities in {:?}", elapsed))
}

// ---------------------------------------------------------------------------
// 2. A3 dimensions

/// Weyl dimension formula for `sl_{n+1}` with highest weight `Σ λ_i ϖ_i`.
fn weyl_dim_a(lambda: &[i64]) -> i64 {
    let n = lambda.len();
    let (mut num, mut den) = (1i64, 1i64);
    for i in 0..n {
        for j in i..n {
            num *= lambda[i..=j].iter().sum::<i64>() + (j - i + 1) as i64;
            den *= (j - i + 1) as i64;
        }
    }
    num / den
}

fn criterion_2() -> Outcome {
    let d = a(3);
    let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
    // Over U_q(sl_4): S(-α_i) restricts to V(ϖ_i) and F_i to V(2ϖ_i).
    let mut point = HashMap::new();
    for i in 0..3 {
        let mut w = vec![0i64; 3];
        w[i] = 1;
        point.insert(VarId::named(&format!("x{}", i + 1)), BigInt::from(weyl_dim_a(&w)));
        w[i] = 2;
        point.insert(VarId::named(&format!("f{}", i + 1)), BigInt::from(weyl_dim_a(&w)));
    }
    let order: [&[i32]; 9] = [
        &[-1, 0, 0],
        &[0, -1, 0],
        &[0, 0, -1],
        &[1, 0, 0],
        &[0, 1, 0],
        &[0, 0, 1],
        &[1, 1, 0],
        &[0, 1, 1],
        &[1, 1, 1],
    ];
    let mut by_weyl = Vec::new();
    for label in order {
        let v = atlas.variable(&rv(label)).unwrap().evaluate_integer(&point).map_err(err)?;
        by_weyl.push(v);
    }
    for i in 1..=3 {
        by_weyl.push(point[&VarId::named(&format!("f{}", i))].clone());
    }
    let expected: Vec<BigInt> = [4, 6, 4, 4, 6, 4, 20, 20, 70, 10, 20, 10].iter().map(|&x| BigInt::from(x)).collect();
    ensure!(by_weyl == expected, "evaluation at Weyl dimensions gives {:?}", by_weyl);

    let (vars, frozen) = levels::c1_atlas_dimensions(&d, &atlas.atlas).map_err(err)?;
    let mut by_qchar: Vec<BigInt> = order.iter().map(|l| vars[atlas.index[&rv(l)]].clone()).collect();
    by_qchar.extend(frozen);
    ensure!(by_qchar == expected, "q-character dimensions {:?}", by_qchar);
    Ok("4,6,4,4,6,4,20,20,70,10,20,10 by Weyl evaluation and by q-characters".into())
}

// ---------------------------------------------------------------------------
// 3. Frenkel-Mukhin on A2

/// `χ_q(L(Y_{i,r}))` in type `A_2` from the closed formula for fundamental modules.
fn a2_fundamental(i: usize, r: i32) -> BTreeMap<YMonomial, u64> {
    let j = 1 - i;
    let terms = [
        YMonomial::y(i, r),
        YMonomial::y_pow(i, r + 2, -1).mul(&YMonomial::y(j, r + 1)),
        YMonomial::y_pow(j, r + 3, -1),
    ];
    terms.into_iter().map(|m| (m, 1)).collect()
}

fn product_of(a: &BTreeMap<YMonomial, u64>, b: &BTreeMap<YMonomial, u64>) -> BTreeMap<YMonomial, u64> {
    let mut out = BTreeMap::new();
    for (x, cx) in a {
        for (y, cy) in b {
            *out.entry(x.mul(y)).or_insert(0) += cx * cy;
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let d = a(2);
    let opts = FmOptions::default();
    let m = YMonomial::y(0, 0).mul(&YMonomial::y(1, 3));
    let fm = frenkel_mukhin(&m, &d, &opts).map_err(err)?.flatten();
    ensure!(fm.len() == 8, "{} monomials", fm.len());
    ensure!(fm.values().all(|&c| c == 1), "coefficients {:?}", fm.values().collect::<Vec<_>>());
    // 3 ⊗ 3̄ = 8 ⊕ 1: the product of the fundamentals minus the trivial monomial.
    let mut expected = product_of(&a2_fundamental(0, 0), &a2_fundamental(1, 3));
    ensure!(expected.remove(&YMonomial::one()) == Some(1), "oracle lost the trivial monomial");
    ensure!(fm == expected, "FM(Y10Y23) differs from the closed formula");

    let m2 = YMonomial::y_pow(0, 0, 2).mul(&YMonomial::y(1, 3));
    let fm2 = frenkel_mukhin(&m2, &d, &opts).map_err(err)?.flatten();
    let prod = product_of(&a2_fundamental(0, 0), &expected);
    let total: u64 = prod.values().sum();
    ensure!(total == 24, "product dimension {}", total);
    let missing = m2.mul(&a_monomial(0, 1, &d).inv()).mul(&a_monomial(1, 2, &d).inv());
    let mut diff = prod.clone();
    for (k, c) in &fm2 {
        let slot = diff.get_mut(k).ok_or_else(|| format!("FM has {} outside the product", k))?;
        ensure!(*slot >= *c, "FM coefficient of {} too large", k);
        *slot -= c;
    }
    diff.retain(|_, c| *c > 0);
    let want: BTreeMap<YMonomial, u64> = [(missing.clone(), 1)].into_iter().collect();
    ensure!(diff == want, "product minus FM(Y10^2 Y23) = {:?}", diff);
    Ok(format!("8 monomials; FM(Y10^2Y23) misses only {}; product dimension 24", missing))
}

// ---------------------------------------------------------------------------
// 4. F-polynomials and truncated characters

/// `Y^β F_{τ_−(β)}(v)` with `v_i = A_{i,ξ_i+1}^{-1}`, built term by term.
fn expected_simple(beta: &RootVector, d: &DynkinData) -> Result<BTreeMap<YMonomial, u64>, String> {
    let t = d.tau_minus(beta);
    let f = if t.is_positive() {
        fpoly::f_poly_principal(&t, d).map_err(err)?
    } else {
        FPoly::one(d.n)
    };
    let high = y_gamma(beta, d);
    let mut out = BTreeMap::new();
    for (e, &c) in &f.terms {
        let mut m = high.clone();
        for (i, &x) in e.iter().enumerate() {
            m = m.mul(&a_monomial(i, d.xi[i] as i32 + 1, d).pow(-(x as i32)));
        }
        *out.entry(m).or_insert(0) += c;
    }
    Ok(out)
}

fn criterion_4() -> Outcome {
    let diagrams: Vec<(DynkinData, bool)> = vec![
        (a(2), true),
        (a(3), true),
        (a(4), true),
        (a(5), true),
        (d4(), false),
        (d4_trivalent_i0(), true),
    ];
    let mut roots = 0;
    let mut chars = 0;
    let mut d4_geometric = Duration::ZERO;
    for (d, with_phij) in &diagrams {
        let start = Instant::now();
        for alpha in d.positive_roots() {
            let p = fpoly::f_poly_principal(&alpha, d).map_err(err)?;
            let c = fpoly::f_poly_combinatorial(&alpha, d).map_err(err)?;
            let g = grass::geometric_fpoly(&alpha, d).map_err(err)?;
            ensure!(p == c, "{} {}: principal {} vs combinatorial {}", d.name(), alpha, p, c);
            ensure!(p == g, "{} {}: principal {} vs geometric {}", d.name(), alpha, p, g);
            roots += 1;
        }
        if d.kind == DynkinKind::D {
            d4_geometric += start.elapsed();
        }
        for beta in d.almost_positive_roots() {
            let m = y_gamma(&beta, d);
            let want = expected_simple(&beta, d)?;
            let by_fpoly = qchar::truncated_char_c1(&m, d, Route::Fpoly).map_err(err)?;
            ensure!(by_fpoly.flatten() == want, "{} {}: fpoly route", d.name(), beta);
            if *with_phij {
                let by_phij = qchar::truncated_char_c1(&m, d, Route::PhiJ).map_err(err)?;
                ensure!(by_phij.flatten() == want, "{} {}: phiJ route", d.name(), beta);
            }
            chars += 1;
        }
    }
    ensure!(d4_geometric < Duration::from_secs(300), "D4 geometric route took {:?}", d4_geometric);
    Ok(format!(
        "{} positive roots on three routes, {} characters; D4 geometric {:?}",
        roots, chars, d4_geometric
    ))
}

// ---------------------------------------------------------------------------
// 5. Reconstruction from F-polynomials and g-vectors

fn criterion_5() -> Outcome {
    let mut count = 0;
    for d in [a(3), a(4), d4()] {
        let z = fpoly::z_atlas(&d).map_err(err)?;
        for alpha in d.almost_positive_roots() {
            let rebuilt = fpoly::reconstruct_cluster_variable(&alpha, &d).map_err(err)?;
            let enumerated = z.variable(&alpha).ok_or_else(|| format!("{}: no variable {}", d.name(), alpha))?;
            ensure!(&rebuilt == enumerated, "{} {}: {} vs {}", d.name(), alpha, rebuilt, enumerated);
            count += 1;
        }
    }
    Ok(format!("{} cluster variables rebuilt in A3, A4, D4", count))
}

// ---------------------------------------------------------------------------
// 6. Compatibility and simplicity

fn decompose(d: &DynkinData, factors: &[DecoratedQChar]) -> Result<BTreeMap<YMonomial, u64>, String> {
    qchar::decompose_product(factors, |m| qchar::truncated_char_c1(m, d, Route::Fpoly)).map_err(err)
}

fn side_monomial(atlas: &LabeledAtlas, d: &DynkinData, rec: &cluster::SeedRecord, side: &[(usize, u32)]) -> YMonomial {
    let n = d.n;
    side.iter().fold(YMonomial::one(), |acc, &(row, e)| {
        let m = if row < n {
            y_gamma(&atlas.labels[rec.vars[row]], d)
        } else {
            frozen_monomial(row - n, d)
        };
        acc.mul(&m.pow(e as i32))
    })
}

fn criterion_6() -> Outcome {
    let mut summary = Vec::new();
    for d in [a(3), d4()] {
        let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
        let roots = d.almost_positive_roots();
        let chi: HashMap<RootVector, DecoratedQChar> = roots
            .iter()
            .map(|b| Ok((b.clone(), qchar::truncated_char_c1(&y_gamma(b, &d), &d, Route::Fpoly).map_err(err)?)))
            .collect::<Result<_, String>>()?;
        let (mut compatible, mut single_dominant, mut incompatible) = (0, 0, 0);
        for (i, x) in roots.iter().enumerate() {
            for y in &roots[i..] {
                let parts = decompose(&d, &[chi[x].clone(), chi[y].clone()])?;
                let top = y_gamma(x, &d).mul(&y_gamma(y, &d));
                if atlas.compatible(x, y).map_err(err)? {
                    let want: BTreeMap<YMonomial, u64> = [(top, 1)].into_iter().collect();
                    ensure!(parts == want, "{}: S({})S({}) is not simple: {:?}", d.name(), x, y, parts);
                    compatible += 1;
                    let prod = chi[x].mul(&chi[y]).truncate(Truncation::Le2);
                    if prod.dominant_terms().len() == 1 {
                        single_dominant += 1;
                    }
                } else {
                    ensure!(parts.values().sum::<u64>() >= 2, "{}: S({})S({}) is simple", d.name(), x, y);
                    incompatible += 1;
                }
            }
        }
        let pairs = atlas.atlas.exchange_pairs();
        for &(x, y, s, k) in &pairs {
            let rec = &atlas.atlas.seeds[s];
            let col = rec.matrix.column(k);
            let plus: Vec<(usize, u32)> =
                col.iter().enumerate().filter(|(_, &b)| b > 0).map(|(r, &b)| (r, b as u32)).collect();
            let minus: Vec<(usize, u32)> =
                col.iter().enumerate().filter(|(_, &b)| b < 0).map(|(r, &b)| (r, (-b) as u32)).collect();
            let mut want = BTreeMap::new();
            for side in [&plus, &minus] {
                *want.entry(side_monomial(&atlas, &d, rec, side)).or_insert(0u64) += 1;
            }
            let (bx, by) = (&atlas.labels[x], &atlas.labels[y]);
            let parts = decompose(&d, &[chi[bx].clone(), chi[by].clone()])?;
            ensure!(parts == want, "{}: S({})S({}) gives {:?}, expected {:?}", d.name(), bx, by, parts, want);
        }
        summary.push(format!(
            "{}: {} compatible ({} with one dominant monomial), {} incompatible, {} exchange pairs",
            d.name(),
            compatible,
            single_dominant,
            incompatible,
            pairs.len()
        ));
    }
    // The worked exchange relation in A3.
    let d = a(3);
    let s = |r: &[i32]| qchar::truncated_char_c1(&y_gamma(&rv(r), &d), &d, Route::Fpoly).unwrap();
    let parts = decompose(&d, &[s(&[0, -1, 0]), s(&[0, 1, 0])])?;
    let want: BTreeMap<YMonomial, u64> = [
        (frozen_monomial(1, &d), 1),
        (y_gamma(&rv(&[-1, 0, 0]), &d).mul(&y_gamma(&rv(&[0, 0, -1]), &d)), 1),
    ]
    .into_iter()
    .collect();
    ensure!(parts == want, "[S(-a2)][S(a2)] = {:?}", parts);
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// 7. Periodic T-system

struct Displayed {
    left: ([i32; 3], [i32; 3]),
    plus: [u32; 3],
    minus: [u32; 3],
    right: Vec<[i32; 3]>,
}

fn displayed_a3() -> Vec<Displayed> {
    let row = |l: [i32; 3], r: [i32; 3], plus: [u32; 3], minus: [u32; 3], right: Vec<[i32; 3]>| Displayed {
        left: (l, r),
        plus,
        minus,
        right,
    };
    vec![
        row([1, 0, 0], [-1, 0, 0], [1, 0, 0], [0, 0, 0], vec![[0, -1, 0]]),
        row([0, 1, 1], [1, 0, 0], [0, 0, 1], [0, 0, 0], vec![[1, 1, 1]]),
        row([0, 0, -1], [0, 1, 1], [0, 1, 0], [0, 0, 1], vec![[0, 1, 0]]),
        row([0, 0, 1], [0, 0, -1], [0, 0, 1], [0, 0, 0], vec![[0, -1, 0]]),
        row([1, 1, 0], [0, 0, 1], [1, 0, 0], [0, 0, 0], vec![[1, 1, 1]]),
        row([-1, 0, 0], [1, 1, 0], [0, 1, 0], [1, 0, 0], vec![[0, 1, 0]]),
        row([1, 1, 1], [0, -1, 0], [1, 0, 1], [0, 1, 0], vec![[1, 0, 0], [0, 0, 1]]),
        row([0, 1, 0], [1, 1, 1], [0, 1, 0], [0, 0, 0], vec![[1, 1, 0], [0, 1, 1]]),
        row([0, -1, 0], [0, 1, 0], [0, 1, 0], [0, 0, 0], vec![[-1, 0, 0], [0, 0, -1]]),
    ]
}

/// The relation in the cluster algebra itself: `x[a] x[b] = f^{p+} + f^{p−} ∏ x[γ]`.
fn holds_in_cluster_algebra(atlas: &LabeledAtlas, d: &DynkinData, rel: &verify::PeriodicRelation) -> bool {
    let x = |r: &RootVector| atlas.variable(r).cloned().unwrap();
    let f = |e: &[u32]| {
        (0..d.n).fold(LaurentPoly::one(), |acc, i| acc.mul(&LaurentPoly::named(&format!("f{}", i + 1)).pow(e[i])))
    };
    let lhs = x(&rel.left.0).mul(&x(&rel.left.1));
    let tail = rel.right.iter().fold(f(&rel.minus), |acc, g| acc.mul(&x(g)));
    lhs == f(&rel.plus).add(&tail)
}

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    for d in [a(3), d4()] {
        let rels = verify::periodic_relations(&d).map_err(err)?;
        let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
        ensure!(rels.len() == d.n * (d.coxeter_number() + 3), "{} relations", rels.len());
        for r in &rels {
            ensure!(r.holds, "{}: {} fails in truncated characters", d.name(), r);
            ensure!(holds_in_cluster_algebra(&atlas, &d, r), "{}: {} fails in the cluster algebra", d.name(), r);
        }
        let report = verify::periodic_tsystem_verify(&d);
        ensure!(report.passed(), "{}: {}", d.name(), report.witness);
        summary.push(format!("{}: {} relations", d.name(), rels.len()));
        if d.kind == DynkinKind::A {
            for shown in displayed_a3() {
                let (l, r) = (rv(&shown.left.0), rv(&shown.left.1));
                let want_right: BTreeSet<RootVector> = shown.right.iter().map(|g| rv(g)).collect();
                let hit = rels.iter().any(|rel| {
                    let same_left = (rel.left.0 == l && rel.left.1 == r) || (rel.left.0 == r && rel.left.1 == l);
                    same_left
                        && rel.plus == shown.plus
                        && rel.minus == shown.minus
                        && rel.right.iter().cloned().collect::<BTreeSet<_>>() == want_right
                });
                ensure!(hit, "displayed identity [S({})][S({})] not produced", l, r);
            }
            summary.push("9 displayed A3 identities reproduced".into());
        }
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// 8. Cluster expansions

/// Solves `Σ c_k v_k = γ` for a basis `v_1..v_n`; `None` if singular.
fn solve(basis: &[RootVector], gamma: &RootVector) -> Option<Vec<Ratio<i64>>> {
    let n = gamma.len();
    let mut m: Vec<Vec<Ratio<i64>>> = (0..n)
        .map(|row| {
            let mut r: Vec<Ratio<i64>> = basis.iter().map(|v| Ratio::from_integer(v.0[row] as i64)).collect();
            r.push(Ratio::from_integer(gamma.0[row] as i64));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != Ratio::from_integer(0))?;
        m.swap(col, pivot);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= factor * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut summary = Vec::new();
    for d in [a(3), d4()] {
        let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
        let clusters = atlas.labeled_clusters();
        let mut nonzero_faces = 0;
        for _ in 0..1000 {
            let gamma = RootVector((0..d.n).map(|_| rng.gen_range(-3..=3)).collect());
            let mut found: BTreeSet<BTreeMap<RootVector, i64>> = BTreeSet::new();
            let mut clusters_hit = 0;
            for c in &clusters {
                let Some(coeffs) = solve(c, &gamma) else {
                    return Err(format!("{}: singular cluster {:?}", d.name(), c));
                };
                if coeffs.iter().all(|x| x.is_integer() && *x.numer() >= 0) {
                    clusters_hit += 1;
                    found.insert(
                        c.iter()
                            .zip(&coeffs)
                            .filter(|(_, x)| *x.numer() != 0)
                            .map(|(r, x)| (r.clone(), *x.numer()))
                            .collect(),
                    );
                }
            }
            ensure!(found.len() == 1, "{}: {} has {} expansions", d.name(), gamma, found.len());
            if clusters_hit > 1 {
                nonzero_faces += 1;
            }
            let lib = atlas.cluster_expansion(&gamma).map_err(err)?;
            let lib: BTreeMap<RootVector, i64> = lib.into_iter().map(|(r, k)| (r, k as i64)).collect();
            ensure!(found.contains(&lib), "{}: library expansion of {} differs", d.name(), gamma);
        }
        summary.push(format!(
            "{}: 1000 unique expansions ({} lie on a shared face)",
            d.name(),
            nonzero_faces
        ));
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// 9. Quiver Grassmannians

fn criterion_9() -> Outcome {
    let d = d4_trivalent_i0();
    let beta = rv(&[1, 2, 1, 1]);
    let family = |p: u64| grass::indecomposable_rep(&beta, &d, p);
    let table = grass::grassmannian_table(&family, &beta).map_err(err)?;
    let nonempty: Vec<_> = table.iter().filter(|g| g.counts.iter().all(|&(_, c)| c > 0)).collect();
    ensure!(nonempty.len() == 13, "{} nonempty Grassmannians", nonempty.len());
    let expected: BTreeSet<RootVector> = [
        [0, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 2, 0, 0],
        [1, 1, 0, 0],
        [0, 1, 1, 0],
        [0, 1, 0, 1],
        [1, 2, 0, 0],
        [0, 2, 1, 0],
        [0, 2, 0, 1],
        [1, 2, 1, 0],
        [1, 2, 0, 1],
        [0, 2, 1, 1],
        [1, 2, 1, 1],
    ]
    .iter()
    .map(|v| rv(v))
    .collect();
    let got: BTreeSet<RootVector> = nonempty.iter().map(|g| g.gamma.clone()).collect();
    ensure!(got == expected, "nonempty dimension vectors {:?}", got);
    for g in &nonempty {
        let want = if g.gamma == rv(&[0, 1, 0, 0]) { 2 } else { 1 };
        ensure!(g.euler == want, "chi at {} is {}", g.gamma, g.euler);
    }

    let d2 = a(2);
    let gamma = rv(&[2, 1]);
    let generic = |p: u64| grass::generic_rep(&gamma, &d2, p);
    let chi = grass::euler_characteristic(&generic, &rv(&[1, 0])).map_err(err)?;
    ensure!(chi.euler == 2, "A2 generic (2,1): chi(Gr_(1,0)) = {}", chi.euler);
    Ok("D4 highest root: 13 nonempty, chi 2 at (0,1,0,0); A2 generic (2,1): chi 2 at (1,0)".into())
}

// ---------------------------------------------------------------------------
// 10. Higher levels

fn criterion_10() -> Outcome {
    let mut instances = 0;
    let cases: Vec<(DynkinData, Vec<usize>)> = vec![(a(3), vec![1, 2]), (d4(), vec![2]), (a(1), (1..=6).collect())];
    for (d, ells) in &cases {
        for &ell in ells {
            for t in levels::verify_initial_tsystem(d, ell).map_err(err)? {
                ensure!(t.holds, "{} l={}: relation at vertex {} k={} fails", d.name(), ell, t.vertex + 1, t.k);
                instances += 1;
            }
        }
    }

    let d = a(2);
    let atlas = levels::gamma_ell_atlas(&d, 2, Limits::default()).map_err(err)?;
    ensure!(atlas.variables.len() == 16, "{} variables", atlas.variables.len());
    ensure!(atlas.clusters.len() == 50, "{} clusters", atlas.clusters.len());
    let (vars, frozen) = levels::atlas_dimensions(&d, 2, &atlas).map_err(err)?;
    let mut hist: BTreeMap<BigInt, usize> = BTreeMap::new();
    for v in vars {
        *hist.entry(v).or_insert(0) += 1;
    }
    let want: BTreeMap<BigInt, usize> =
        [(3, 6), (6, 4), (8, 3), (15, 2), (35, 1)].iter().map(|&(k, c)| (BigInt::from(k), c)).collect();
    ensure!(hist == want, "dimension histogram {:?}", hist);
    ensure!(frozen.iter().all(|f| *f == BigInt::from(10)), "frozen dimensions {:?}", frozen);

    let report = levels::grassmannian_check().map_err(err)?;
    ensure!(report.frozen_minors_are_one, "frozen minors differ from 1");
    ensure!(report.closing_value == 35, "[2,3,6][1,4,5]-1 = {}", report.closing_value);
    ensure!(report.entries.len() == 18, "{} table entries", report.entries.len());
    for e in &report.entries {
        ensure!(e.ok, "{}: minor expression {} vs dimension {}", e.module, e.value, e.dimension);
    }
    Ok(format!(
        "{} T-system instances; A2 l=2: 16 variables, 50 clusters, dimensions match; Gr(3,6) 18/18",
        instances
    ))
}

// ---------------------------------------------------------------------------
// 11. Invariants

fn random_seed(rng: &mut ChaCha8Rng) -> Seed {
    let n = rng.gen_range(1..=5);
    let frozen = rng.gen_range(0..=3);
    let mut rows = vec![vec![0i32; n]; n + frozen];
    for i in 0..n {
        for j in i + 1..n {
            let b = rng.gen_range(-2..=2);
            rows[i][j] = b;
            rows[j][i] = -b;
        }
    }
    for row in rows.iter_mut().skip(n) {
        for x in row.iter_mut() {
            *x = rng.gen_range(-2..=2);
        }
    }
    let names: Vec<String> = (0..n + frozen).map(|i| format!("u{}", i + 1)).collect();
    Seed::with_names(ExchangeMatrix::from_rows(&rows).unwrap(), &names).unwrap()
}

fn random_laurent(rng: &mut ChaCha8Rng) -> LaurentPoly {
    let names = ["p", "q", "r"];
    let mut out = LaurentPoly::zero();
    for _ in 0..rng.gen_range(0..=4) {
        let m = Monomial::from_pairs(names.iter().map(|v| (VarId::named(v), rng.gen_range(-2..=2))));
        out = out.add(&LaurentPoly::term(m, rng.gen_range(-5..=5)));
    }
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);

    // Mutation is an involution: random matrices, and random walks in D4.
    let walk_start = cluster::build_c1_seed(&d4());
    for case in 0..10_000 {
        let seed = if case % 2 == 0 {
            random_seed(&mut rng)
        } else {
            let mut s = walk_start.clone();
            for _ in 0..rng.gen_range(0..8) {
                s = s.mutate(rng.gen_range(0..s.n_mutable())).map_err(err)?;
            }
            s
        };
        let k = rng.gen_range(0..seed.n_mutable());
        let back = seed.mutate(k).and_then(|s| s.mutate(k)).map_err(err)?;
        ensure!(back == seed, "mutation at {} is not an involution on case {}", k, case);
    }

    // Laurent-ring axioms.
    for _ in 0..2_000 {
        let (p, q, r) = (random_laurent(&mut rng), random_laurent(&mut rng), random_laurent(&mut rng));
        ensure!(&p + &q == &q + &p, "addition not commutative");
        ensure!(&p * &q == &q * &p, "multiplication not commutative");
        ensure!(&(&p * &q) * &r == &p * &(&q * &r), "multiplication not associative");
        ensure!(&p * &(&q + &r) == &(&p * &q) + &(&p * &r), "not distributive");
        ensure!((&p - &p).is_zero() && &p * &LaurentPoly::one() == p, "identities fail");
        if !q.is_zero() {
            ensure!((&p * &q).exact_div(&q).map_err(err)? == p, "exact division fails");
        }
        ensure!(LaurentPoly::from_json(&p.to_json()).map_err(err)? == p, "JSON round trip fails");
        ensure!(p.to_string().parse::<LaurentPoly>().map_err(err)? == p, "text round trip fails for {}", p);
    }

    // Positivity of every enumerated cluster variable.
    let mut positive = 0;
    for d in [a(3), a(4), d4()] {
        let atlas = c1_atlas(&d, Limits::default()).map_err(err)?;
        for v in &atlas.atlas.variables {
            ensure!(v.is_nonnegative(), "{}: negative coefficient in {}", d.name(), v);
            positive += 1;
        }
    }

    // FM does not depend on the linear extension it visits monomials in.
    let tests: Vec<(DynkinData, YMonomial)> = vec![
        (a(2), YMonomial::y(0, 0).mul(&YMonomial::y(1, 3))),
        (a(2), YMonomial::y_pow(0, 0, 2).mul(&YMonomial::y(1, 3))),
        (a(3), YMonomial::y(1, 0).mul(&YMonomial::y(1, 2))),
        (a(3), y_gamma(&rv(&[1, 1, 1]), &a(3))),
        (d4_trivalent_i0(), y_gamma(&rv(&[0, 1, 1, 0]), &d4_trivalent_i0())),
    ];
    for (d, m) in &tests {
        let reference = frenkel_mukhin(m, d, &FmOptions::default()).map_err(err)?;
        for _ in 0..20 {
            let salt: u64 = rng.gen();
            let weight: AWeight = Arc::new(move |i, r| 1 + splitmix(salt ^ ((i as u64) << 32) ^ (r as u32 as u64)) % 64);
            let opts = FmOptions {
                weight: Some(weight),
                ..FmOptions::default()
            };
            let other = frenkel_mukhin(m, d, &opts).map_err(err)?;
            ensure!(other == reference, "{} FM({}) depends on the order", d.name(), m);
        }
    }

    // Truncation commutes with products on the A3 catalog.
    let d = a(3);
    let mut catalog: Vec<YMonomial> = d.almost_positive_roots().iter().map(|b| y_gamma(b, &d)).collect();
    catalog.extend((0..d.n).map(|i| frozen_monomial(i, &d)));
    let full: Vec<DecoratedQChar> = catalog
        .iter()
        .map(|m| frenkel_mukhin(m, &d, &FmOptions::default()).map_err(err))
        .collect::<Result<_, _>>()?;
    let mut pairs = 0;
    for (i, p) in full.iter().enumerate() {
        for q in &full[i..] {
            let left = p.mul(q).truncate(Truncation::Le2);
            let right = p.truncate(Truncation::Le2).mul(&q.truncate(Truncation::Le2));
            ensure!(left == right, "truncation of {} * {}", p.highest, q.highest);
            pairs += 1;
        }
    }
    Ok(format!(
        "10^4 involutions, 2000 ring-axiom cases, {} positive variables, 5x20 FM orders, {} truncated products",
        positive, pairs
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("A3 atlas", criterion_1),
        ("A3 prime dimensions", criterion_2),
        ("Frenkel-Mukhin on A2", criterion_3),
        ("F-polynomial routes and characters", criterion_4),
        ("reconstruction", criterion_5),
        ("compatibility and simplicity", criterion_6),
        ("periodic T-system", criterion_7),
        ("cluster expansion uniqueness", criterion_8),
        ("quiver Grassmannians", criterion_9),
        ("general level", criterion_10),
        ("invariants", criterion_11),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let number = k + 1;
        if only.is_some_and(|o| o != number) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {}", msg))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {:<36} {:>8.2}s  {}", number, name, secs, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {:<36} {:>8.2}s  {}", number, name, secs, why);
            }
        }
    }
    if failed > 0 {
        println!("{} criteria failed", failed);
        std::process::exit(1);
    }
}
