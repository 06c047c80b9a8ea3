//! Modular data: the multiplicative group generated by density-eigenvalue
//! ratios, its T-set, and the resulting type label.
//!
//! A positive rational is identified with its vector of prime exponents, so
//! multiplicative dependence between ratios becomes linear dependence of
//! integer vectors. A group generated by rationals `> 1` is trivial, cyclic
//! (`{λ^n}` with `0 < λ < 1`), or dense in `ℝ₊` as soon as two generators are
//! independent.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, ModularDescriptor};
use crate::rational::Rational;

/// Trial division bound; residues below its square are prime.
const TRIAL_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("cannot factor {0}: it has a prime factor beyond 64 bits")]
    UnsupportedMagnitude(BigInt),
    #[error("ratio {0} is not a positive rational")]
    NonPositive(Rational),
}

/// Prime-exponent vector of a positive rational; zero vector is `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ExponentVector(BTreeMap<u64, i64>);

impl ExponentVector {
    pub fn of(r: &Rational) -> Result<Self, ModularError> {
        if !r.is_positive() {
            return Err(ModularError::NonPositive(r.clone()));
        }
        let mut map = BTreeMap::new();
        for (p, e) in factor(r.numer())? {
            *map.entry(p).or_insert(0) += e as i64;
        }
        for (p, e) in factor(r.denom())? {
            *map.entry(p).or_insert(0) -= e as i64;
        }
        map.retain(|_, e| *e != 0);
        Ok(ExponentVector(map))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, p: u64) -> i64 {
        self.0.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.0.iter().map(|(p, e)| (*p, *e))
    }

    /// gcd of all coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.values().fold(0i64, |g, e| g.gcd(e))
    }

    pub fn scaled_down(&self, k: i64) -> Self {
        ExponentVector(self.0.iter().map(|(p, e)| (*p, e / k)).collect())
    }

    pub fn to_rational(&self) -> Rational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&p, &e) in &self.0 {
            let pp = BigInt::from(p).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num *= pp;
            } else {
                den *= pp;
            }
        }
        Rational::from_big(num, den)
    }
}

/// Prime factorization of `|n|` for `n ≠ 0`.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>, ModularError> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    let mut d = 2u64;
    while d < TRIAL_LIMIT {
        let bd = BigInt::from(d);
        if (&bd * &bd) > n {
            break;
        }
        let mut e = 0;
        while (&n % &bd).is_zero() {
            n /= &bd;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n.is_one() {
        return Ok(out);
    }
    let rest = n
        .to_u64()
        .ok_or_else(|| ModularError::UnsupportedMagnitude(n.clone()))?;
    let mut large = Vec::new();
    split_u64(rest, &mut large);
    large.sort_unstable();
    for p in large {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Residue with no factor below `TRIAL_LIMIT`.
fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if n < TRIAL_LIMIT * TRIAL_LIMIT || is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Group generated by the modular eigenvalue ratios.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioGroup {
    Trivial,
    /// `{λ^n | n ∈ ℤ}` with `0 < λ < 1`.
    Cyclic(Rational),
    Dense,
}

impl fmt::Display for RatioGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioGroup::Trivial => f.write_str("{1}"),
            RatioGroup::Cyclic(l) => write!(f, "({l})^ℤ"),
            RatioGroup::Dense => f.write_str("dense in ℝ₊"),
        }
    }
}

/// `{t ∈ ℝ | σ_t = Id}` for the product state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TSet {
    AllReals,
    /// `(2π / ln(1/λ)) ℤ`, carried by `λ`.
    Lattice(Rational),
    ZeroOnly,
}

impl TSet {
    /// Lattice period as a float, for display only.
    pub fn period(&self) -> Option<f64> {
        match self {
            TSet::Lattice(l) => Some(2.0 * PI / (1.0 / l.to_f64()).ln()),
            _ => None,
        }
    }

    /// Whether `t` lies in the set, using floating `t`.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        match self {
            TSet::AllReals => true,
            TSet::ZeroOnly => t.abs() <= tol,
            TSet::Lattice(_) => {
                let p = self.period().expect("lattice period");
                let k = (t / p).round();
                (t - k * p).abs() <= tol
            }
        }
    }
}

impl fmt::Display for TSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TSet::AllReals => f.write_str("ℝ"),
            TSet::Lattice(l) => write!(f, "(2π/ln({}))ℤ", l.recip()),
            TSet::ZeroOnly => f.write_str("{0}"),
        }
    }
}

/// Type of a diffuse factor arising from a free product. There is no
/// `III₀` variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorType {
    TypeII1,
    TypeIII(Rational),
    TypeIII1,
}

impl fmt::Display for FactorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorType::TypeII1 => f.write_str("II₁"),
            FactorType::TypeIII(l) => write!(f, "III_{l}"),
            FactorType::TypeIII1 => f.write_str("III₁"),
        }
    }
}

/// Ratios feeding the group, plus whether a dense modular spectrum is
/// declared by some diffuse summand.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatioGenerators {
    pub ratios: Vec<Rational>,
    pub has_dense: bool,
}

/// All within-block eigenvalue ratios `> 1`, `1/q` per geometric block and
/// `1/λ` per cyclic diffuse summand; sorted and de-duplicated.
pub fn ratio_generators(a: &AlgebraSpec) -> RatioGenerators {
    let mut set = BTreeSet::new();
    for b in a.blocks() {
        let w = b.weights();
        for (s, hi) in w.iter().enumerate() {
            for lo in &w[s + 1..] {
                if hi > lo {
                    set.insert(hi / lo);
                }
            }
        }
    }
    for g in a.geometric_blocks() {
        set.insert(g.ratio.recip());
    }
    let mut has_dense = false;
    for d in a.diffuse() {
        match &d.modular {
            ModularDescriptor::Tracial => {}
            ModularDescriptor::Cyclic(l) => {
                set.insert(l.recip());
            }
            ModularDescriptor::Dense => has_dense = true,
        }
    }
    RatioGenerators {
        ratios: set.into_iter().collect(),
        has_dense,
    }
}

/// Classifies the subgroup of `ℝ₊` generated by `generators`.
///
/// Generators below 1 are inverted and generators equal to 1 ignored, so
/// the result depends only on the generated group.
pub fn classify_group(generators: &[Rational], has_dense: bool) -> Result<RatioGroup, ModularError> {
    if has_dense {
        return Ok(RatioGroup::Dense);
    }
    let mut vectors = Vec::new();
    for g in generators {
        let v = ExponentVector::of(g)?;
        if !v.is_zero() {
            vectors.push(v);
        }
    }
    let Some(first) = vectors.first() else {
        return Ok(RatioGroup::Trivial);
    };
    let content = first.content();
    let mut primitive = first.scaled_down(content);
    // orient so the primitive element is > 1
    let pivot = primitive.primes().next().expect("nonzero vector");
    let sign = if primitive.to_rational() > Rational::one() {
        1
    } else {
        -1
    };
    if sign < 0 {
        primitive = primitive.scaled_down(-1);
    }
    let mut g = 0i64;
    for v in &vectors {
        let base = primitive.get(pivot);
        let c = v.get(pivot);
        if c % base != 0 {
            return Ok(RatioGroup::Dense);
        }
        let k = c / base;
        let same_support = v.primes().eq(primitive.primes());
        if !same_support || v.entries().any(|(p, e)| e != k * primitive.get(p)) {
            return Ok(RatioGroup::Dense);
        }
        g = g.gcd(&k);
    }
    let generator = primitive.to_rational().pow(g as i32);
    Ok(RatioGroup::Cyclic(generator.recip()))
}

/// Group generated by the modular data of one algebra.
pub fn group_of(a: &AlgebraSpec) -> Result<RatioGroup, ModularError> {
    let gens = ratio_generators(a);
    classify_group(&gens.ratios, gens.has_dense)
}

/// Join of subgroups: the group generated by the union of their generators.
pub fn combine(groups: &[RatioGroup]) -> Result<RatioGroup, ModularError> {
    let mut gens = Vec::new();
    for g in groups {
        match g {
            RatioGroup::Trivial => {}
            RatioGroup::Cyclic(l) => gens.push(l.recip()),
            RatioGroup::Dense => return Ok(RatioGroup::Dense),
        }
    }
    classify_group(&gens, false)
}

pub fn t_set(g: &RatioGroup) -> TSet {
    match g {
        RatioGroup::Trivial => TSet::AllReals,
        RatioGroup::Cyclic(l) => TSet::Lattice(l.clone()),
        RatioGroup::Dense => TSet::ZeroOnly,
    }
}

/// Type of a factor whose T-set is that of `g`.
pub fn type_label(g: &RatioGroup) -> FactorType {
    match g {
        RatioGroup::Trivial => FactorType::TypeII1,
        RatioGroup::Cyclic(l) => FactorType::TypeIII(l.clone()),
        RatioGroup::Dense => FactorType::TypeIII1,
    }
}

/// Exponent `n` with `x = base^n`, if any (`base > 1`, `x > 0`).
pub fn integer_log(x: &Rational, base: &Rational) -> Option<i64> {
    let vx = ExponentVector::of(x).ok()?;
    let vb = ExponentVector::of(base).ok()?;
    if vb.is_zero() {
        return None;
    }
    let p = vb.primes().next()?;
    let (c, b) = (vx.get(p), vb.get(p));
    if c % b != 0 {
        return None;
    }
    let k = c / b;
    let ok = vx.primes().eq(vb.primes()) || vx.is_zero();
    (ok && vb.entries().all(|(q, e)| vx.get(q) == k * e)).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{DiffuseSummand, GeometricBlock, MatrixBlock};
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn factors_small_and_large() {
        assert_eq!(factor(&BigInt::from(360)).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        let p1 = 4_294_967_291u64; // largest prime < 2^32
        let p2 = 65_537u64;
        let n = BigInt::from(p1) * BigInt::from(p2) * BigInt::from(12);
        assert_eq!(factor(&n).unwrap(), vec![(2, 2), (3, 1), (p2, 1), (p1, 1)]);
        let semi = BigInt::from(4_294_967_291u64) * BigInt::from(4_294_967_279u64);
        assert_eq!(factor(&semi).unwrap().len(), 2);
    }

    #[test]
    fn huge_prime_factor_is_rejected() {
        let p = BigInt::from(18_446_744_073_709_551_557u64); // prime < 2^64
        let n = &p * &p;
        assert!(matches!(factor(&n), Err(ModularError::UnsupportedMagnitude(_))));
    }

    #[test]
    fn miller_rabin() {
        let primes = [2u64, 3, 65_537, 1_000_000_007, 18_446_744_073_709_551_557];
        for p in primes {
            assert!(is_prime_u64(p), "{p}");
        }
        for c in [1u64, 4, 561, 1_000_000_007 * 3, 3_215_031_751] {
            assert!(!is_prime_u64(c), "{c}");
        }
    }

    #[test]
    fn ratio_generator_examples() {
        let m = AlgebraSpec::matrix("m", vec![rat(2, 3), rat(1, 3)]).unwrap();
        assert_eq!(ratio_generators(&m).ratios, vec![rat(2, 1)]);
        let t = AlgebraSpec::tracial_matrix("t", 3).unwrap();
        assert!(ratio_generators(&t).ratios.is_empty());
        let b = AlgebraSpec::matrix("b", vec![rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)]).unwrap();
        assert_eq!(ratio_generators(&b).ratios, vec![rat(2, 1), rat(4, 1)]);
    }

    #[test]
    fn ratio_generators_cover_geometric_and_diffuse() {
        let a = AlgebraSpec::new(
            "x",
            vec![MatrixBlock::new(vec![rat(1, 4)]).unwrap()],
            vec![GeometricBlock::new(rat(1, 4), rat(1, 3)).unwrap()],
            vec![
                DiffuseSummand {
                    weight: rat(1, 4),
                    modular: ModularDescriptor::Cyclic(rat(2, 5)),
                    hyperfinite: true,
                },
                DiffuseSummand {
                    weight: rat(1, 4),
                    modular: ModularDescriptor::Dense,
                    hyperfinite: false,
                },
            ],
        )
        .unwrap();
        let g = ratio_generators(&a);
        assert_eq!(g.ratios, vec![rat(5, 2), rat(3, 1)]);
        assert!(g.has_dense);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_group(&[rat(2, 1)], false).unwrap(),
            RatioGroup::Cyclic(rat(1, 2))
        );
        assert_eq!(
            classify_group(&[rat(4, 9), rat(8, 27)], false).unwrap(),
            RatioGroup::Cyclic(rat(2, 3))
        );
        assert_eq!(
            classify_group(&[rat(2, 1), rat(3, 1)], false).unwrap(),
            RatioGroup::Dense
        );
        assert_eq!(classify_group(&[], false).unwrap(), RatioGroup::Trivial);
        assert_eq!(classify_group(&[], true).unwrap(), RatioGroup::Dense);
        assert_eq!(classify_group(&[rat(1, 1)], false).unwrap(), RatioGroup::Trivial);
        // 4 and 8 generate 2^ℤ
        assert_eq!(
            classify_group(&[rat(4, 1), rat(8, 1)], false).unwrap(),
            RatioGroup::Cyclic(rat(1, 2))
        );
        assert_eq!(
            classify_group(&[rat(36, 1), rat(216, 1)], false).unwrap(),
            RatioGroup::Cyclic(rat(1, 6))
        );
    }

    #[test]
    fn t_set_and_type_examples() {
        assert_eq!(t_set(&RatioGroup::Trivial), TSet::AllReals);
        assert_eq!(t_set(&RatioGroup::Dense), TSet::ZeroOnly);
        let l = t_set(&RatioGroup::Cyclic(rat(1, 2)));
        assert_eq!(l, TSet::Lattice(rat(1, 2)));
        // (1/2)^{it} = 1 iff t ln 2 ∈ 2πℤ
        let period = 2.0 * PI / 2f64.ln();
        assert!((l.period().unwrap() - period).abs() < 1e-12);
        assert!(l.contains(3.0 * period, 1e-9));
        assert!(!l.contains(0.5 * period, 1e-9));
        assert_eq!(type_label(&RatioGroup::Trivial), FactorType::TypeII1);
        assert_eq!(
            type_label(&RatioGroup::Cyclic(rat(1, 2))),
            FactorType::TypeIII(rat(1, 2))
        );
        assert_eq!(type_label(&RatioGroup::Dense), FactorType::TypeIII1);
    }

    #[test]
    fn type_label_never_leaves_the_allowed_types() {
        for g in [
            RatioGroup::Trivial,
            RatioGroup::Cyclic(rat(1, 2)),
            RatioGroup::Cyclic(rat(99, 100)),
            RatioGroup::Dense,
        ] {
            match type_label(&g) {
                FactorType::TypeII1 | FactorType::TypeIII1 => {}
                FactorType::TypeIII(l) => assert!(l.is_positive() && l < Rational::one()),
            }
        }
    }

    #[test]
    fn combine_examples() {
        assert_eq!(
            combine(&[RatioGroup::Trivial, RatioGroup::Cyclic(rat(1, 2))]).unwrap(),
            RatioGroup::Cyclic(rat(1, 2))
        );
        assert_eq!(
            combine(&[RatioGroup::Cyclic(rat(1, 4)), RatioGroup::Cyclic(rat(1, 2))]).unwrap(),
            RatioGroup::Cyclic(rat(1, 2))
        );
        assert_eq!(
            combine(&[RatioGroup::Cyclic(rat(1, 2)), RatioGroup::Cyclic(rat(1, 3))]).unwrap(),
            RatioGroup::Dense
        );
        assert_eq!(
            combine(&[RatioGroup::Cyclic(rat(1, 4)), RatioGroup::Dense]).unwrap(),
            RatioGroup::Dense
        );
        assert_eq!(combine(&[]).unwrap(), RatioGroup::Trivial);
    }

    #[test]
    fn integer_log_examples() {
        assert_eq!(integer_log(&rat(8, 1), &rat(2, 1)), Some(3));
        assert_eq!(integer_log(&rat(1, 4), &rat(2, 1)), Some(-2));
        assert_eq!(integer_log(&rat(1, 1), &rat(2, 1)), Some(0));
        assert_eq!(integer_log(&rat(3, 1), &rat(2, 1)), None);
        assert_eq!(integer_log(&rat(8, 27), &rat(4, 9)), None);
    }

    /// Rank of integer vectors by exact elimination over ℚ (test oracle).
    fn rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        let cols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let f = &m[i][c] / &m[r][c];
                    let pivot = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot).take(cols) {
                        *x = &*x - &(&f * y);
                    }
                }
            }
            r += 1;
        }
        r
    }

    const PRIMES: [u64; 4] = [2, 3, 5, 7];

    fn small_ratio() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, 4)
    }

    fn ratio_from(e: &[i64]) -> Rational {
        let v = ExponentVector(
            PRIMES
                .iter()
                .zip(e)
                .filter(|(_, e)| **e != 0)
                .map(|(p, e)| (*p, *e))
                .collect(),
        );
        v.to_rational()
    }

    proptest! {
        #[test]
        fn cyclic_iff_dependent(a in small_ratio(), b in small_ratio()) {
            prop_assume!(a.iter().any(|&x| x != 0) && b.iter().any(|&x| x != 0));
            let (r, s) = (ratio_from(&a), ratio_from(&b));
            let g = classify_group(&[r, s], false).unwrap();
            let dependent = rank(&[a.clone(), b.clone()]) == 1;
            prop_assert_eq!(matches!(g, RatioGroup::Cyclic(_)), dependent);
        }

        #[test]
        fn order_and_duplication_invariant(vs in proptest::collection::vec(small_ratio(), 0..5)) {
            let gens: Vec<Rational> = vs.iter().map(|v| ratio_from(v)).collect();
            let base = classify_group(&gens, false).unwrap();
            let mut rev = gens.clone();
            rev.reverse();
            rev.extend(gens.iter().cloned());
            prop_assert_eq!(classify_group(&rev, false).unwrap(), base);
        }

        #[test]
        fn cyclic_generators_are_integer_powers(k in proptest::collection::vec(1i64..6, 1..4), base in small_ratio()) {
            prop_assume!(base.iter().any(|&x| x != 0));
            let b = ratio_from(&base);
            let gens: Vec<Rational> = k.iter().map(|&n| b.pow(n as i32)).collect();
            match classify_group(&gens, false).unwrap() {
                RatioGroup::Cyclic(l) => {
                    prop_assert!(l.is_positive() && l < Rational::one());
                    for g in &gens {
                        prop_assert!(integer_log(g, &l.recip()).is_some(), "{:?} not a power of {:?}", g, l);
                    }
                }
                other => prop_assert!(false, "expected cyclic, got {:?}", other),
            }
        }
    }
}
