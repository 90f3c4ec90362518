//! Arithmetic in `Z_n`: residues, unit multipliers, modular linear solving,
//! and invariant factors of finite abelian groups.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{k} is not a unit modulo {n}")]
    NotAUnit { k: u64, n: u64 },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("group has no identity element")]
    NoIdentity,
    #[error("element set is not closed under composition")]
    NotClosed,
}

/// An element of `Z_n`, always stored in normal form `0 <= value < modulus`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self, AlgebraError> {
        if modulus == 0 {
            return Err(AlgebraError::ZeroModulus);
        }
        Ok(Residue {
            value: value % modulus,
            modulus,
        })
    }

    /// Signed constructor; `-3 mod 12` is stored as `9`.
    pub fn from_signed(value: i64, modulus: u64) -> Result<Self, AlgebraError> {
        if modulus == 0 {
            return Err(AlgebraError::ZeroModulus);
        }
        Ok(Residue {
            value: reduce_signed(value, modulus),
            modulus,
        })
    }

    pub fn zero(modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Residue { value: 0, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn check(self, other: Residue) -> Result<(), AlgebraError> {
        if self.modulus != other.modulus {
            Err(AlgebraError::ModulusMismatch(self.modulus, other.modulus))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(self, other: Residue) -> Result<Residue, AlgebraError> {
        self.check(other)?;
        Ok(Residue {
            value: add_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn checked_sub(self, other: Residue) -> Result<Residue, AlgebraError> {
        self.check(other)?;
        Ok(Residue {
            value: sub_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn negated(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn scale(self, k: u64) -> Residue {
        Residue {
            value: mul_mod(self.value, k, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A unit `k` of `Z_n`, acting on `Z_n` by `x -> k*x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AutMultiplier {
    k: u64,
    modulus: u64,
}

impl AutMultiplier {
    pub fn new(k: u64, modulus: u64) -> Result<Self, AlgebraError> {
        if modulus == 0 {
            return Err(AlgebraError::ZeroModulus);
        }
        let k = k % modulus;
        if gcd(k, modulus) != 1 {
            return Err(AlgebraError::NotAUnit { k, n: modulus });
        }
        Ok(AutMultiplier { k, modulus })
    }

    pub fn from_signed(k: i64, modulus: u64) -> Result<Self, AlgebraError> {
        if modulus == 0 {
            return Err(AlgebraError::ZeroModulus);
        }
        Self::new(reduce_signed(k, modulus), modulus)
    }

    pub fn identity(modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        AutMultiplier {
            k: 1 % modulus,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.k
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_identity(self) -> bool {
        self.k == 1 % self.modulus
    }

    pub fn apply(self, x: Residue) -> Result<Residue, AlgebraError> {
        if x.modulus != self.modulus {
            return Err(AlgebraError::ModulusMismatch(self.modulus, x.modulus));
        }
        Ok(x.scale(self.k))
    }

    pub fn apply_raw(self, x: u64) -> u64 {
        mul_mod(self.k, x, self.modulus)
    }

    pub fn then(self, other: AutMultiplier) -> AutMultiplier {
        AutMultiplier {
            k: mul_mod(self.k, other.k, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(self) -> AutMultiplier {
        let inv = inverse_mod(self.k, self.modulus).expect("multiplier is a unit by construction");
        AutMultiplier {
            k: inv,
            modulus: self.modulus,
        }
    }
}

impl fmt::Debug for AutMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{} (mod {})", self.k, self.modulus)
    }
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of a finite abelian group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InvariantFactors(pub Vec<u64>);

impl InvariantFactors {
    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn is_cyclic(&self) -> bool {
        self.0.len() <= 1
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    let (a, b) = (a % n, b % n);
    if a >= b {
        a - b
    } else {
        n - (b - a)
    }
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn reduce_signed(value: i64, n: u64) -> u64 {
    (value as i128).rem_euclid(n as i128) as u64
}

/// Extended Euclid on signed integers: returns `(g, s, t)` with `a*s + b*t = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

pub fn inverse_mod(k: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd((k % n) as i128, n as i128);
    if g != 1 {
        None
    } else {
        Some(s.rem_euclid(n as i128) as u64)
    }
}

/// All units of `Z_n`. For `n = 1` this is the single trivial multiplier.
pub fn unit_group(n: u64) -> Vec<AutMultiplier> {
    assert!(n >= 1, "modulus must be positive");
    if n == 1 {
        return vec![AutMultiplier::identity(1)];
    }
    (1..n)
        .filter(|&k| gcd(k, n) == 1)
        .map(|k| AutMultiplier { k, modulus: n })
        .collect()
}

/// All solutions of `coefficient * x = rhs (mod n)`, ascending. Empty when unsolvable.
pub fn solve_mod_linear(coefficient: i64, rhs: Residue) -> Vec<Residue> {
    let n = rhs.modulus;
    let a = reduce_signed(coefficient, n);
    let g = gcd(a, n);
    if !rhs.value.is_multiple_of(g) {
        return Vec::new();
    }
    let step = n / g;
    let reduced_inv = inverse_mod(a / g % step, step).expect("coprime after dividing by gcd");
    let x0 = mul_mod(rhs.value / g, reduced_inv, step);
    (0..g)
        .map(|t| Residue {
            value: x0 + t * step,
            modulus: n,
        })
        .collect()
}

/// Prime-power factorisation by trial division.
pub fn prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Finds one solution of `A x = b (mod n)`, or `None` when the system is inconsistent.
///
/// Works prime power by prime power: over `Z_{p^e}` full pivoting on the minimal
/// `p`-valuation diagonalises the matrix, and the local solutions are glued
/// with the Chinese remainder theorem.
pub fn solve_linear_system(a: &[Vec<u64>], b: &[u64], n: u64) -> Option<Vec<u64>> {
    assert!(n >= 1, "modulus must be positive");
    assert_eq!(a.len(), b.len(), "row count must match right-hand side");
    let cols = a.first().map_or(0, Vec::len);
    if n == 1 {
        return Some(vec![0; cols]);
    }
    let mut solution = vec![0u64; cols];
    let mut modulus_so_far = 1u64;
    for (p, e) in prime_powers(n) {
        let q = p.pow(e);
        let local = solve_prime_power(a, b, p, q, cols)?;
        for (x, l) in solution.iter_mut().zip(local) {
            *x = crt_pair(*x, modulus_so_far, l, q);
        }
        modulus_so_far *= q;
    }
    Some(solution)
}

fn crt_pair(a: u64, m: u64, b: u64, q: u64) -> u64 {
    // x = a + m*t, with a + m*t = b (mod q)
    let inv = inverse_mod(m % q, q).expect("coprime moduli");
    let t = mul_mod(sub_mod(b, a % q, q), inv, q);
    a + m * t
}

fn solve_prime_power(a: &[Vec<u64>], b: &[u64], p: u64, q: u64, cols: usize) -> Option<Vec<u64>> {
    let rows = a.len();
    let mut mat: Vec<Vec<u64>> = a
        .iter()
        .map(|r| r.iter().map(|&v| v % q).collect())
        .collect();
    let mut rhs: Vec<u64> = b.iter().map(|&v| v % q).collect();
    // x = basis * y
    let mut basis: Vec<Vec<u64>> = (0..cols)
        .map(|i| (0..cols).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut pivots = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in mat.iter().enumerate().skip(k) {
            for (j, &v) in row.iter().enumerate().skip(k) {
                if v != 0 {
                    let val = valuation(v, p);
                    if best.is_none_or(|(bv, _, _)| val < bv) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        mat.swap(k, pi);
        rhs.swap(k, pi);
        for row in mat.iter_mut() {
            row.swap(k, pj);
        }
        for row in basis.iter_mut() {
            row.swap(k, pj);
        }
        let pv = p.pow(v);
        let unit = mat[k][k] / pv;
        let unit_inv = inverse_mod(unit % q, q).expect("cofactor of minimal valuation is a unit");
        for x in mat[k].iter_mut() {
            *x = mul_mod(*x, unit_inv, q);
        }
        rhs[k] = mul_mod(rhs[k], unit_inv, q);

        for i in (k + 1)..rows {
            let f = mat[i][k] / pv;
            if f == 0 {
                continue;
            }
            let (upper, lower) = mat.split_at_mut(i);
            for (x, &p) in lower[0][k..cols].iter_mut().zip(&upper[k][k..cols]) {
                *x = sub_mod(*x, mul_mod(f, p, q), q);
            }
            rhs[i] = sub_mod(rhs[i], mul_mod(f, rhs[k], q), q);
        }
        for j in (k + 1)..cols {
            let f = mat[k][j] / pv;
            if f == 0 {
                continue;
            }
            for row in mat.iter_mut() {
                let sub = mul_mod(f, row[k], q);
                row[j] = sub_mod(row[j], sub, q);
            }
            for row in basis.iter_mut() {
                let sub = mul_mod(f, row[k], q);
                row[j] = sub_mod(row[j], sub, q);
            }
        }
        pivots.push(pv);
    }

    let mut y = vec![0u64; cols];
    for (k, &pv) in pivots.iter().enumerate() {
        if !rhs[k].is_multiple_of(pv) {
            return None;
        }
        y[k] = rhs[k] / pv;
    }
    if rhs.iter().skip(pivots.len()).any(|&r| r != 0) {
        return None;
    }
    let x = (0..cols)
        .map(|i| (0..cols).fold(0, |acc, j| add_mod(acc, mul_mod(basis[i][j], y[j], q), q)))
        .collect();
    Some(x)
}

/// Invariant factors of an abelian group from its element-order histogram.
///
/// For each prime `p`, the number of elements killed by `p^k` is
/// `prod_i p^min(k, e_i)`, so successive ratios count the cyclic `p`-parts
/// of exponent at least `k`.
pub fn invariant_factors_from_orders(histogram: &BTreeMap<u64, usize>) -> InvariantFactors {
    let order: usize = histogram.values().sum();
    let mut primes: Vec<u64> = Vec::new();
    for &o in histogram.keys() {
        for (p, _) in prime_powers(o) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();

    // exponent lists per prime, sorted descending
    let mut parts: Vec<Vec<u64>> = Vec::new();
    for &p in &primes {
        let killed = |k: u32| -> usize {
            let pk = p.pow(k);
            histogram
                .iter()
                .filter(|(&o, _)| pk % o == 0)
                .map(|(_, &c)| c)
                .sum()
        };
        let mut at_least = Vec::new(); // at_least[k-1] = #{i : e_i >= k}
        let mut prev = killed(0);
        let mut k = 1;
        loop {
            let cur = killed(k);
            if cur == prev {
                break;
            }
            let mut ratio = cur / prev;
            let mut count = 0;
            while ratio > 1 {
                ratio /= p as usize;
                count += 1;
            }
            at_least.push(count);
            prev = cur;
            k += 1;
        }
        let r = at_least.first().copied().unwrap_or(0);
        // e_i for i in 0..r, descending
        let exps: Vec<u64> = (0..r)
            .map(|i| {
                let e = at_least.iter().filter(|&&c| c > i).count() as u32;
                p.pow(e)
            })
            .collect();
        parts.push(exps);
    }
    let r = parts.iter().map(Vec::len).max().unwrap_or(0);
    // largest factor takes the largest prime powers
    let mut factors: Vec<u64> = (0..r)
        .map(|i| {
            parts
                .iter()
                .map(|ps| ps.get(i).copied().unwrap_or(1))
                .product()
        })
        .collect();
    factors.reverse();
    debug_assert_eq!(factors.iter().product::<u64>() as usize, order.max(1));
    InvariantFactors(factors)
}

/// Invariant factors of a finite abelian group given by its elements and composition.
///
/// A generating set is peeled off greedily: each new generator must commute
/// with the previous ones (otherwise the group is reported as non-abelian) and
/// the current subgroup is extended by its powers until it covers the group.
pub fn invariant_factors<T, F>(elements: &[T], op: F) -> Result<InvariantFactors, AlgebraError>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    if elements.is_empty() {
        return Err(AlgebraError::NoIdentity);
    }
    let identity = elements
        .iter()
        .find(|e| op(e, e) == **e)
        .cloned()
        .ok_or(AlgebraError::NoIdentity)?;

    let mut gens: Vec<T> = Vec::new();
    let mut subgroup: HashMap<T, ()> = HashMap::from([(identity.clone(), ())]);
    let mut members = vec![identity.clone()];
    for g in elements {
        if subgroup.contains_key(g) {
            continue;
        }
        if gens.iter().any(|h| op(g, h) != op(h, g)) {
            return Err(AlgebraError::NotAbelian);
        }
        gens.push(g.clone());
        let mut power = g.clone();
        let mut new_members = Vec::new();
        while !subgroup.contains_key(&power) {
            for s in &members {
                new_members.push(op(s, &power));
            }
            power = op(&power, g);
        }
        for m in new_members {
            if subgroup.insert(m.clone(), ()).is_none() {
                members.push(m);
            }
        }
    }
    if members.len() != elements.len() {
        return Err(AlgebraError::NotClosed);
    }

    let mut histogram = BTreeMap::new();
    for g in elements {
        let mut order = 1u64;
        let mut power = g.clone();
        while power != identity {
            power = op(&power, g);
            order += 1;
        }
        *histogram.entry(order).or_insert(0usize) += 1;
    }
    Ok(invariant_factors_from_orders(&histogram))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn totient_by_counting(n: u64) -> usize {
        if n == 1 {
            return 1;
        }
        (1..n).filter(|&k| gcd(k, n) == 1).count()
    }

    fn values(v: &[Residue]) -> Vec<u64> {
        v.iter().map(|r| r.value()).collect()
    }

    #[test]
    fn residues_normalise_negative_notation() {
        let r = Residue::from_signed(-3, 12).unwrap();
        assert_eq!(r.value(), 9);
        assert_eq!(Residue::new(25, 12).unwrap().value(), 1);
        assert!(Residue::new(1, 0).is_err());
    }

    #[test]
    fn mismatched_moduli_are_rejected() {
        let a = Residue::new(1, 12).unwrap();
        let b = Residue::new(1, 7).unwrap();
        assert_eq!(a.checked_add(b), Err(AlgebraError::ModulusMismatch(12, 7)));
    }

    #[test]
    fn unit_group_examples() {
        let u12: Vec<u64> = unit_group(12).iter().map(|k| k.value()).collect();
        assert_eq!(u12, vec![1, 5, 7, 11]);
        for k in unit_group(12) {
            assert!(k.then(k).is_identity());
        }
        let u2: Vec<u64> = unit_group(2).iter().map(|k| k.value()).collect();
        assert_eq!(u2, vec![1]);
        let u9: Vec<u64> = unit_group(9).iter().map(|k| k.value()).collect();
        assert_eq!(u9, vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(unit_group(1).len(), 1);
    }

    #[test]
    fn unit_group_size_is_totient_and_multipliers_are_bijections() {
        for n in 1..=64 {
            let units = unit_group(n);
            assert_eq!(units.len(), totient_by_counting(n), "n = {n}");
            for k in units {
                let mut seen = vec![false; n as usize];
                for x in 0..n {
                    seen[k.apply_raw(x) as usize] = true;
                }
                assert!(
                    seen.iter().all(|&s| s),
                    "x{} not a bijection mod {n}",
                    k.value()
                );
            }
        }
    }

    #[test]
    fn non_units_are_rejected() {
        assert_eq!(
            AutMultiplier::new(4, 12),
            Err(AlgebraError::NotAUnit { k: 4, n: 12 })
        );
        assert_eq!(AutMultiplier::from_signed(-1, 12).unwrap().value(), 11);
    }

    #[test]
    fn solve_mod_linear_examples() {
        assert_eq!(
            values(&solve_mod_linear(5, Residue::new(2, 12).unwrap())),
            vec![10]
        );
        assert_eq!(
            values(&solve_mod_linear(1, Residue::new(7, 12).unwrap())),
            vec![7]
        );
        assert!(solve_mod_linear(2, Residue::new(1, 12).unwrap()).is_empty());
        assert_eq!(
            values(&solve_mod_linear(4, Residue::new(8, 12).unwrap())),
            vec![2, 5, 8, 11]
        );
    }

    #[test]
    fn solve_mod_linear_matches_exhaustion() {
        for n in 1..=30u64 {
            for k in -3..(n as i64 + 3) {
                for r in 0..n {
                    let got = values(&solve_mod_linear(k, Residue::new(r, n).unwrap()));
                    let want: Vec<u64> = (0..n)
                        .filter(|&x| mul_mod(reduce_signed(k, n), x, n) == r)
                        .collect();
                    assert_eq!(got, want, "{k} x = {r} mod {n}");
                }
            }
        }
    }

    #[test]
    fn linear_system_detects_inconsistency() {
        // 2x = 1 mod 12
        assert!(solve_linear_system(&[vec![2]], &[1], 12).is_none());
        // x + y = 1, x + y = 2
        assert!(solve_linear_system(&[vec![1, 1], vec![1, 1]], &[1, 2], 12).is_none());
        // 2x + y = 0 with hidden constraint 2y = 0 after doubling: both solvable
        let x = solve_linear_system(&[vec![2, 1]], &[3], 4).unwrap();
        assert_eq!((2 * x[0] + x[1]) % 4, 3);
    }

    #[test]
    fn linear_system_matches_brute_force_on_small_systems() {
        let n = 6;
        let mut seed = 7u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 33) % n
        };
        for _ in 0..300 {
            let a: Vec<Vec<u64>> = (0..3).map(|_| (0..2).map(|_| next()).collect()).collect();
            let b: Vec<u64> = (0..3).map(|_| next()).collect();
            let brute = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .find(|&(x, y)| {
                    a.iter()
                        .zip(&b)
                        .all(|(row, &r)| (row[0] * x + row[1] * y) % n == r)
                });
            let got = solve_linear_system(&a, &b, n);
            assert_eq!(got.is_some(), brute.is_some(), "a = {a:?}, b = {b:?}");
            if let Some(x) = got {
                for (row, &r) in a.iter().zip(&b) {
                    assert_eq!((row[0] * x[0] + row[1] * x[1]) % n, r);
                }
            }
        }
    }

    #[test]
    fn invariant_factors_of_cyclic_and_trivial_groups() {
        let z36: Vec<u64> = (0..36).collect();
        assert_eq!(
            invariant_factors(&z36, |a, b| (a + b) % 36).unwrap(),
            InvariantFactors(vec![36])
        );
        assert_eq!(
            invariant_factors(&[0u64], |_, _| 0).unwrap(),
            InvariantFactors(vec![])
        );
    }

    #[test]
    fn invariant_factors_of_unit_group_mod_12() {
        let units: Vec<u64> = unit_group(12).iter().map(|k| k.value()).collect();
        let f = invariant_factors(&units, |a, b| a * b % 12).unwrap();
        assert_eq!(f, InvariantFactors(vec![2, 2]));
    }

    #[test]
    fn invariant_factors_of_products() {
        let elems: Vec<(u64, u64)> = (0..12).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        let f = invariant_factors(&elems, |x, y| ((x.0 + y.0) % 12, (x.1 + y.1) % 3)).unwrap();
        assert_eq!(f, InvariantFactors(vec![3, 12]));
        let elems: Vec<(u64, u64, u64)> = (0..4)
            .flat_map(|a| (0..6).flat_map(move |b| (0..2).map(move |c| (a, b, c))))
            .collect();
        let f = invariant_factors(&elems, |x, y| {
            ((x.0 + y.0) % 4, (x.1 + y.1) % 6, (x.2 + y.2) % 2)
        })
        .unwrap();
        assert_eq!(f, InvariantFactors(vec![2, 2, 12]));
    }

    #[test]
    fn non_abelian_input_is_detected() {
        // S3 as permutations of three points
        let s3: Vec<[u8; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let op = |a: &[u8; 3], b: &[u8; 3]| [a[b[0] as usize], a[b[1] as usize], a[b[2] as usize]];
        assert_eq!(invariant_factors(&s3, op), Err(AlgebraError::NotAbelian));
    }

    fn element_orders_of_product(factors: &[u64]) -> BTreeMap<u64, usize> {
        let mut hist = BTreeMap::new();
        let total: u64 = factors.iter().product();
        for mut idx in 0..total {
            let mut order = 1;
            for &d in factors {
                let x = idx % d;
                idx /= d;
                order = lcm(order, d / gcd(x, d));
            }
            *hist.entry(order).or_insert(0) += 1;
        }
        hist
    }

    #[test]
    fn invariant_factors_reproduce_element_order_statistics() {
        // every abelian group Z_a x Z_b x Z_c of order <= 2000 with small factors
        let sizes = [1u64, 2, 3, 4, 5, 6, 8, 9, 10, 12];
        for &a in &sizes {
            for &b in &sizes {
                for &c in &sizes {
                    if a * b * c > 2000 {
                        continue;
                    }
                    let hist = element_orders_of_product(&[a, b, c]);
                    let inv = invariant_factors_from_orders(&hist);
                    assert!(inv.0.windows(2).all(|w| w[1] % w[0] == 0), "{inv}");
                    assert!(inv.0.iter().all(|&d| d > 1));
                    assert_eq!(inv.order(), a * b * c);
                    assert_eq!(element_orders_of_product(&inv.0), hist, "{a} {b} {c}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn unit_coefficients_have_exactly_one_solution(n in 1u64..200, k in 0u64..200, r in 0u64..200) {
            let n = n.max(1);
            prop_assume!(gcd(k % n, n) == 1);
            let sols = solve_mod_linear(k as i64, Residue::new(r, n).unwrap());
            prop_assert_eq!(sols.len(), 1);
            prop_assert_eq!(mul_mod(k, sols[0].value(), n), r % n);
        }

        #[test]
        fn consistent_systems_are_solved(
            n in 2u64..40,
            entries in proptest::collection::vec(0u64..1000, 12),
            x in proptest::collection::vec(0u64..1000, 4),
        ) {
            let a: Vec<Vec<u64>> = entries.chunks(4).map(|r| r.iter().map(|v| v % n).collect()).collect();
            let b: Vec<u64> = a.iter().map(|row| row.iter().zip(&x).fold(0, |s, (c, v)| (s + c * (v % n)) % n)).collect();
            let sol = solve_linear_system(&a, &b, n).expect("constructed consistent");
            for (row, &r) in a.iter().zip(&b) {
                let lhs = row.iter().zip(&sol).fold(0, |s, (c, v)| (s + c * v) % n);
                prop_assert_eq!(lhs, r);
            }
        }
    }
}
