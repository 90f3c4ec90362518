//! Isomorphism classes of group extensions `1 -> Z_n -> G -> Z_m -> 1`.
//!
//! Each candidate is a homomorphism `Z_m -> Aut(Z_n)` (a unit `u` with
//! `u^m = 1`) together with a normalized 2-cocycle `Z_m x Z_m -> Z_n`. The
//! total group lives on `Z_n x Z_m` with
//! `(z2, a) (z1, b) = (z2 + u^a z1 + zeta(a, b), a + b)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::modular::{
    add_mod, gcd, invariant_factors_from_orders, mul_mod, unit_group, InvariantFactors,
};

/// Largest total group order the enumerator accepts.
pub const MAX_ORDER: u64 = 4096;

/// Per action, the number of normalized cochains scanned exhaustively before
/// switching to carry-cocycle representatives.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("n * m = {0} exceeds the desk-scale bound {MAX_ORDER}")]
    DeskScaleExceeded(u64),
    #[error("n and m must be positive")]
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionFilter {
    All,
    TrivialOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Every normalized cochain is tested against the cocycle identity.
    Exhaustive,
    /// Only `zeta(a, b) = c * [a + b >= m]`, one per cohomology class.
    CarryRepresentatives,
}

/// The total group of one candidate extension, as a dense multiplication rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExtensionGroup {
    pub n: u64,
    pub m: u64,
    pub multiplier: u64,
    /// `cocycle[a][b] = zeta(a, b)`
    pub cocycle: Vec<Vec<u64>>,
    #[serde(skip)]
    powers: Vec<u64>,
}

impl ExtensionGroup {
    pub fn new(n: u64, m: u64, multiplier: u64, cocycle: Vec<Vec<u64>>) -> Self {
        let mut powers = Vec::with_capacity(m as usize);
        let mut p = 1 % n;
        for _ in 0..m {
            powers.push(p);
            p = mul_mod(p, multiplier, n);
        }
        ExtensionGroup {
            n,
            m,
            multiplier,
            cocycle,
            powers,
        }
    }

    pub fn order(&self) -> usize {
        (self.n * self.m) as usize
    }

    /// Element `(z, a)` is encoded as `a * n + z`.
    pub fn decode(&self, x: usize) -> (u64, u64) {
        (x as u64 % self.n, x as u64 / self.n)
    }

    pub fn encode(&self, z: u64, a: u64) -> usize {
        (a * self.n + z) as usize
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        let (z2, a) = self.decode(x);
        let (z1, b) = self.decode(y);
        let z = add_mod(
            add_mod(z2, mul_mod(self.powers[a as usize], z1, self.n), self.n),
            self.cocycle[a as usize][b as usize],
            self.n,
        );
        self.encode(z, (a + b) % self.m)
    }

    pub fn identity(&self) -> usize {
        0
    }

    fn pow(&self, x: usize, mut k: u64) -> usize {
        let mut acc = self.identity();
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let (_, a) = self.decode(x);
        let image_order = self.m / gcd(a, self.m);
        let (w, _) = self.decode(self.pow(x, image_order));
        image_order * (self.n / gcd(w, self.n))
    }

    pub fn is_cocycle(&self) -> bool {
        let (n, m) = (self.n, self.m as usize);
        let z = &self.cocycle;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let lhs = add_mod(mul_mod(self.powers[a], z[b][c], n), z[a][(b + c) % m], n);
                    let rhs = add_mod(z[a][b], z[(a + b) % m][c], n);
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(1, 0)` and `(0, 1)` generate; the group is abelian iff they commute.
    pub fn is_abelian(&self) -> bool {
        if self.m == 1 {
            return true;
        }
        let x = self.encode(1 % self.n, 0);
        let y = self.encode(0, 1);
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn element_orders(&self) -> BTreeMap<u64, usize> {
        let mut hist = BTreeMap::new();
        for x in 0..self.order() {
            *hist.entry(self.element_order(x)).or_insert(0) += 1;
        }
        hist
    }

    pub fn classify(&self) -> ClassKey {
        let element_orders = self.element_orders();
        let abelian = self.is_abelian();
        let invariant_factors = abelian.then(|| invariant_factors_from_orders(&element_orders));
        ClassKey {
            order: self.order() as u64,
            abelian,
            invariant_factors,
            element_orders,
        }
    }

    fn center_order(&self) -> usize {
        let e = self.encode(1 % self.n, 0);
        let s = self.encode(0, 1 % self.m);
        (0..self.order())
            .filter(|&x| self.mul(x, e) == self.mul(e, x) && self.mul(x, s) == self.mul(s, x))
            .count()
    }

    fn square_count(&self) -> usize {
        let mut seen = vec![false; self.order()];
        (0..self.order()).for_each(|x| seen[self.mul(x, x)] = true);
        seen.into_iter().filter(|&b| b).count()
    }

    /// The fiber generator `e = (1, 0)` and the lift `s = (0, 1)` present the
    /// group as `<e, s | e^n, s e = e^u s, s^m = e^t>`, so an isomorphism onto
    /// `other` exists iff some `x, y` there satisfy the same relations and
    /// generate it.
    pub fn is_isomorphic(&self, other: &ExtensionGroup) -> bool {
        if self.order() != other.order() {
            return false;
        }
        if self == other {
            return true;
        }
        let e = self.encode(1 % self.n, 0);
        let s = self.encode(0, 1 % self.m);
        let (t, _) = self.decode(self.pow(s, self.m));
        let u = self.multiplier;
        let order_e = self.element_order(e);
        let order_s = self.element_order(s);
        // y normalizes <x>, so <x, y> = <x><y>, which is everything iff
        // y^(m/p) falls outside <x> for every prime p dividing m
        let cofactors: Vec<u64> = prime_divisors(self.m)
            .into_iter()
            .map(|p| self.m / p)
            .collect();
        let orders: Vec<u64> = (0..other.order()).map(|x| other.element_order(x)).collect();
        let ys: Vec<usize> = (0..other.order())
            .filter(|&y| orders[y] == order_s)
            .collect();
        let mut in_x = vec![false; other.order()];
        for x in (0..other.order()).filter(|&x| orders[x] == order_e) {
            let mut power = other.identity();
            let mut cyclic = Vec::with_capacity(order_e as usize);
            for _ in 0..order_e {
                in_x[power] = true;
                cyclic.push(power);
                power = other.mul(power, x);
            }
            let x_u = cyclic[(u % order_e) as usize];
            let x_t = cyclic[(t % order_e) as usize];
            let found = ys.iter().any(|&y| {
                other.mul(y, x) == other.mul(x_u, y)
                    && other.pow(y, self.m) == x_t
                    && cofactors.iter().all(|&j| !in_x[other.pow(y, j)])
            });
            for c in cyclic {
                in_x[c] = false;
            }
            if found {
                return true;
            }
        }
        false
    }
}

fn prime_divisors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Isomorphism invariant used to separate classes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassKey {
    pub order: u64,
    pub abelian: bool,
    pub invariant_factors: Option<InvariantFactors>,
    pub element_orders: BTreeMap<u64, usize>,
}

impl ClassKey {
    pub fn involutions(&self) -> usize {
        self.element_orders.get(&2).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionClass {
    #[serde(flatten)]
    pub key: ClassKey,
    /// Distinguishes non-isomorphic classes that share the same key.
    pub variant: usize,
    pub witness: ExtensionGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub n: u64,
    pub m: u64,
    pub filter: ActionFilter,
    pub actions: Vec<u64>,
    pub scan: ScanMode,
    pub candidates: u64,
    pub cocycles: u64,
    pub classes: Vec<ExtensionClass>,
}

pub fn enumerate_group_extensions(n: u64, m: u64) -> Result<Enumeration, EnumerationError> {
    enumerate_group_extensions_with(n, m, ActionFilter::All)
}

pub fn enumerate_group_extensions_with(
    n: u64,
    m: u64,
    filter: ActionFilter,
) -> Result<Enumeration, EnumerationError> {
    let free = (m.saturating_sub(1)).pow(2);
    let exhaustive = (n as u128)
        .checked_pow(free as u32)
        .is_some_and(|c| c <= EXHAUSTIVE_LIMIT as u128);
    let mode = if exhaustive {
        ScanMode::Exhaustive
    } else {
        ScanMode::CarryRepresentatives
    };
    enumerate_with_mode(n, m, filter, mode)
}

/// Homomorphisms `Z_m -> Aut(Z_n)`, given by the image of the generator.
pub fn actions(n: u64, m: u64) -> Vec<u64> {
    unit_group(n)
        .into_iter()
        .map(|k| k.value())
        .filter(|&u| {
            let mut p = 1 % n;
            for _ in 0..m {
                p = mul_mod(p, u, n);
            }
            p == 1 % n
        })
        .collect()
}

pub fn enumerate_with_mode(
    n: u64,
    m: u64,
    filter: ActionFilter,
    mode: ScanMode,
) -> Result<Enumeration, EnumerationError> {
    if n == 0 || m == 0 {
        return Err(EnumerationError::Degenerate);
    }
    if n * m > MAX_ORDER {
        return Err(EnumerationError::DeskScaleExceeded(n * m));
    }
    let actions: Vec<u64> = actions(n, m)
        .into_iter()
        .filter(|&u| filter == ActionFilter::All || u == 1 % n)
        .collect();

    let mut buckets: BTreeMap<ClassKey, Vec<ExtensionGroup>> = BTreeMap::new();
    let mut candidates = 0u64;
    let mut cocycles = 0u64;
    for &u in &actions {
        let found: Vec<(ClassKey, ExtensionGroup)> = match mode {
            ScanMode::Exhaustive => {
                let free = ((m - 1) * (m - 1)) as u32;
                let total = n.pow(free);
                candidates += total;
                (0..total)
                    .into_par_iter()
                    .filter_map(|index| {
                        let g = ExtensionGroup::new(n, m, u, decode_cochain(index, n, m));
                        g.is_cocycle().then_some(g)
                    })
                    .map(|g| (g.classify(), g))
                    .collect()
            }
            ScanMode::CarryRepresentatives => {
                let reps = carry_constants(n, m, u);
                candidates += reps.len() as u64;
                reps.into_par_iter()
                    .map(|c| ExtensionGroup::new(n, m, u, carry_cocycle(n, m, c)))
                    .map(|g| (g.classify(), g))
                    .collect()
            }
        };
        cocycles += found.len() as u64;
        for (key, g) in found {
            buckets.entry(key).or_default().push(g);
        }
    }

    let classes: Vec<ExtensionClass> = buckets
        .into_par_iter()
        .flat_map_iter(|(key, mut members)| {
            members.sort();
            let witnesses = if key.abelian {
                vec![members.swap_remove(0)]
            } else {
                split_by_isomorphism(members)
            };
            witnesses
                .into_iter()
                .enumerate()
                .map(move |(variant, witness)| ExtensionClass {
                    key: key.clone(),
                    variant,
                    witness,
                })
        })
        .collect();

    Ok(Enumeration {
        n,
        m,
        filter,
        actions,
        scan: mode,
        candidates,
        cocycles,
        classes,
    })
}

/// Keeps the first member of each isomorphism class, in input order.
fn split_by_isomorphism(members: Vec<ExtensionGroup>) -> Vec<ExtensionGroup> {
    let mut witnesses: Vec<((usize, usize), ExtensionGroup)> = Vec::new();
    for g in members {
        let invariant = (g.center_order(), g.square_count());
        if !witnesses
            .iter()
            .any(|(i, w)| *i == invariant && w.is_isomorphic(&g))
        {
            witnesses.push((invariant, g));
        }
    }
    witnesses.into_iter().map(|(_, g)| g).collect()
}

/// Cochain number `index` in base `n`, filling `zeta(a, b)` for `a, b >= 1` row by row.
fn decode_cochain(mut index: u64, n: u64, m: u64) -> Vec<Vec<u64>> {
    let m = m as usize;
    let mut z = vec![vec![0u64; m]; m];
    for row in z.iter_mut().skip(1) {
        for v in row.iter_mut().skip(1) {
            *v = index % n;
            index /= n;
        }
    }
    z
}

/// Constants `c` whose carry cochain is a cocycle (exactly when `u c = c`),
/// one per cohomology class: two of them are cohomologous iff they differ by
/// a multiple of `gcd(1 + u + ... + u^(m-1), n)`.
fn carry_constants(n: u64, m: u64, u: u64) -> Vec<u64> {
    let mut norm = 0;
    let mut p = 1 % n;
    for _ in 0..m {
        norm = add_mod(norm, p, n);
        p = mul_mod(p, u, n);
    }
    let g = gcd(norm, n);
    (0..g).filter(|&c| mul_mod(c, u, n) == c % n).collect()
}

fn carry_cocycle(n: u64, m: u64, c: u64) -> Vec<Vec<u64>> {
    (0..m)
        .map(|a| (0..m).map(|b| if a + b >= m { c % n } else { 0 }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z12_by_z3_has_two_abelian_classes() {
        let e = enumerate_group_extensions(12, 3).unwrap();
        assert_eq!(e.scan, ScanMode::Exhaustive);
        assert_eq!(e.actions, vec![1]);
        let factors: Vec<Vec<u64>> = e
            .classes
            .iter()
            .map(|c| c.key.invariant_factors.clone().unwrap().0)
            .collect();
        assert_eq!(factors.len(), 2);
        assert!(factors.contains(&vec![36]));
        assert!(factors.contains(&vec![3, 12]));
        assert_eq!(e.cocycles, 144);
    }

    #[test]
    fn z12_by_z2_contains_the_dihedral_group() {
        let e = enumerate_group_extensions(12, 2).unwrap();
        assert!(e
            .classes
            .iter()
            .any(|c| c.key.order == 24 && !c.key.abelian && c.key.involutions() == 13));
    }

    #[test]
    fn trivial_base_gives_the_quotient() {
        for m in 1..=7 {
            let e = enumerate_group_extensions(1, m).unwrap();
            assert_eq!(e.classes.len(), 1);
            let key = &e.classes[0].key;
            let expected = if m == 1 { vec![] } else { vec![m] };
            assert_eq!(key.invariant_factors.as_ref().unwrap().0, expected);
        }
    }

    #[test]
    fn direct_product_class_is_always_present() {
        for (n, m) in [(12, 3), (12, 2), (4, 4), (6, 3), (5, 2), (8, 2), (9, 3)] {
            let e = enumerate_group_extensions(n, m).unwrap();
            let direct =
                ExtensionGroup::new(n, m, 1 % n, vec![vec![0; m as usize]; m as usize]).classify();
            assert!(e.classes.iter().any(|c| c.key == direct), "({n}, {m})");
        }
    }

    #[test]
    fn desk_scale_is_enforced() {
        assert_eq!(
            enumerate_group_extensions(100, 50).unwrap_err(),
            EnumerationError::DeskScaleExceeded(5000)
        );
        assert_eq!(
            enumerate_group_extensions(0, 3).unwrap_err(),
            EnumerationError::Degenerate
        );
    }

    #[test]
    fn large_quotients_fall_back_to_carry_representatives() {
        let e = enumerate_group_extensions(2, 64).unwrap();
        assert_eq!(e.scan, ScanMode::CarryRepresentatives);
        let f: Vec<Vec<u64>> = e
            .classes
            .iter()
            .map(|c| c.key.invariant_factors.clone().unwrap().0)
            .collect();
        assert_eq!(f, vec![vec![2, 64], vec![128]]);
    }

    #[test]
    fn carry_representatives_agree_with_exhaustive_scans() {
        for (n, m) in [
            (12, 3),
            (12, 2),
            (4, 4),
            (6, 3),
            (8, 2),
            (9, 3),
            (2, 4),
            (3, 4),
            (7, 3),
            (16, 2),
        ] {
            let full = enumerate_with_mode(n, m, ActionFilter::All, ScanMode::Exhaustive).unwrap();
            let reps = enumerate_with_mode(n, m, ActionFilter::All, ScanMode::CarryRepresentatives)
                .unwrap();
            let a: Vec<(&ClassKey, usize)> =
                full.classes.iter().map(|c| (&c.key, c.variant)).collect();
            let b: Vec<(&ClassKey, usize)> =
                reps.classes.iter().map(|c| (&c.key, c.variant)).collect();
            assert_eq!(a, b, "({n}, {m})");
        }
    }

    #[test]
    fn carry_constants_give_cocycles_one_per_class() {
        for (n, m) in [(12, 2), (12, 3), (8, 4), (9, 3), (16, 2), (5, 4)] {
            for u in actions(n, m) {
                let reps = carry_constants(n, m, u);
                assert!(!reps.is_empty() && reps[0] == 0);
                for &c in &reps {
                    assert!(
                        ExtensionGroup::new(n, m, u, carry_cocycle(n, m, c)).is_cocycle(),
                        "({n}, {m}, {u}, {c})"
                    );
                }
            }
        }
        assert_eq!(carry_constants(12, 3, 1), vec![0, 1, 2]);
        assert_eq!(carry_constants(12, 2, 11), vec![0, 6]);
    }

    #[test]
    fn isomorphism_test_separates_groups_of_order_eight() {
        let cyclic = ExtensionGroup::new(4, 2, 1, vec![vec![0, 0], vec![0, 1]]);
        let product = ExtensionGroup::new(4, 2, 1, vec![vec![0, 0], vec![0, 0]]);
        let dihedral = ExtensionGroup::new(4, 2, 3, vec![vec![0, 0], vec![0, 0]]);
        let quaternion = ExtensionGroup::new(4, 2, 3, vec![vec![0, 0], vec![0, 2]]);
        let groups = [&cyclic, &product, &dihedral, &quaternion];
        for (i, a) in groups.iter().enumerate() {
            for (j, b) in groups.iter().enumerate() {
                assert_eq!(a.is_isomorphic(b), i == j, "{i} vs {j}");
            }
        }
        // Z_8 again, as Z_2 extended by Z_4
        assert!(cyclic.is_isomorphic(&ExtensionGroup::new(2, 4, 1, carry_cocycle(2, 4, 1))));
    }

    #[test]
    fn classes_sharing_a_key_are_split() {
        let e = enumerate_group_extensions(24, 2).unwrap();
        assert!(e.classes.iter().any(|c| c.variant > 0));
        let e = enumerate_group_extensions(8, 2).unwrap();
        // Z_16, Z_8 x Z_2, dihedral, semidihedral, generalized quaternion, modular
        assert_eq!(e.classes.len(), 6);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = serde_json::to_string(&enumerate_group_extensions(8, 2).unwrap()).unwrap();
        let b = serde_json::to_string(&enumerate_group_extensions(8, 2).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
