//! Category extensions `1 -> Z -> G -> H -> 1` with abelian fibers `Z_n`.
//!
//! Morphisms of `G` are pairs `(z, h)` where `h` is a morphism of the shape
//! groupoid `H` and `z` is a shift in the fiber over the target of `h`.
//! Composition follows
//!
//! ```text
//! (z2, h2) . (z1, h1) = (z2 + phi(h2) z1 + zeta(h2, h1), h2 . h1)
//! ```
//!
//! with `phi` a functor from `H` into the unit multipliers and `zeta` a
//! normalized 2-cocycle.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::groupoid::{Groupoid, GroupoidError, MorphId, ObjIdx, ObjectId};
use crate::modular::{
    add_mod, reduce_signed, solve_linear_system, sub_mod, AlgebraError, AutMultiplier, Residue,
};
use crate::report::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("action is not a functor:\n{0}")]
    InvalidAction(ValidationReport),
    #[error("invalid 2-cocycle:\n{0}")]
    InvalidCocycle(ValidationReport),
    #[error("fiber orders differ: {0} has order {1}, expected {2}")]
    NonUniformOrder(String, u64, u64),
    #[error("base and shape categories have different objects")]
    ObjectMismatch,
    #[error("action table has {got} entries for {want} morphisms")]
    ActionSize { got: usize, want: usize },
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("cannot parse morphism literal `{0}`")]
    ParseMorphism(String),
    #[error("extensions do not share shape, action and modulus")]
    Mismatch,
}

/// Disjoint union of copies of `Z_n`, one per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCategory {
    objects: Vec<ObjectId>,
    order: u64,
}

impl BaseCategory {
    pub fn uniform(objects: Vec<ObjectId>, order: u64) -> Result<Self, ExtensionError> {
        if order == 0 {
            return Err(AlgebraError::ZeroModulus.into());
        }
        Ok(BaseCategory { objects, order })
    }

    /// Rejects fibers of different orders.
    pub fn from_orders(orders: &[(ObjectId, u64)]) -> Result<Self, ExtensionError> {
        let order = orders.first().map_or(1, |(_, n)| *n);
        for (o, n) in orders {
            if *n != order {
                return Err(ExtensionError::NonUniformOrder(o.to_string(), *n, order));
            }
        }
        Self::uniform(orders.iter().map(|(o, _)| o.clone()).collect(), order)
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn order(&self) -> u64 {
        self.order
    }
}

/// A transposition `z_X^p` of the base category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZMorphism {
    pub object: ObjIdx,
    pub shift: Residue,
}

/// `phi(h)` carries the fiber over `s(h)` to the fiber over `t(h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionFunctor {
    multipliers: Vec<AutMultiplier>,
}

impl ActionFunctor {
    pub fn new(multipliers: Vec<AutMultiplier>) -> Self {
        ActionFunctor { multipliers }
    }

    pub fn trivial(shape: &Groupoid, n: u64) -> Self {
        ActionFunctor {
            multipliers: vec![AutMultiplier::identity(n); shape.morphism_count()],
        }
    }

    pub fn from_fn(shape: &Groupoid, f: impl Fn(MorphId) -> AutMultiplier) -> Self {
        ActionFunctor {
            multipliers: shape.morphism_ids().map(f).collect(),
        }
    }

    pub fn get(&self, h: MorphId) -> AutMultiplier {
        self.multipliers[h.0]
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }
}

/// Shift-valued 2-cochain on composable pairs; unset entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCocycle {
    modulus: u64,
    values: HashMap<(MorphId, MorphId), u64>,
}

impl TwoCocycle {
    pub fn zero(modulus: u64) -> Self {
        TwoCocycle {
            modulus,
            values: HashMap::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `zeta(h2, h1)`.
    pub fn get(&self, h2: MorphId, h1: MorphId) -> u64 {
        self.values.get(&(h2, h1)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, h2: MorphId, h1: MorphId, value: i64) {
        let v = reduce_signed(value, self.modulus);
        if v == 0 {
            self.values.remove(&(h2, h1));
        } else {
            self.values.insert((h2, h1), v);
        }
    }

    /// Non-zero entries sorted by key.
    pub fn entries(&self) -> Vec<((MorphId, MorphId), u64)> {
        let mut out: Vec<_> = self.values.iter().map(|(&k, &v)| (k, v)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// A morphism `(z, h)` of the extension; `shift` lives in the fiber over `t(h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GMorphism {
    pub shift: Residue,
    pub h: MorphId,
}

pub fn check_action_functor(shape: &Groupoid, phi: &ActionFunctor) -> ValidationReport {
    let mut report = ValidationReport::new();
    if phi.len() != shape.morphism_count() {
        report.push(
            "action-domain",
            format!(
                "{} multipliers for {} morphisms",
                phi.len(),
                shape.morphism_count()
            ),
        );
        return report;
    }
    for x in 0..shape.object_count() {
        let id = shape.identity(ObjIdx(x));
        if !phi.get(id).is_identity() {
            report.push(
                "action-identity",
                format!(
                    "phi({}) = x{} is not the identity",
                    shape.label(id),
                    phi.get(id).value()
                ),
            );
        }
    }
    for h1 in shape.morphism_ids() {
        for h2 in shape.morphism_ids().filter(|&h2| shape.composable(h2, h1)) {
            let Ok(h21) = shape.compose(h2, h1) else {
                continue;
            };
            let product = phi.get(h1).then(phi.get(h2));
            if product != phi.get(h21) {
                report.push(
                    "action-functoriality",
                    format!(
                        "phi({}) * phi({}) = {} * {} = {} != {} = phi({})",
                        shape.label(h2),
                        shape.label(h1),
                        phi.get(h2).value(),
                        phi.get(h1).value(),
                        product.value(),
                        phi.get(h21).value(),
                        shape.label(h21)
                    ),
                );
            }
        }
    }
    report
}

/// Checks `phi(h3) zeta(h2,h1) + zeta(h3, h2 h1) = zeta(h3,h2) + zeta(h3 h2, h1)`
/// on every composable triple.
pub fn check_cocycle(shape: &Groupoid, phi: &ActionFunctor, zeta: &TwoCocycle) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = zeta.modulus;
    for ((h2, h1), _) in zeta.entries() {
        if !shape.composable(h2, h1) {
            report.push(
                "cocycle-domain",
                format!(
                    "zeta({}, {}) set on an incompatible pair",
                    shape.label(h2),
                    shape.label(h1)
                ),
            );
        }
    }
    for h1 in shape.morphism_ids() {
        for h2 in shape.morphism_ids().filter(|&h2| shape.composable(h2, h1)) {
            let Ok(h21) = shape.compose(h2, h1) else {
                continue;
            };
            for h3 in shape.morphism_ids().filter(|&h3| shape.composable(h3, h2)) {
                let Ok(h32) = shape.compose(h3, h2) else {
                    continue;
                };
                let lhs = add_mod(
                    phi.get(h3).apply_raw(zeta.get(h2, h1)),
                    zeta.get(h3, h21),
                    n,
                );
                let rhs = add_mod(zeta.get(h3, h2), zeta.get(h32, h1), n);
                if lhs != rhs {
                    report.push(
                        "cocycle",
                        format!(
                            "triple ({}, {}, {}): {} != {}",
                            shape.label(h3),
                            shape.label(h2),
                            shape.label(h1),
                            lhs,
                            rhs
                        ),
                    );
                }
            }
        }
    }
    report
}

/// Checks `zeta(h, id) = zeta(id, h) = 0`.
pub fn check_normalized(shape: &Groupoid, zeta: &TwoCocycle) -> ValidationReport {
    let mut report = ValidationReport::new();
    for ((h2, h1), v) in zeta.entries() {
        if shape.is_identity(h2) || shape.is_identity(h1) {
            report.push(
                "cocycle-normalization",
                format!(
                    "zeta({}, {}) = {} on an identity",
                    shape.label(h2),
                    shape.label(h1),
                    v
                ),
            );
        }
    }
    report
}

/// `zeta(h2, h1) = c(h2) + phi(h2) c(h1) - c(h2 h1)`.
pub fn coboundary_of(shape: &Groupoid, phi: &ActionFunctor, n: u64, cochain: &[u64]) -> TwoCocycle {
    let mut zeta = TwoCocycle::zero(n);
    for h1 in shape.morphism_ids() {
        for h2 in shape.morphism_ids().filter(|&h2| shape.composable(h2, h1)) {
            let Ok(h21) = shape.compose(h2, h1) else {
                continue;
            };
            let v = sub_mod(
                add_mod(cochain[h2.0], phi.get(h2).apply_raw(cochain[h1.0]), n),
                cochain[h21.0],
                n,
            );
            zeta.set(h2, h1, v as i64);
        }
    }
    zeta
}

/// A 1-cochain `c` with `coboundary(c) = zeta2 - zeta1`, if one exists.
pub fn cohomologous(
    shape: &Groupoid,
    phi: &ActionFunctor,
    zeta1: &TwoCocycle,
    zeta2: &TwoCocycle,
) -> Option<Vec<u64>> {
    let n = zeta1.modulus;
    assert_eq!(n, zeta2.modulus, "cocycles over different moduli");
    let unknowns = shape.morphism_count();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for h1 in shape.morphism_ids() {
        for h2 in shape.morphism_ids().filter(|&h2| shape.composable(h2, h1)) {
            let Ok(h21) = shape.compose(h2, h1) else {
                continue;
            };
            let mut row = vec![0u64; unknowns];
            row[h2.0] = add_mod(row[h2.0], 1, n);
            row[h1.0] = add_mod(row[h1.0], phi.get(h2).value(), n);
            row[h21.0] = sub_mod(row[h21.0], 1, n);
            rows.push(row);
            rhs.push(sub_mod(zeta2.get(h2, h1), zeta1.get(h2, h1), n));
        }
    }
    solve_linear_system(&rows, &rhs, n)
}

#[derive(Clone, Debug)]
pub struct ExtensionCategory {
    base: BaseCategory,
    shape: Groupoid,
    phi: ActionFunctor,
    zeta: TwoCocycle,
}

impl ExtensionCategory {
    /// Validates the action and the (normalized) cocycle before building.
    pub fn build(
        base: BaseCategory,
        shape: Groupoid,
        phi: ActionFunctor,
        zeta: TwoCocycle,
    ) -> Result<Self, ExtensionError> {
        if base.objects() != shape.objects() {
            return Err(ExtensionError::ObjectMismatch);
        }
        if phi.len() != shape.morphism_count() {
            return Err(ExtensionError::ActionSize {
                got: phi.len(),
                want: shape.morphism_count(),
            });
        }
        if phi.multipliers.iter().any(|k| k.modulus() != base.order) || zeta.modulus != base.order {
            return Err(AlgebraError::ModulusMismatch(base.order, zeta.modulus).into());
        }
        let action_report = check_action_functor(&shape, &phi);
        if !action_report.is_valid() {
            return Err(ExtensionError::InvalidAction(action_report));
        }
        let mut cocycle_report = check_normalized(&shape, &zeta);
        cocycle_report.extend(check_cocycle(&shape, &phi, &zeta));
        if !cocycle_report.is_valid() {
            return Err(ExtensionError::InvalidCocycle(cocycle_report));
        }
        Ok(ExtensionCategory {
            base,
            shape,
            phi,
            zeta,
        })
    }

    /// Extension of `Z_n` fibers over `shape` with the given action and zero cocycle.
    pub fn split(shape: Groupoid, n: u64, phi: ActionFunctor) -> Result<Self, ExtensionError> {
        let base = BaseCategory::uniform(shape.objects().to_vec(), n)?;
        Self::build(base, shape, phi, TwoCocycle::zero(n))
    }

    pub fn n(&self) -> u64 {
        self.base.order
    }

    pub fn base(&self) -> &BaseCategory {
        &self.base
    }

    pub fn shape(&self) -> &Groupoid {
        &self.shape
    }

    pub fn phi(&self) -> &ActionFunctor {
        &self.phi
    }

    pub fn zeta(&self) -> &TwoCocycle {
        &self.zeta
    }

    pub fn morphism_count(&self) -> usize {
        self.shape.morphism_count() * self.n() as usize
    }

    /// All morphisms, grouped by `h` with ascending shifts.
    pub fn morphisms(&self) -> impl Iterator<Item = GMorphism> + '_ {
        let n = self.n();
        self.shape.morphism_ids().flat_map(move |h| {
            (0..n).map(move |z| GMorphism {
                shift: Residue::new(z, n).unwrap(),
                h,
            })
        })
    }

    pub fn morphism(&self, shift: i64, h: MorphId) -> GMorphism {
        GMorphism {
            shift: Residue::from_signed(shift, self.n()).unwrap(),
            h,
        }
    }

    pub fn src(&self, g: GMorphism) -> ObjIdx {
        self.shape.src(g.h)
    }

    pub fn dst(&self, g: GMorphism) -> ObjIdx {
        self.shape.dst(g.h)
    }

    pub fn identity(&self, x: ObjIdx) -> GMorphism {
        GMorphism {
            shift: Residue::zero(self.n()),
            h: self.shape.identity(x),
        }
    }

    pub fn compose(&self, g2: GMorphism, g1: GMorphism) -> Result<GMorphism, ExtensionError> {
        let h = self.shape.compose(g2.h, g1.h)?;
        let n = self.n();
        let z = add_mod(
            add_mod(
                g2.shift.value(),
                self.phi.get(g2.h).apply_raw(g1.shift.value()),
                n,
            ),
            self.zeta.get(g2.h, g1.h),
            n,
        );
        Ok(GMorphism {
            shift: Residue::new(z, n).unwrap(),
            h,
        })
    }

    /// `(z, h)^-1 = (-phi(h^-1) z - zeta(h^-1, h), h^-1)`.
    pub fn inverse(&self, g: GMorphism) -> GMorphism {
        let n = self.n();
        let inv = self
            .shape
            .inverse(g.h)
            .expect("shape is a validated groupoid");
        let moved = self.phi.get(inv).apply_raw(g.shift.value());
        let z = sub_mod(sub_mod(0, moved, n), self.zeta.get(inv, g.h), n);
        GMorphism {
            shift: Residue::new(z, n).unwrap(),
            h: inv,
        }
    }

    pub fn include(&self, z: ZMorphism) -> GMorphism {
        GMorphism {
            shift: z.shift,
            h: self.shape.identity(z.object),
        }
    }

    pub fn project(&self, g: GMorphism) -> MorphId {
        g.h
    }

    /// `I(z_X^p) = (p, id_X)` and `P(z, h) = h` over all morphisms of the extension.
    pub fn canonical_witness(&self) -> ExtensionWitness {
        let n = self.n();
        let mut inclusion = HashMap::new();
        for x in 0..self.shape.object_count() {
            for p in 0..n {
                let z = ZMorphism {
                    object: ObjIdx(x),
                    shift: Residue::new(p, n).unwrap(),
                };
                inclusion.insert(z, self.include(z));
            }
        }
        let projection = self.morphisms().map(|g| (g, self.project(g))).collect();
        ExtensionWitness {
            inclusion,
            projection,
        }
    }

    /// `(2, h:beta->M)`.
    pub fn describe(&self, g: GMorphism) -> String {
        format!("({}, {})", g.shift.value(), self.shape.label(g.h))
    }

    /// Parses the [`describe`](Self::describe) format; shifts may be negative.
    pub fn parse_morphism(&self, text: &str) -> Result<GMorphism, ExtensionError> {
        let bad = || ExtensionError::ParseMorphism(text.to_string());
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (shift, label) = inner.split_once(',').ok_or_else(bad)?;
        let shift: i64 = shift.trim().parse().map_err(|_| bad())?;
        let label = label.trim();
        let h = self
            .shape
            .by_label(label)
            .ok_or_else(|| ExtensionError::UnknownMorphism(label.to_string()))?;
        Ok(self.morphism(shift, h))
    }

    /// A 1-cochain relating the two cocycles, when the extensions share shape, action and modulus.
    pub fn cohomologous_to(
        &self,
        other: &ExtensionCategory,
    ) -> Result<Option<Vec<u64>>, ExtensionError> {
        if self.n() != other.n() || self.shape != other.shape || self.phi != other.phi {
            return Err(ExtensionError::Mismatch);
        }
        Ok(cohomologous(
            &self.shape,
            &self.phi,
            &self.zeta,
            &other.zeta,
        ))
    }
}

/// Explicit tables for the functors `I: Z -> G` and `P: G -> H`.
///
/// The key set of `projection` is taken as the morphism set of `G`.
#[derive(Clone, Debug)]
pub struct ExtensionWitness {
    pub inclusion: HashMap<ZMorphism, GMorphism>,
    pub projection: HashMap<GMorphism, MorphId>,
}

/// Checks the three extension conditions exhaustively.
pub fn verify_extension_axioms(
    ext: &ExtensionCategory,
    witness: &ExtensionWitness,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let shape = ext.shape();
    let n = ext.n();

    let mut g_morphisms: Vec<GMorphism> = witness.projection.keys().copied().collect();
    g_morphisms.sort_unstable();
    let in_g: HashSet<GMorphism> = g_morphisms.iter().copied().collect();
    let g_objects: HashSet<ObjIdx> = g_morphisms
        .iter()
        .flat_map(|&g| [ext.src(g), ext.dst(g)])
        .collect();

    // (1)
    let z_count = ext.base().objects().len();
    if z_count != shape.object_count() || g_objects.len() != shape.object_count() {
        report.push(
            "condition-1",
            format!(
                "object counts differ: Z has {}, G has {}, H has {}",
                z_count,
                g_objects.len(),
                shape.object_count()
            ),
        );
    }

    // (2) I is a functor injective on morphisms
    let mut images = HashSet::new();
    for x in 0..z_count {
        let x = ObjIdx(x);
        let zero = ZMorphism {
            object: x,
            shift: Residue::zero(n),
        };
        match witness.inclusion.get(&zero) {
            Some(&g) if g == ext.identity(x) => {}
            _ => report.push(
                "condition-2-I",
                format!("I does not preserve the identity of {}", shape.object(x)),
            ),
        }
        for p in 0..n {
            let zp = ZMorphism {
                object: x,
                shift: Residue::new(p, n).unwrap(),
            };
            let Some(&gp) = witness.inclusion.get(&zp) else {
                report.push(
                    "condition-2-I",
                    format!("I undefined on z_{}^{}", shape.object(x), p),
                );
                continue;
            };
            if !in_g.contains(&gp) {
                report.push(
                    "condition-2-I",
                    format!("I(z_{}^{}) is not a morphism of G", shape.object(x), p),
                );
            }
            if !images.insert(gp) {
                report.push(
                    "condition-2-I",
                    format!("I is not injective at z_{}^{}", shape.object(x), p),
                );
            }
            for q in 0..n {
                let zq = ZMorphism {
                    object: x,
                    shift: Residue::new(q, n).unwrap(),
                };
                let zpq = ZMorphism {
                    object: x,
                    shift: Residue::new(add_mod(p, q, n), n).unwrap(),
                };
                let (Some(&gq), Some(&gpq)) =
                    (witness.inclusion.get(&zq), witness.inclusion.get(&zpq))
                else {
                    continue;
                };
                if ext.compose(gp, gq).ok() != Some(gpq) {
                    report.push(
                        "condition-2-I",
                        format!("I(z^{p} z^{q}) != I(z^{p}) I(z^{q}) at {}", shape.object(x)),
                    );
                }
            }
        }
    }

    // (2) P is a functor surjective on morphisms
    let hit: HashSet<MorphId> = witness.projection.values().copied().collect();
    for h in shape.morphism_ids() {
        if !hit.contains(&h) {
            report.push("condition-2-P", format!("P misses {}", shape.label(h)));
        }
    }
    for x in 0..shape.object_count() {
        let id = ext.identity(ObjIdx(x));
        if let Some(&p) = witness.projection.get(&id) {
            if p != shape.identity(ObjIdx(x)) {
                report.push(
                    "condition-2-P",
                    format!(
                        "P does not preserve the identity of {}",
                        shape.object(ObjIdx(x))
                    ),
                );
            }
        }
    }
    for &g1 in &g_morphisms {
        for &g2 in g_morphisms.iter().filter(|&&g2| ext.src(g2) == ext.dst(g1)) {
            let g21 = ext.compose(g2, g1).expect("compatible");
            match witness.projection.get(&g21) {
                None => report.push(
                    "closure",
                    format!(
                        "{} . {} = {} is not a morphism of G",
                        ext.describe(g2),
                        ext.describe(g1),
                        ext.describe(g21)
                    ),
                ),
                Some(&p) => {
                    let expected = shape.compose(witness.projection[&g2], witness.projection[&g1]);
                    if expected.ok() != Some(p) {
                        report.push(
                            "condition-2-P",
                            format!(
                                "P not functorial on {} . {}",
                                ext.describe(g2),
                                ext.describe(g1)
                            ),
                        );
                    }
                }
            }
        }
    }

    // (3) P(g1) = P(g2)  <=>  exists unique z with g2 = I(z) g1
    let mut fiber_sizes: HashMap<MorphId, u64> = HashMap::new();
    for &g in &g_morphisms {
        *fiber_sizes.entry(witness.projection[&g]).or_default() += 1;
    }
    for (&h, &size) in &fiber_sizes {
        if size != n {
            report.push(
                "condition-3",
                format!(
                    "fiber over {} has {} morphisms; unique transposition fails for {} of {}",
                    shape.label(h),
                    size,
                    n - size.min(n),
                    n
                ),
            );
        }
    }
    for &g1 in &g_morphisms {
        let t = ext.dst(g1);
        let translates: Vec<GMorphism> = (0..n)
            .filter_map(|p| {
                let z = ZMorphism {
                    object: t,
                    shift: Residue::new(p, n).unwrap(),
                };
                witness
                    .inclusion
                    .get(&z)
                    .and_then(|&iz| ext.compose(iz, g1).ok())
            })
            .collect();
        for &g2 in &g_morphisms {
            let same_fiber = witness.projection[&g1] == witness.projection[&g2];
            let count = translates.iter().filter(|&&g| g == g2).count();
            if same_fiber != (count == 1) {
                report.push(
                    "condition-3",
                    format!(
                        "{} and {}: same fiber = {}, but {} transpositions relate them",
                        ext.describe(g1),
                        ext.describe(g2),
                        same_fiber,
                        count
                    ),
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mult(k: u64) -> AutMultiplier {
        AutMultiplier::new(k, 12).unwrap()
    }

    fn pair_action(g: &Groupoid, table: &[(&str, u64)]) -> ActionFunctor {
        ActionFunctor::from_fn(g, |h| {
            let label = g.label(h);
            table
                .iter()
                .find(|(l, _)| *l == label)
                .map_or(mult(1), |&(_, k)| mult(k))
        })
    }

    fn mab_shape() -> Groupoid {
        Groupoid::pair(&["M", "alpha", "beta"]).unwrap()
    }

    const CANONICAL: [(&str, u64); 4] = [
        ("h:M->alpha", 5),
        ("h:alpha->M", 5),
        ("h:M->beta", 5),
        ("h:beta->M", 5),
    ];

    fn mab() -> ExtensionCategory {
        let shape = mab_shape();
        let phi = pair_action(&shape, &CANONICAL);
        ExtensionCategory::split(shape, 12, phi).unwrap()
    }

    fn z3_carry(n: u64, scale: i64) -> (Groupoid, ActionFunctor, TwoCocycle) {
        let shape = Groupoid::cyclic("X", 3).unwrap();
        let phi = ActionFunctor::trivial(&shape, n);
        let mut zeta = TwoCocycle::zero(n);
        for a in 0..3 {
            for b in 0..3 {
                if a + b >= 3 {
                    zeta.set(MorphId(a), MorphId(b), scale);
                }
            }
        }
        (shape, phi, zeta)
    }

    fn m(e: &ExtensionCategory, shift: i64, label: &str) -> GMorphism {
        e.morphism(shift, e.shape().by_label(label).unwrap())
    }

    #[test]
    fn canonical_action_is_functorial() {
        let g = mab_shape();
        assert!(check_action_functor(&g, &pair_action(&g, &CANONICAL)).is_valid());
        assert!(check_action_functor(&g, &ActionFunctor::trivial(&g, 12)).is_valid());
    }

    #[test]
    fn non_functorial_action_is_reported() {
        let g = mab_shape();
        let phi = pair_action(
            &g,
            &[
                ("h:alpha->M", 5),
                ("h:M->alpha", 5),
                ("h:M->beta", 5),
                ("h:beta->M", 5),
                ("h:alpha->beta", 5),
                ("h:beta->alpha", 5),
            ],
        );
        let report = check_action_functor(&g, &phi);
        assert!(report.cites("action-functoriality"));
        assert!(
            report.violations.iter().any(|v| v
                .detail
                .contains("phi(h:M->beta) * phi(h:alpha->M) = 5 * 5 = 1 != 5")),
            "{report}"
        );
    }

    #[test]
    fn cocycle_examples() {
        let g = mab_shape();
        let phi = pair_action(&g, &CANONICAL);
        assert!(check_cocycle(&g, &phi, &TwoCocycle::zero(12)).is_valid());

        let (shape, phi, mut zeta) = z3_carry(12, 4);
        assert!(check_cocycle(&shape, &phi, &zeta).is_valid());
        zeta.set(MorphId(1), MorphId(2), 5);
        assert!(!check_cocycle(&shape, &phi, &zeta).is_valid());
    }

    #[test]
    fn build_counts_morphisms() {
        assert_eq!(mab().morphism_count(), 108);
        let single = ExtensionCategory::split(
            Groupoid::pair(&["X"]).unwrap(),
            12,
            ActionFunctor::new(vec![mult(1)]),
        )
        .unwrap();
        assert_eq!(single.morphism_count(), 12);
        let mm = Groupoid::pair(&["M", "m"]).unwrap();
        let phi = pair_action(&mm, &[("h:M->m", 11), ("h:m->M", 11)]);
        assert_eq!(
            ExtensionCategory::split(mm, 12, phi)
                .unwrap()
                .morphisms()
                .count(),
            48
        );
    }

    #[test]
    fn build_rejects_invalid_inputs() {
        let g = mab_shape();
        let phi = pair_action(&g, &[("h:alpha->beta", 5)]);
        assert!(matches!(
            ExtensionCategory::split(g, 12, phi),
            Err(ExtensionError::InvalidAction(_))
        ));

        let (shape, phi, mut zeta) = z3_carry(12, 4);
        zeta.set(MorphId(0), MorphId(1), 3);
        let base = BaseCategory::uniform(shape.objects().to_vec(), 12).unwrap();
        assert!(matches!(
            ExtensionCategory::build(base, shape, phi, zeta),
            Err(ExtensionError::InvalidCocycle(r)) if r.cites("cocycle-normalization")
        ));

        let orders = [(ObjectId::new("M"), 12), (ObjectId::new("m"), 6)];
        assert!(matches!(
            BaseCategory::from_orders(&orders),
            Err(ExtensionError::NonUniformOrder(..))
        ));
    }

    #[test]
    fn composition_examples() {
        let e = mab();
        for n in 0..12 {
            let got = e.compose(m(&e, n, "id:M"), m(&e, 0, "h:alpha->M")).unwrap();
            assert_eq!(got, m(&e, n, "h:alpha->M"));
            let got = e
                .compose(m(&e, n, "h:beta->M"), m(&e, 2, "h:M->beta"))
                .unwrap();
            assert_eq!(got, m(&e, n + 10, "id:M"));
        }
        assert_eq!(
            e.compose(m(&e, 0, "id:M"), m(&e, 0, "id:M")).unwrap(),
            m(&e, 0, "id:M")
        );
        assert!(e
            .compose(m(&e, 0, "h:M->beta"), m(&e, 0, "h:M->alpha"))
            .is_err());
    }

    #[test]
    fn inverse_examples() {
        let e = mab();
        assert_eq!(
            e.inverse(m(&e, 10, "h:alpha->beta")),
            m(&e, 2, "h:beta->alpha")
        );
        assert_eq!(e.inverse(m(&e, 0, "id:M")), m(&e, 0, "id:M"));
        assert_eq!(e.inverse(m(&e, 3, "id:M")), m(&e, 9, "id:M"));
        for g in e.morphisms() {
            let inv = e.inverse(g);
            assert_eq!(e.compose(inv, g).unwrap(), e.identity(e.src(g)));
            assert_eq!(e.compose(g, inv).unwrap(), e.identity(e.dst(g)));
        }
    }

    #[test]
    fn composition_is_associative_and_inverse_reverses_products() {
        let (shape, phi, zeta) = z3_carry(12, 4);
        let base = BaseCategory::uniform(shape.objects().to_vec(), 12).unwrap();
        let carry = ExtensionCategory::build(base, shape, phi, zeta).unwrap();
        for e in [mab(), carry] {
            let all: Vec<GMorphism> = e.morphisms().collect();
            for &a in &all {
                for &b in all.iter().filter(|&&b| e.dst(a) == e.src(b)) {
                    let ba = e.compose(b, a).unwrap();
                    assert_eq!(
                        e.inverse(ba),
                        e.compose(e.inverse(a), e.inverse(b)).unwrap()
                    );
                    for &c in all.iter().filter(|&&c| e.dst(b) == e.src(c)).step_by(5) {
                        let left = e.compose(e.compose(c, b).unwrap(), a).unwrap();
                        let right = e.compose(c, ba).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_witness_satisfies_the_axioms() {
        let e = mab();
        assert!(verify_extension_axioms(&e, &e.canonical_witness()).is_valid());
        let single = ExtensionCategory::split(
            Groupoid::cyclic("X", 1).unwrap(),
            12,
            ActionFunctor::new(vec![mult(1)]),
        )
        .unwrap();
        assert!(verify_extension_axioms(&single, &single.canonical_witness()).is_valid());
    }

    #[test]
    fn missing_morphism_breaks_condition_three() {
        let e = mab();
        let mut w = e.canonical_witness();
        w.projection.remove(&m(&e, 4, "h:alpha->beta"));
        let report = verify_extension_axioms(&e, &w);
        assert!(report.cites("condition-3"), "{report}");
    }

    #[test]
    fn wrong_projection_is_reported() {
        let e = mab();
        let mut w = e.canonical_witness();
        let g = m(&e, 4, "h:alpha->beta");
        w.projection
            .insert(g, e.shape().by_label("h:alpha->M").unwrap());
        let report = verify_extension_axioms(&e, &w);
        assert!(report.cites("condition-2-P") && report.cites("condition-3"));
    }

    #[test]
    fn coboundary_examples() {
        let g = mab_shape();
        let phi = pair_action(&g, &CANONICAL);
        assert!(coboundary_of(&g, &phi, 12, &[0; 9]).is_zero());

        let mut c = vec![0u64; 9];
        c[g.by_label("h:M->alpha").unwrap().0] = 1;
        let zeta = coboundary_of(&g, &phi, 12, &c);
        assert_eq!(
            zeta.get(
                g.by_label("h:alpha->M").unwrap(),
                g.by_label("h:M->alpha").unwrap()
            ),
            5
        );
        assert!(check_cocycle(&g, &phi, &zeta).is_valid());
    }

    #[test]
    fn cohomology_examples() {
        let g = mab_shape();
        let phi = pair_action(&g, &CANONICAL);
        let zero = TwoCocycle::zero(12);
        assert_eq!(cohomologous(&g, &phi, &zero, &zero), Some(vec![0; 9]));

        let (shape, phi, carry) = z3_carry(12, 4);
        assert_eq!(
            cohomologous(&shape, &phi, &carry, &TwoCocycle::zero(12)),
            None
        );
        // exhaustive cross-check over all 12^3 cochains
        for c0 in 0..12 {
            for c1 in 0..12 {
                for c2 in 0..12 {
                    let cb = coboundary_of(&shape, &phi, 12, &[c0, c1, c2]);
                    assert_ne!(cb, carry);
                }
            }
        }
        // the carry cocycle scaled by 3 is a coboundary
        let (_, _, carry3) = z3_carry(12, 3);
        let c = cohomologous(&shape, &phi, &TwoCocycle::zero(12), &carry3).expect("coboundary");
        assert_eq!(coboundary_of(&shape, &phi, 12, &c), carry3);
    }

    #[test]
    fn describe_and_parse_round_trip() {
        let e = mab();
        for g in e.morphisms() {
            assert_eq!(e.parse_morphism(&e.describe(g)).unwrap(), g);
        }
        assert_eq!(
            e.parse_morphism("(-2, h:beta->M)").unwrap(),
            m(&e, 10, "h:beta->M")
        );
        assert!(e.parse_morphism("2, h:beta->M").is_err());
        assert!(matches!(
            e.parse_morphism("(2, h:x->M)"),
            Err(ExtensionError::UnknownMorphism(_))
        ));
    }

    #[test]
    fn cohomologous_to_requires_shared_data() {
        let e = mab();
        assert_eq!(e.cohomologous_to(&e).unwrap(), Some(vec![0; 9]));
        let mm = Groupoid::pair(&["M", "m"]).unwrap();
        let other =
            ExtensionCategory::split(mm.clone(), 12, ActionFunctor::trivial(&mm, 12)).unwrap();
        assert_eq!(e.cohomologous_to(&other), Err(ExtensionError::Mismatch));
    }
}
