//! Packaged operators: one extension morphism per object, with the
//! source and target maps both permutations of the objects.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, RepresentableAction, Variance};
use crate::chord::Chord;
use crate::extension::{ExtensionCategory, GMorphism};
use crate::groupoid::{ObjIdx, ObjectId};
use crate::modular::Residue;
use crate::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackageError {
    #[error("not a packaging: {0}")]
    NotAPackaging(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// A bundle of morphisms, stored by source object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PackagedOperator {
    by_source: Vec<GMorphism>,
}

impl PackagedOperator {
    pub fn identity(ext: &ExtensionCategory) -> Self {
        let by_source = (0..ext.shape().object_count())
            .map(|x| ext.identity(ObjIdx(x)))
            .collect();
        PackagedOperator { by_source }
    }

    /// The morphism with source `x`.
    pub fn from_source(&self, x: ObjIdx) -> GMorphism {
        self.by_source[x.0]
    }

    pub fn morphisms(&self) -> &[GMorphism] {
        &self.by_source
    }

    /// The morphism with target `x`.
    pub fn into_target(&self, ext: &ExtensionCategory, x: ObjIdx) -> GMorphism {
        *self
            .by_source
            .iter()
            .find(|&&g| ext.dst(g) == x)
            .expect("targets form a permutation")
    }

    /// `x -> t(g_x)`.
    pub fn object_map(&self, ext: &ExtensionCategory) -> Vec<ObjIdx> {
        self.by_source.iter().map(|&g| ext.dst(g)).collect()
    }

    pub fn describe(&self, ext: &ExtensionCategory) -> String {
        let parts: Vec<String> = self.by_source.iter().map(|&g| ext.describe(g)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Validates a bundle: every object occurs exactly once as a source and once as a target.
pub fn package(
    ext: &ExtensionCategory,
    morphisms: &[GMorphism],
) -> Result<PackagedOperator, PackageError> {
    let shape = ext.shape();
    let m = shape.object_count();
    let mut by_source: Vec<Option<GMorphism>> = vec![None; m];
    let mut hit_target = vec![false; m];
    for &g in morphisms {
        let (s, t) = (ext.src(g), ext.dst(g));
        if by_source[s.0].replace(g).is_some() {
            return Err(PackageError::NotAPackaging(format!(
                "`{}` is a source twice",
                shape.object(s)
            )));
        }
        if std::mem::replace(&mut hit_target[t.0], true) {
            return Err(PackageError::NotAPackaging(format!(
                "`{}` is a target twice",
                shape.object(t)
            )));
        }
    }
    if let Some(x) = by_source.iter().position(Option::is_none) {
        return Err(PackageError::NotAPackaging(format!(
            "`{}` is never a source",
            shape.object(ObjIdx(x))
        )));
    }
    Ok(PackagedOperator {
        by_source: by_source.into_iter().map(Option::unwrap).collect(),
    })
}

/// One row of a root law: `n_from -> (n + shift)_to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootLawEntry {
    pub from: ObjectId,
    pub to: ObjectId,
    pub shift: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootLawOperator {
    pub entries: Vec<RootLawEntry>,
}

impl RootLawOperator {
    pub fn new(entries: &[(&str, &str, i64)]) -> Self {
        RootLawOperator {
            entries: entries
                .iter()
                .map(|&(from, to, shift)| RootLawEntry {
                    from: ObjectId::new(from),
                    to: ObjectId::new(to),
                    shift,
                })
                .collect(),
        }
    }

    /// `shift` on every listed object, fixing types.
    pub fn transposition<S: AsRef<str>>(objects: &[S], shift: i64) -> Self {
        RootLawOperator {
            entries: objects
                .iter()
                .map(|o| RootLawEntry {
                    from: ObjectId::new(o.as_ref()),
                    to: ObjectId::new(o.as_ref()),
                    shift,
                })
                .collect(),
        }
    }

    pub fn get(&self, from: &str) -> Option<&RootLawEntry> {
        self.entries.iter().find(|e| e.from.as_str() == from)
    }
}

/// Realises each row by the interval from `0_from` to `shift_to`.
///
/// Under a contravariant action the compiled operator follows the law at every
/// root; under a covariant action it agrees with the law at root 0.
pub fn compile_root_law(
    action: &RepresentableAction,
    law: &RootLawOperator,
) -> Result<PackagedOperator, PackageError> {
    let ext = action.extension();
    let shape = ext.shape();
    let reg = action.registry();
    let mut morphisms = Vec::with_capacity(law.entries.len());
    for e in &law.entries {
        for name in [&e.from, &e.to] {
            if shape.object_index(name.as_str()).is_none() {
                return Err(PackageError::UnknownObject(name.to_string()));
            }
        }
        let c1 = Chord {
            root: Residue::zero(reg.n()),
            kind: e.from.clone(),
        };
        let c2 = Chord {
            root: Residue::from_signed(e.shift, reg.n()).unwrap(),
            kind: e.to.clone(),
        };
        morphisms.push(action.interval(&c1, &c2)?);
    }
    package(ext, &morphisms)
}

/// `O1 . O2`: every composite `g1 . g2` with `s(g1) = t(g2)`.
pub fn compose_packaged(
    ext: &ExtensionCategory,
    o1: &PackagedOperator,
    o2: &PackagedOperator,
) -> PackagedOperator {
    let by_source = o2
        .by_source
        .iter()
        .map(|&g2| {
            ext.compose(o1.from_source(ext.dst(g2)), g2)
                .expect("endpoints match by construction")
        })
        .collect();
    PackagedOperator { by_source }
}

pub fn inverse_packaged(ext: &ExtensionCategory, o: &PackagedOperator) -> PackagedOperator {
    let mut by_source = o.by_source.clone();
    for &g in &o.by_source {
        let inv = ext.inverse(g);
        by_source[ext.src(inv).0] = inv;
    }
    PackagedOperator { by_source }
}

/// The permutation of all chords (indexed type-major, roots ascending)
/// induced by acting with the bundle.
///
/// Covariant actions give a homomorphism, `rep(O1 . O2) = rep(O2).then(rep(O1))`;
/// contravariant ones an anti-homomorphism, `rep(O1 . O2) = rep(O1).then(rep(O2))`.
pub fn permutation_rep(action: &RepresentableAction, o: &PackagedOperator) -> Permutation {
    let ext = action.extension();
    let reg = action.registry();
    let images = reg
        .chords()
        .iter()
        .map(|c| {
            let x = action.object_of(c).expect("registry chords are typed");
            let g = match action.variance() {
                Variance::Contravariant => o.into_target(ext, x),
                Variance::Covariant => o.from_source(x),
            };
            reg.chord_index(&action.act(g, c).expect("the bundle covers every object"))
                .unwrap()
        })
        .collect();
    Permutation::from_images(images).expect("packaged operators act bijectively")
}

/// `(p1 . p2)` as a permutation, following the action's variance.
pub fn rep_product(variance: Variance, p1: &Permutation, p2: &Permutation) -> Permutation {
    match variance {
        Variance::Contravariant => p1.then(p2),
        Variance::Covariant => p2.then(p1),
    }
}

/// `{(0, h_{X->Y}), (0, h_{Y->X}), id elsewhere}`.
pub fn zero_shift_swap(ext: &ExtensionCategory, x: ObjIdx, y: ObjIdx) -> PackagedOperator {
    let shape = ext.shape();
    let mut op = PackagedOperator::identity(ext);
    if x != y {
        let zero = Residue::zero(ext.n());
        op.by_source[x.0] = GMorphism {
            shift: zero,
            h: shape.between(x, y).expect("connected shape"),
        };
        op.by_source[y.0] = GMorphism {
            shift: zero,
            h: shape.between(y, x).expect("connected shape"),
        };
    }
    op
}

/// All zero-shift swaps `I_{XY}` for `X < Y`, in object order.
pub fn zero_shift_swaps(ext: &ExtensionCategory) -> Vec<PackagedOperator> {
    let m = ext.shape().object_count();
    (0..m)
        .flat_map(|x| (x + 1..m).map(move |y| (x, y)))
        .map(|(x, y)| zero_shift_swap(ext, ObjIdx(x), ObjIdx(y)))
        .collect()
}
