//! Representable actions of an extension category on chords.
//!
//! With base object `M`, a contravariant action identifies the chord `n_X`
//! with `(n, h_{X->M})` in `Hom(X, M)` and acts by composing on the right; a
//! covariant action identifies `n_X` with `(n, h_{M->X})` in `Hom(M, X)` and
//! acts by composing on the left.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chord::{Chord, SetClassRegistry};
use crate::extension::{ExtensionCategory, GMorphism};
use crate::groupoid::{MorphId, ObjIdx};
use crate::modular::{sub_mod, Residue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("unknown chord type `{0}`")]
    UnknownType(String),
    #[error("unknown base object `{0}`")]
    UnknownBase(String),
    #[error("set classes {classes:?} do not match the extension objects {objects:?}")]
    ClassMismatch {
        classes: Vec<String>,
        objects: Vec<String>,
    },
    #[error("set-class modulus {classes} differs from the extension modulus {extension}")]
    ModulusMismatch { classes: u64, extension: u64 },
    #[error("shape has no morphism between `{0}` and `{1}`")]
    Disconnected(String, String),
    #[error("shape has several morphisms from `{0}` to `{1}`; chords need a unique one")]
    ParallelMorphisms(String, String),
    #[error("{0} is not in the represented hom-set")]
    NotRepresented(String),
    #[error("{morphism} does not act on {chord}")]
    PartialityViolation { morphism: String, chord: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variance::Covariant => "covariant",
            Variance::Contravariant => "contravariant",
        })
    }
}

impl FromStr for Variance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "covariant" => Ok(Variance::Covariant),
            "contravariant" => Ok(Variance::Contravariant),
            other => Err(format!("unknown variance `{other}`")),
        }
    }
}

/// An extension together with the chord family it acts on.
///
/// The set classes must be declared in the same order as the extension's
/// objects; chord type `t` is then the object with the same name.
#[derive(Clone, Debug)]
pub struct RepresentableAction {
    ext: ExtensionCategory,
    registry: SetClassRegistry,
    base: ObjIdx,
    variance: Variance,
    /// Per object `X`: the shape morphism `X -> M` (contravariant) or `M -> X` (covariant).
    legs: Vec<MorphId>,
}

impl RepresentableAction {
    /// `base = None` selects the first declared object.
    pub fn new(
        ext: ExtensionCategory,
        registry: SetClassRegistry,
        base: Option<&str>,
        variance: Variance,
    ) -> Result<Self, ActionError> {
        let shape = ext.shape();
        let classes: Vec<String> = registry
            .classes()
            .iter()
            .map(|c| c.name.to_string())
            .collect();
        let objects: Vec<String> = shape.objects().iter().map(|o| o.to_string()).collect();
        if classes != objects {
            return Err(ActionError::ClassMismatch { classes, objects });
        }
        if registry.n() != ext.n() {
            return Err(ActionError::ModulusMismatch {
                classes: registry.n(),
                extension: ext.n(),
            });
        }
        let base = match base {
            None => ObjIdx(0),
            Some(name) => shape
                .object_index(name)
                .ok_or_else(|| ActionError::UnknownBase(name.to_string()))?,
        };
        for x in 0..objects.len() {
            for y in 0..objects.len() {
                if shape.hom(ObjIdx(x), ObjIdx(y)).len() > 1 {
                    return Err(ActionError::ParallelMorphisms(
                        shape.object(ObjIdx(x)).to_string(),
                        shape.object(ObjIdx(y)).to_string(),
                    ));
                }
            }
        }
        let mut legs = Vec::with_capacity(objects.len());
        for x in 0..objects.len() {
            let (from, to) = match variance {
                Variance::Contravariant => (ObjIdx(x), base),
                Variance::Covariant => (base, ObjIdx(x)),
            };
            let h = shape.between(from, to).ok_or_else(|| {
                ActionError::Disconnected(
                    shape.object(from).to_string(),
                    shape.object(to).to_string(),
                )
            })?;
            legs.push(h);
        }
        Ok(RepresentableAction {
            ext,
            registry,
            base,
            variance,
            legs,
        })
    }

    pub fn extension(&self) -> &ExtensionCategory {
        &self.ext
    }

    pub fn registry(&self) -> &SetClassRegistry {
        &self.registry
    }

    pub fn base(&self) -> ObjIdx {
        self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn n(&self) -> u64 {
        self.ext.n()
    }

    pub fn object_of(&self, chord: &Chord) -> Result<ObjIdx, ActionError> {
        self.ext
            .shape()
            .object_index(chord.kind.as_str())
            .ok_or_else(|| ActionError::UnknownType(chord.kind.to_string()))
    }

    /// The object a morphism must touch to act on a chord of that type.
    fn acting_end(&self, g: GMorphism) -> ObjIdx {
        match self.variance {
            Variance::Contravariant => self.ext.dst(g),
            Variance::Covariant => self.ext.src(g),
        }
    }

    /// Whether `act(g, c)` is defined.
    pub fn acts_on(&self, g: GMorphism, chord: &Chord) -> bool {
        self.object_of(chord).is_ok_and(|x| self.acting_end(g) == x)
    }

    pub fn chord_to_morphism(&self, chord: &Chord) -> Result<GMorphism, ActionError> {
        let x = self.object_of(chord)?;
        Ok(GMorphism {
            shift: Residue::new(chord.root.value(), self.n()).unwrap(),
            h: self.legs[x.0],
        })
    }

    pub fn morphism_to_chord(&self, g: GMorphism) -> Result<Chord, ActionError> {
        let x = match self.variance {
            Variance::Contravariant => self.ext.src(g),
            Variance::Covariant => self.ext.dst(g),
        };
        if self.legs[x.0] != g.h {
            return Err(ActionError::NotRepresented(self.ext.describe(g)));
        }
        Ok(Chord {
            root: g.shift,
            kind: self.ext.shape().object(x).clone(),
        })
    }

    pub fn act(&self, g: GMorphism, chord: &Chord) -> Result<Chord, ActionError> {
        if !self.acts_on(g, chord) {
            self.object_of(chord)?;
            return Err(ActionError::PartialityViolation {
                morphism: self.ext.describe(g),
                chord: chord.to_string(),
            });
        }
        let c = self.chord_to_morphism(chord)?;
        let image = match self.variance {
            Variance::Contravariant => self.ext.compose(c, g),
            Variance::Covariant => self.ext.compose(g, c),
        }
        .expect("domain checked above");
        self.morphism_to_chord(image)
    }

    /// The commuting action from the other side: `a` must be an endomorphism
    /// of the base object. It composes on the left of contravariant
    /// representatives and on the right of covariant ones.
    pub fn act_opposite(&self, a: GMorphism, chord: &Chord) -> Result<Chord, ActionError> {
        let h = a.h;
        let shape = self.ext.shape();
        if shape.src(h) != self.base || shape.dst(h) != self.base {
            return Err(ActionError::PartialityViolation {
                morphism: self.ext.describe(a),
                chord: chord.to_string(),
            });
        }
        let c = self.chord_to_morphism(chord)?;
        let image = match self.variance {
            Variance::Contravariant => self.ext.compose(a, c),
            Variance::Covariant => self.ext.compose(c, a),
        }
        .expect("endpoints checked above");
        self.morphism_to_chord(image)
    }

    /// The unique `g` with `act(g, c1) = c2`, solved from the composition law.
    pub fn interval(&self, c1: &Chord, c2: &Chord) -> Result<GMorphism, ActionError> {
        let x = self.object_of(c1)?;
        let y = self.object_of(c2)?;
        let n = self.n();
        let shape = self.ext.shape();
        let (n1, n2) = (c1.root.value(), c2.root.value());
        let leg1 = self.legs[x.0];
        let (h, z) = match self.variance {
            // (n1, leg1) . (z, h_{Y->X}) = (n2, leg_Y)
            Variance::Contravariant => {
                let h = shape
                    .between(y, x)
                    .expect("legs exist, so the component is connected");
                let rhs = sub_mod(sub_mod(n2, n1, n), self.ext.zeta().get(leg1, h), n);
                (h, self.ext.phi().get(leg1).inverse().apply_raw(rhs))
            }
            // (z, h_{X->Y}) . (n1, leg1) = (n2, leg_Y)
            Variance::Covariant => {
                let h = shape
                    .between(x, y)
                    .expect("legs exist, so the component is connected");
                let moved = self.ext.phi().get(h).apply_raw(n1);
                (
                    h,
                    sub_mod(sub_mod(n2, moved, n), self.ext.zeta().get(h, leg1), n),
                )
            }
        };
        Ok(GMorphism {
            shift: Residue::new(z, n).unwrap(),
            h,
        })
    }

    /// Chords reachable from `start` by the generators, in canonical chord order.
    pub fn orbit(&self, gens: &[GMorphism], start: &Chord) -> Result<Vec<Chord>, ActionError> {
        self.object_of(start)?;
        let reg = &self.registry;
        let mut seen = vec![false; reg.chords().len()];
        let mut queue = VecDeque::from([start.clone()]);
        seen[reg.chord_index(start).unwrap()] = true;
        while let Some(c) = queue.pop_front() {
            for &g in gens {
                if !self.acts_on(g, &c) {
                    continue;
                }
                let image = self.act(g, &c)?;
                let i = reg.chord_index(&image).unwrap();
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(image);
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| reg.chord_at(i))
            .collect())
    }
}
