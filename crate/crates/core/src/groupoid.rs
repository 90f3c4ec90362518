//! Finite groupoids stored as explicit composition tables.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("cannot compose {g2} after {g1}: target of {g1} is not the source of {g2}")]
    IncompatibleComposition { g2: String, g1: String },
    #[error("composite {g2} . {g1} missing from the composition table")]
    MissingComposite { g2: String, g1: String },
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("object names must be non-empty")]
    EmptyObjectName,
    #[error("a groupoid needs at least one object")]
    NoObjects,
    #[error("index out of range: {0}")]
    BadIndex(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(name: impl Into<String>) -> Self {
        ObjectId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId(s.to_string())
    }
}

/// Position of an object in its groupoid's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjIdx(pub usize);

/// Position of a morphism in its groupoid's morphism list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorphId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HMorphism {
    pub label: String,
    pub src: ObjIdx,
    pub dst: ObjIdx,
}

/// Raw tables of a groupoid, unvalidated. Useful for hand-built or mutated instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidParts {
    pub objects: Vec<ObjectId>,
    pub morphisms: Vec<HMorphism>,
    pub identities: Vec<MorphId>,
    /// `(g2, g1) -> g2 . g1`
    pub table: HashMap<(MorphId, MorphId), MorphId>,
    pub inverses: Vec<Option<MorphId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    parts: GroupoidParts,
    by_label: HashMap<String, MorphId>,
}

impl Groupoid {
    /// Accepts any structurally well-indexed tables; axioms are checked by [`Groupoid::validate`].
    pub fn from_parts(parts: GroupoidParts) -> Result<Self, GroupoidError> {
        if parts.objects.is_empty() {
            return Err(GroupoidError::NoObjects);
        }
        let mut seen = HashSet::new();
        for o in &parts.objects {
            if o.as_str().is_empty() {
                return Err(GroupoidError::EmptyObjectName);
            }
            if !seen.insert(o.as_str()) {
                return Err(GroupoidError::DuplicateObject(o.to_string()));
            }
        }
        let n_obj = parts.objects.len();
        let n_mor = parts.morphisms.len();
        if parts.identities.len() != n_obj || parts.inverses.len() != n_mor {
            return Err(GroupoidError::BadIndex(
                "identity or inverse table has wrong length".into(),
            ));
        }
        for m in &parts.morphisms {
            if m.src.0 >= n_obj || m.dst.0 >= n_obj {
                return Err(GroupoidError::BadIndex(format!("morphism {}", m.label)));
            }
        }
        let in_range = |id: &MorphId| id.0 < n_mor;
        if !parts.identities.iter().all(in_range)
            || !parts.inverses.iter().flatten().all(in_range)
            || !parts
                .table
                .iter()
                .all(|((a, b), c)| in_range(a) && in_range(b) && in_range(c))
        {
            return Err(GroupoidError::BadIndex("morphism id".into()));
        }
        let mut by_label = HashMap::new();
        for (i, m) in parts.morphisms.iter().enumerate() {
            if by_label.insert(m.label.clone(), MorphId(i)).is_some() {
                return Err(GroupoidError::BadIndex(format!(
                    "duplicate label {}",
                    m.label
                )));
            }
        }
        Ok(Groupoid { parts, by_label })
    }

    pub fn parts(&self) -> &GroupoidParts {
        &self.parts
    }

    pub fn into_parts(self) -> GroupoidParts {
        self.parts
    }

    /// One morphism per ordered pair of objects; `h_XX` is the identity.
    ///
    /// Labels are `id:X` for identities and `h:X->Y` otherwise.
    pub fn pair(names: &[&str]) -> Result<Self, GroupoidError> {
        let objects: Vec<ObjectId> = names.iter().map(|&n| ObjectId::new(n)).collect();
        let m = objects.len();
        let idx = |x: usize, y: usize| MorphId(x * m + y);
        let mut morphisms = Vec::with_capacity(m * m);
        for (x, ox) in objects.iter().enumerate() {
            for (y, oy) in objects.iter().enumerate() {
                let label = if x == y {
                    format!("id:{ox}")
                } else {
                    format!("h:{ox}->{oy}")
                };
                morphisms.push(HMorphism {
                    label,
                    src: ObjIdx(x),
                    dst: ObjIdx(y),
                });
            }
        }
        let mut table = HashMap::new();
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    table.insert((idx(y, z), idx(x, y)), idx(x, z));
                }
            }
        }
        let identities = (0..m).map(|x| idx(x, x)).collect();
        let inverses = (0..m)
            .flat_map(|x| (0..m).map(move |y| Some(idx(y, x))))
            .collect();
        Groupoid::from_parts(GroupoidParts {
            objects,
            morphisms,
            identities,
            table,
            inverses,
        })
    }

    /// The cyclic group `Z_order` viewed as a one-object groupoid.
    ///
    /// Morphism `k` is `g^k`, labelled `id:X` for `k = 0` and `g{k}:X` otherwise.
    pub fn cyclic(name: &str, order: usize) -> Result<Self, GroupoidError> {
        assert!(order >= 1, "group order must be positive");
        let objects = vec![ObjectId::new(name)];
        let morphisms = (0..order)
            .map(|k| HMorphism {
                label: if k == 0 {
                    format!("id:{name}")
                } else {
                    format!("g{k}:{name}")
                },
                src: ObjIdx(0),
                dst: ObjIdx(0),
            })
            .collect();
        let mut table = HashMap::new();
        for a in 0..order {
            for b in 0..order {
                table.insert((MorphId(a), MorphId(b)), MorphId((a + b) % order));
            }
        }
        let inverses = (0..order)
            .map(|k| Some(MorphId((order - k) % order)))
            .collect();
        Groupoid::from_parts(GroupoidParts {
            objects,
            morphisms,
            identities: vec![MorphId(0)],
            table,
            inverses,
        })
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.parts.objects
    }

    pub fn object_count(&self) -> usize {
        self.parts.objects.len()
    }

    pub fn object(&self, x: ObjIdx) -> &ObjectId {
        &self.parts.objects[x.0]
    }

    pub fn object_index(&self, name: &str) -> Option<ObjIdx> {
        self.parts
            .objects
            .iter()
            .position(|o| o.as_str() == name)
            .map(ObjIdx)
    }

    pub fn morphism_count(&self) -> usize {
        self.parts.morphisms.len()
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorphId> + '_ {
        (0..self.parts.morphisms.len()).map(MorphId)
    }

    pub fn morphism(&self, h: MorphId) -> &HMorphism {
        &self.parts.morphisms[h.0]
    }

    pub fn label(&self, h: MorphId) -> &str {
        &self.parts.morphisms[h.0].label
    }

    pub fn by_label(&self, label: &str) -> Option<MorphId> {
        self.by_label.get(label).copied()
    }

    pub fn src(&self, h: MorphId) -> ObjIdx {
        self.parts.morphisms[h.0].src
    }

    pub fn dst(&self, h: MorphId) -> ObjIdx {
        self.parts.morphisms[h.0].dst
    }

    pub fn identity(&self, x: ObjIdx) -> MorphId {
        self.parts.identities[x.0]
    }

    pub fn is_identity(&self, h: MorphId) -> bool {
        self.parts.identities[self.src(h).0] == h
    }

    pub fn inverse(&self, h: MorphId) -> Option<MorphId> {
        self.parts.inverses[h.0]
    }

    /// All morphisms `x -> y`, in id order.
    pub fn hom(&self, x: ObjIdx, y: ObjIdx) -> Vec<MorphId> {
        self.morphism_ids()
            .filter(|&h| self.src(h) == x && self.dst(h) == y)
            .collect()
    }

    /// The first morphism `x -> y`; for pair groupoids, the only one.
    pub fn between(&self, x: ObjIdx, y: ObjIdx) -> Option<MorphId> {
        self.morphism_ids()
            .find(|&h| self.src(h) == x && self.dst(h) == y)
    }

    pub fn composable(&self, g2: MorphId, g1: MorphId) -> bool {
        self.dst(g1) == self.src(g2)
    }

    /// `g2 . g1`, defined when the target of `g1` is the source of `g2`.
    pub fn compose(&self, g2: MorphId, g1: MorphId) -> Result<MorphId, GroupoidError> {
        if !self.composable(g2, g1) {
            return Err(GroupoidError::IncompatibleComposition {
                g2: self.label(g2).to_string(),
                g1: self.label(g1).to_string(),
            });
        }
        self.parts
            .table
            .get(&(g2, g1))
            .copied()
            .ok_or_else(|| GroupoidError::MissingComposite {
                g2: self.label(g2).to_string(),
                g1: self.label(g1).to_string(),
            })
    }

    /// Connected component index of every object.
    pub fn components(&self) -> Vec<usize> {
        let m = self.object_count();
        let mut comp: Vec<usize> = (0..m).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for h in &self.parts.morphisms {
            let (a, b) = (find(&mut comp, h.src.0), find(&mut comp, h.dst.0));
            if a != b {
                comp[a.max(b)] = a.min(b);
            }
        }
        (0..m).map(|x| find(&mut comp, x)).collect()
    }

    /// Checks the groupoid axioms exhaustively and lists every violated instance.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let ids: Vec<MorphId> = self.morphism_ids().collect();

        for (x, &id) in self.parts.identities.iter().enumerate() {
            if self.src(id).0 != x || self.dst(id).0 != x {
                report.push(
                    "identity",
                    format!(
                        "identity of {} is not an endomorphism of it",
                        self.parts.objects[x]
                    ),
                );
            }
        }

        for &g1 in &ids {
            for &g2 in &ids {
                let key = (g2, g1);
                match (self.composable(g2, g1), self.parts.table.get(&key)) {
                    (true, None) => report.push(
                        "composition-totality",
                        format!("{} . {} is undefined", self.label(g2), self.label(g1)),
                    ),
                    (false, Some(_)) => report.push(
                        "composition-domain",
                        format!(
                            "{} . {} is defined on an incompatible pair",
                            self.label(g2),
                            self.label(g1)
                        ),
                    ),
                    (true, Some(&c)) => {
                        if self.src(c) != self.src(g1) || self.dst(c) != self.dst(g2) {
                            report.push(
                                "composition-endpoints",
                                format!(
                                    "{} . {} = {} has wrong endpoints",
                                    self.label(g2),
                                    self.label(g1),
                                    self.label(c)
                                ),
                            );
                        }
                    }
                    (false, None) => {}
                }
            }
        }

        for &h in &ids {
            let left = self.parts.table.get(&(self.identity(self.dst(h)), h));
            let right = self.parts.table.get(&(h, self.identity(self.src(h))));
            if left != Some(&h) || right != Some(&h) {
                report.push(
                    "identity",
                    format!("identity law fails for {}", self.label(h)),
                );
            }
        }

        for &h1 in &ids {
            for &h2 in ids.iter().filter(|&&h2| self.composable(h2, h1)) {
                let Some(&h21) = self.parts.table.get(&(h2, h1)) else {
                    continue;
                };
                for &h3 in ids.iter().filter(|&&h3| self.composable(h3, h2)) {
                    let Some(&h32) = self.parts.table.get(&(h3, h2)) else {
                        continue;
                    };
                    let a = self.parts.table.get(&(h3, h21));
                    let b = self.parts.table.get(&(h32, h1));
                    if a != b {
                        report.push(
                            "associativity",
                            format!(
                                "({} . {}) . {} differs",
                                self.label(h3),
                                self.label(h2),
                                self.label(h1)
                            ),
                        );
                    }
                }
            }
        }

        for &h in &ids {
            match self.inverse(h) {
                None => report.push(
                    "inverse-missing",
                    format!("{} has no inverse", self.label(h)),
                ),
                Some(inv) => {
                    let left = self.parts.table.get(&(inv, h));
                    let right = self.parts.table.get(&(h, inv));
                    if left != Some(&self.identity(self.src(h)))
                        || right != Some(&self.identity(self.dst(h)))
                    {
                        report.push(
                            "inverse",
                            format!("{} is not inverse to {}", self.label(inv), self.label(h)),
                        );
                    }
                }
            }
        }
        report
    }
}
