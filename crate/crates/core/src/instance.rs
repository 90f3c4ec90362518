//! JSON instance files and the two built-in presets.
//!
//! An instance fixes the modulus, the objects and their set classes, the
//! action multipliers and cocycle on the pair groupoid of the objects, the
//! variance and base object of the chord action, and named operators given
//! by root laws. Optional voicing maps and relation words are checked by the
//! verification suite.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{RepresentableAction, Variance};
use crate::chord::{AffineMap, SetClassRegistry};
use crate::extension::{
    ActionFunctor, BaseCategory, ExtensionCategory, ExtensionError, TwoCocycle,
};
use crate::group::{contiguous_blocks, generate_group, GeneratedGroup, GroupError, CLOSURE_BUDGET};
use crate::groupoid::{Groupoid, MorphId, ObjIdx};
use crate::modular::AutMultiplier;
use crate::packaged::{
    compile_root_law, compose_packaged, inverse_packaged, permutation_rep, zero_shift_swap,
    PackagedOperator, RootLawEntry, RootLawOperator,
};
use crate::perm::Permutation;
use crate::report::ValidationReport;

pub const PRESETS: [&str; 2] = ["MAlphaBeta", "Mm"];

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("cannot parse instance: {0}")]
    Parse(String),
    #[error("instance failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("cannot parse relation `{0}`")]
    Relation(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn invalid(rule: &'static str, detail: impl Into<String>) -> InstanceError {
    let mut report = ValidationReport::new();
    report.push(rule, detail);
    InstanceError::Validation(report)
}

fn default_variance() -> Variance {
    Variance::Contravariant
}

/// The on-disk description of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default)]
    pub name: String,
    pub n: u64,
    pub objects: Vec<String>,
    pub set_classes: BTreeMap<String, Vec<i64>>,
    /// `"X->Y"` to a unit multiplier; unlisted morphisms act by 1.
    #[serde(default)]
    pub phi: BTreeMap<String, i64>,
    /// `"h2|h1"` to a shift, with `h` written `X->Y` or as a label (`h:X->Y`, `id:X`).
    #[serde(default)]
    pub zeta: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_object: Option<String>,
    #[serde(default = "default_variance")]
    pub variance: Variance,
    #[serde(default)]
    pub operators: BTreeMap<String, Vec<RootLawEntry>>,
    /// Voicing-map literals, keyed by the operator they are meant to realise.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, String>,
    /// Words such as `VL^3 = T1^-1` or `A*B*A = B*A*B`, checked by `verify`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

fn law(entries: &[(&str, &str, i64)]) -> Vec<RootLawEntry> {
    RootLawOperator::new(entries).entries
}

impl InstanceSpec {
    pub fn preset(name: &str) -> Option<InstanceSpec> {
        match name {
            "MAlphaBeta" => Some(Self::m_alpha_beta()),
            "Mm" => Some(Self::major_minor()),
            _ => None,
        }
    }

    fn m_alpha_beta() -> InstanceSpec {
        let objects = ["M", "alpha", "beta"];
        let phi = ["M->alpha", "alpha->M", "M->beta", "beta->M"]
            .iter()
            .map(|k| (k.to_string(), 5))
            .collect();
        let mut operators = BTreeMap::new();
        operators.insert(
            "VL".into(),
            law(&[("M", "alpha", -3), ("alpha", "beta", -5), ("beta", "M", -5)]),
        );
        operators.insert(
            "VL'".into(),
            law(&[("M", "alpha", 1), ("alpha", "beta", -3), ("beta", "M", -3)]),
        );
        operators.insert(
            "I_Malpha".into(),
            law(&[("M", "alpha", 0), ("alpha", "M", 0), ("beta", "beta", 0)]),
        );
        operators.insert(
            "I_Mbeta".into(),
            law(&[("M", "beta", 2), ("beta", "M", -2), ("alpha", "alpha", 0)]),
        );
        operators.insert(
            "I_alphabeta".into(),
            law(&[("alpha", "beta", -2), ("beta", "alpha", 2), ("M", "M", 0)]),
        );
        operators.insert(
            "T1".into(),
            law(&[("M", "M", 1), ("alpha", "alpha", 1), ("beta", "beta", 1)]),
        );
        operators.insert(
            "T_M".into(),
            law(&[("M", "M", 1), ("alpha", "alpha", 0), ("beta", "beta", 0)]),
        );
        operators.insert(
            "T_alpha".into(),
            law(&[("M", "M", 0), ("alpha", "alpha", 1), ("beta", "beta", 0)]),
        );
        operators.insert(
            "T_beta".into(),
            law(&[("M", "M", 0), ("alpha", "alpha", 0), ("beta", "beta", 1)]),
        );
        let maps = [
            ("VL", "z+2,x-1,y-2"),
            ("VL'", "z+4,x+1,y"),
            ("I_Malpha", "x,(2x-3)-y,(2x-3)-z"),
            ("I_Mbeta", "(2z+4)-y,(2z+4)-x,z"),
            ("I_alphabeta", "(2y-1)-z,y,(2y-1)-x"),
        ];
        let relations = [
            "VL^3 = T1^-1",
            "VL'^21 = T1",
            "T1*VL = VL*T1",
            "I_Malpha^2 = id",
            "I_Mbeta^2 = id",
            "I_alphabeta^2 = id",
            "I_Malpha*I_alphabeta*I_Malpha = I_alphabeta*I_Malpha*I_alphabeta",
            "T_M*T_alpha*T_beta = T1",
        ];
        InstanceSpec {
            name: "MAlphaBeta".into(),
            n: 12,
            objects: objects.iter().map(|s| s.to_string()).collect(),
            set_classes: [
                ("M", vec![0, 4, 7]),
                ("alpha", vec![0, 2, 5]),
                ("beta", vec![0, 4, 5]),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
            phi,
            zeta: BTreeMap::new(),
            base_object: Some("M".into()),
            variance: Variance::Contravariant,
            operators,
            maps: maps
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn major_minor() -> InstanceSpec {
        let mut operators = BTreeMap::new();
        operators.insert("T1".into(), law(&[("M", "M", 1), ("m", "m", 1)]));
        operators.insert("T_M".into(), law(&[("M", "M", 1), ("m", "m", 0)]));
        operators.insert("T_m".into(), law(&[("M", "M", 0), ("m", "m", 1)]));
        operators.insert("I0".into(), law(&[("M", "m", 0), ("m", "M", 0)]));
        let relations = [
            "I0^2 = id",
            "I0*T1*I0 = T1^-1",
            "T1^12 = id",
            "T_M*T_m = T1",
            "I0*T_M*I0 = T_m^-1",
        ];
        InstanceSpec {
            name: "Mm".into(),
            n: 12,
            objects: vec!["M".into(), "m".into()],
            set_classes: [("M", vec![0, 4, 7]), ("m", vec![0, 3, 7])]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            phi: [("M->m".to_string(), 11), ("m->M".to_string(), 11)]
                .into_iter()
                .collect(),
            zeta: BTreeMap::new(),
            base_object: Some("M".into()),
            variance: Variance::Covariant,
            operators,
            maps: BTreeMap::new(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs serialize")
    }
}

/// A validated instance with its action and compiled operators.
#[derive(Clone, Debug)]
pub struct Instance {
    spec: InstanceSpec,
    action: RepresentableAction,
    operators: BTreeMap<String, PackagedOperator>,
}

/// Resolves `X->Y`, `h:X->Y` or `id:X` to a shape morphism.
fn resolve_morphism(shape: &Groupoid, text: &str) -> Option<MorphId> {
    let text = text.trim();
    if let Some(h) = shape.by_label(text) {
        return Some(h);
    }
    let (x, y) = text.split_once("->")?;
    shape.between(shape.object_index(x.trim())?, shape.object_index(y.trim())?)
}

impl Instance {
    /// A preset name, otherwise a path to a JSON instance file.
    pub fn load(source: &str) -> Result<Self, InstanceError> {
        if let Some(spec) = InstanceSpec::preset(source) {
            return Self::from_spec(spec);
        }
        let text = std::fs::read_to_string(Path::new(source)).map_err(|e| InstanceError::Io {
            path: source.to_string(),
            message: e.to_string(),
        })?;
        Self::from_spec(InstanceSpec::from_json(&text)?)
    }

    pub fn from_spec(spec: InstanceSpec) -> Result<Self, InstanceError> {
        let n = spec.n;
        if n == 0 {
            return Err(invalid("declaration", "n must be positive"));
        }
        let names: Vec<&str> = spec.objects.iter().map(String::as_str).collect();
        let shape = Groupoid::pair(&names).map_err(|e| invalid("declaration", e.to_string()))?;

        for key in spec.set_classes.keys() {
            if !spec.objects.contains(key) {
                return Err(invalid(
                    "declaration",
                    format!("set class `{key}` is not a declared object"),
                ));
            }
        }
        let mut classes = Vec::new();
        for obj in &spec.objects {
            let offsets = spec.set_classes.get(obj).ok_or_else(|| {
                invalid("declaration", format!("object `{obj}` has no set class"))
            })?;
            classes.push((obj.as_str(), offsets.clone()));
        }
        let registry =
            SetClassRegistry::new(n, &classes).map_err(|e| invalid("set-class", e.to_string()))?;

        let mut multipliers: Vec<Option<AutMultiplier>> = vec![None; shape.morphism_count()];
        for (key, &k) in &spec.phi {
            let h = resolve_morphism(&shape, key).ok_or_else(|| {
                invalid("declaration", format!("phi key `{key}` names no morphism"))
            })?;
            let mult = AutMultiplier::from_signed(k, n)
                .map_err(|e| invalid("action-unit", format!("{key}: {e}")))?;
            multipliers[h.0] = Some(mult);
        }
        let phi = ActionFunctor::new(
            multipliers
                .into_iter()
                .map(|m| m.unwrap_or_else(|| AutMultiplier::identity(n)))
                .collect(),
        );

        let mut zeta = TwoCocycle::zero(n);
        for (key, &v) in &spec.zeta {
            let (a, b) = key.split_once('|').ok_or_else(|| {
                invalid("declaration", format!("zeta key `{key}` must be `h2|h1`"))
            })?;
            let h2 = resolve_morphism(&shape, a).ok_or_else(|| {
                invalid("declaration", format!("zeta key `{key}` names no morphism"))
            })?;
            let h1 = resolve_morphism(&shape, b).ok_or_else(|| {
                invalid("declaration", format!("zeta key `{key}` names no morphism"))
            })?;
            if !shape.composable(h2, h1) {
                return Err(invalid(
                    "cocycle-domain",
                    format!("zeta key `{key}` is not a composable pair"),
                ));
            }
            zeta.set(h2, h1, v);
        }

        let base = BaseCategory::uniform(shape.objects().to_vec(), n)
            .map_err(|e| invalid("declaration", e.to_string()))?;
        let ext = ExtensionCategory::build(base, shape, phi, zeta).map_err(|e| match e {
            ExtensionError::InvalidAction(r) | ExtensionError::InvalidCocycle(r) => {
                InstanceError::Validation(r)
            }
            other => invalid("extension", other.to_string()),
        })?;
        let action =
            RepresentableAction::new(ext, registry, spec.base_object.as_deref(), spec.variance)
                .map_err(|e| invalid("action", e.to_string()))?;

        let mut operators = BTreeMap::new();
        for (name, entries) in &spec.operators {
            if name == "id" {
                return Err(invalid(
                    "declaration",
                    "`id` is reserved for the identity operator",
                ));
            }
            let law = RootLawOperator {
                entries: entries.clone(),
            };
            let op = compile_root_law(&action, &law)
                .map_err(|e| invalid("operator", format!("{name}: {e}")))?;
            operators.insert(name.clone(), op);
        }
        for (name, literal) in &spec.maps {
            AffineMap::parse(literal, n).map_err(|e| invalid("map", format!("{name}: {e}")))?;
        }
        for relation in &spec.relations {
            parse_relation(relation)?;
        }
        Ok(Instance {
            spec,
            action,
            operators,
        })
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn action(&self) -> &RepresentableAction {
        &self.action
    }

    pub fn extension(&self) -> &ExtensionCategory {
        self.action.extension()
    }

    pub fn operator_names(&self) -> impl Iterator<Item = &str> {
        self.operators.keys().map(String::as_str)
    }

    pub fn root_law(&self, name: &str) -> Option<RootLawOperator> {
        self.spec
            .operators
            .get(name)
            .map(|e| RootLawOperator { entries: e.clone() })
    }

    /// A named operator; `id` is the identity bundle.
    pub fn operator(&self, name: &str) -> Result<PackagedOperator, InstanceError> {
        if name == "id" {
            return Ok(PackagedOperator::identity(self.extension()));
        }
        self.operators
            .get(name)
            .cloned()
            .ok_or_else(|| InstanceError::UnknownOperator(name.to_string()))
    }

    pub fn permutation(&self, op: &PackagedOperator) -> Permutation {
        permutation_rep(&self.action, op)
    }

    /// Zero-shift swaps of every pair of objects, named `swap:X,Y`.
    pub fn zero_shift_swaps(&self) -> Vec<(String, PackagedOperator)> {
        let ext = self.extension();
        let objs = ext.shape().objects();
        let mut out = Vec::new();
        for x in 0..objs.len() {
            for y in x + 1..objs.len() {
                let name = format!("swap:{},{}", objs[x], objs[y]);
                out.push((name, zero_shift_swap(ext, ObjIdx(x), ObjIdx(y))));
            }
        }
        out
    }

    /// Closure of named operators acting on all chords, blocks by chord type.
    pub fn generate(&self, names: &[&str]) -> Result<GeneratedGroup, InstanceError> {
        let gens = names
            .iter()
            .map(|&name| Ok((name.to_string(), self.permutation(&self.operator(name)?))))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        self.generate_from(gens)
    }

    pub fn generate_from(
        &self,
        gens: Vec<(String, Permutation)>,
    ) -> Result<GeneratedGroup, InstanceError> {
        let n = self.action.n() as usize;
        let degree = n * self.spec.objects.len();
        Ok(generate_group(
            degree,
            contiguous_blocks(degree, n),
            gens,
            CLOSURE_BUDGET,
        )?)
    }

    /// Evaluates a word such as `VL^3*T1^-2` as a packaged composite,
    /// resolving names with `lookup`.
    pub fn evaluate_word_with(
        &self,
        word: &str,
        lookup: &dyn Fn(&str) -> Result<PackagedOperator, InstanceError>,
    ) -> Result<PackagedOperator, InstanceError> {
        let ext = self.extension();
        let mut acc = PackagedOperator::identity(ext);
        for (name, power) in parse_word(word)? {
            let op = lookup(&name)?;
            let base = if power < 0 {
                inverse_packaged(ext, &op)
            } else {
                op
            };
            for _ in 0..power.unsigned_abs() {
                acc = compose_packaged(ext, &acc, &base);
            }
        }
        Ok(acc)
    }

    pub fn evaluate_word(&self, word: &str) -> Result<PackagedOperator, InstanceError> {
        self.evaluate_word_with(word, &|name| self.operator(name))
    }
}

/// `NAME` or `NAME^k` factors joined by `*`; `id` is the empty word.
pub fn parse_word(word: &str) -> Result<Vec<(String, i64)>, InstanceError> {
    let bad = || InstanceError::Relation(word.to_string());
    let mut out = Vec::new();
    for factor in word.split('*') {
        let factor = factor.trim();
        let (name, power) = match factor.split_once('^') {
            Some((name, p)) => (name.trim(), p.trim().parse::<i64>().map_err(|_| bad())?),
            None => (factor, 1),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(bad());
        }
        if name != "id" {
            out.push((name.to_string(), power));
        }
    }
    Ok(out)
}

/// Splits `lhs = rhs`.
pub fn parse_relation(relation: &str) -> Result<(String, String), InstanceError> {
    let (lhs, rhs) = relation
        .split_once('=')
        .ok_or_else(|| InstanceError::Relation(relation.to_string()))?;
    parse_word(lhs)?;
    parse_word(rhs)?;
    Ok((lhs.trim().to_string(), rhs.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::GMorphism;

    fn table(ext: &ExtensionCategory) -> Vec<(GMorphism, GMorphism, Option<GMorphism>)> {
        let all: Vec<_> = ext.morphisms().collect();
        let mut out = Vec::new();
        for &a in &all {
            for &b in &all {
                out.push((a, b, ext.compose(a, b).ok()));
            }
        }
        out
    }

    #[test]
    fn presets_load() {
        let a = Instance::load("MAlphaBeta").unwrap();
        assert_eq!(a.action().n(), 12);
        assert_eq!(a.extension().shape().object_count(), 3);
        assert_eq!(a.extension().morphism_count(), 108);
        assert!(a.extension().zeta().is_zero());
        for name in [
            "VL",
            "VL'",
            "I_Malpha",
            "I_Mbeta",
            "I_alphabeta",
            "T1",
            "T_M",
        ] {
            a.operator(name).unwrap();
        }
        let m = Instance::load("Mm").unwrap();
        assert_eq!(m.action().variance(), Variance::Covariant);
        assert_eq!(m.zero_shift_swaps()[0].1, m.operator("I0").unwrap());
        assert!(matches!(
            m.operator("VL"),
            Err(InstanceError::UnknownOperator(_))
        ));
    }

    #[test]
    fn non_functorial_phi_is_rejected() {
        let mut spec = InstanceSpec::preset("MAlphaBeta").unwrap();
        spec.phi.insert("alpha->beta".into(), 5);
        match Instance::from_spec(spec) {
            Err(InstanceError::Validation(r)) => assert!(r.cites("action-functoriality"), "{r}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_instances_are_rejected() {
        assert!(matches!(
            InstanceSpec::from_json("{"),
            Err(InstanceError::Parse(_))
        ));
        assert!(matches!(
            Instance::load("/nonexistent/instance.json"),
            Err(InstanceError::Io { .. })
        ));
        let mut spec = InstanceSpec::preset("MAlphaBeta").unwrap();
        spec.operators.get_mut("VL").unwrap()[0].to = "beta".into();
        assert!(matches!(
            Instance::from_spec(spec),
            Err(InstanceError::Validation(_))
        ));
        let mut spec = InstanceSpec::preset("Mm").unwrap();
        spec.zeta.insert("M->m|M->m".into(), 1);
        assert!(matches!(
            Instance::from_spec(spec),
            Err(InstanceError::Validation(_))
        ));
        let mut spec = InstanceSpec::preset("Mm").unwrap();
        spec.phi.insert("M->m".into(), 2);
        assert!(
            matches!(Instance::from_spec(spec), Err(InstanceError::Validation(r)) if r.cites("action-unit"))
        );
    }

    #[test]
    fn negative_shifts_are_normalized() {
        let a = Instance::load("MAlphaBeta").unwrap();
        let mut spec = a.spec().clone();
        spec.operators.get_mut("VL").unwrap()[0].shift = 9;
        let b = Instance::from_spec(spec).unwrap();
        assert_eq!(a.operator("VL").unwrap(), b.operator("VL").unwrap());
    }

    #[test]
    fn round_trip_preserves_morphism_tables() {
        for preset in PRESETS {
            let a = Instance::load(preset).unwrap();
            let json = a.spec().to_json();
            let b = Instance::from_spec(InstanceSpec::from_json(&json).unwrap()).unwrap();
            assert_eq!(a.spec(), b.spec());
            assert_eq!(table(a.extension()), table(b.extension()));
            for name in a.operator_names() {
                assert_eq!(a.operator(name).unwrap(), b.operator(name).unwrap());
            }
        }
    }

    #[test]
    fn cocycle_keys_accept_labels_and_shorthand() {
        let mut spec = InstanceSpec::preset("Mm").unwrap();
        spec.phi.clear();
        // a coboundary of c(h:M->m) = 1, c(h:m->M) = 0
        spec.zeta.insert("m->M|M->m".into(), 1);
        spec.zeta.insert("h:M->m|h:m->M".into(), 1);
        let inst = Instance::from_spec(spec).unwrap();
        assert!(!inst.extension().zeta().is_zero());
    }

    #[test]
    fn words_and_relations() {
        let a = Instance::load("MAlphaBeta").unwrap();
        assert_eq!(parse_word("VL'^21").unwrap(), vec![("VL'".to_string(), 21)]);
        assert_eq!(parse_word("id").unwrap(), vec![]);
        assert!(parse_word("VL^x").is_err());
        assert!(parse_relation("VL").is_err());
        let vl3 = a.evaluate_word("VL^3").unwrap();
        assert_eq!(vl3, a.evaluate_word("T1^-1").unwrap());
        assert_eq!(
            a.evaluate_word("VL*VL^-1").unwrap(),
            a.operator("id").unwrap()
        );
    }
}
