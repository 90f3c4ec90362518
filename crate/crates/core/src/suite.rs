//! The `verify` suite: structural checks of an instance, its chord action,
//! its operators, voicing maps and relations.

use std::fmt;

use serde::Serialize;

use crate::action::Variance;
use crate::chord::{AffineMap, Chord, ExtractedRootLaw, RowOutcome};
use crate::extension::{
    check_action_functor, check_cocycle, check_normalized, verify_extension_axioms,
};
use crate::instance::{parse_relation, Instance, InstanceError};
use crate::packaged::{compile_root_law, PackagedOperator, RootLawEntry, RootLawOperator};
use crate::report::ValidationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub instance: String,
    pub passed: bool,
    pub warnings: usize,
    pub failures: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {}", self.instance)?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Warn => "WARN",
                Status::Fail => "FAIL",
            };
            writeln!(f, "[{tag}] {}: {}", c.name, c.detail)?;
            if let Some(cx) = &c.counterexample {
                writeln!(f, "       counterexample: {cx}")?;
            }
        }
        write!(
            f,
            "{} checks, {} failures, {} warnings: {}",
            self.checks.len(),
            self.failures,
            self.warnings,
            if self.passed { "ok" } else { "FAILED" }
        )
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn push(
        &mut self,
        name: impl Into<String>,
        status: Status,
        detail: impl Into<String>,
        cx: Option<String>,
    ) {
        self.0.push(CheckResult {
            name: name.into(),
            status,
            detail: detail.into(),
            counterexample: cx,
        });
    }

    fn report(&mut self, name: &str, what: &str, report: ValidationReport) {
        if report.is_valid() {
            self.push(name, Status::Pass, what, None);
        } else {
            let first = report
                .violations
                .first()
                .map(|v| format!("[{}] {}", v.rule, v.detail));
            self.push(
                name,
                Status::Fail,
                format!("{} violations", report.violations.len()),
                first,
            );
        }
    }

    /// Pass when `first_failure` is `None`.
    fn expect(&mut self, name: &str, what: String, first_failure: Option<String>) {
        match first_failure {
            None => self.push(name, Status::Pass, what, None),
            Some(cx) => self.push(name, Status::Fail, what, Some(cx)),
        }
    }
}

/// The root law extracted from a map as an operator declaration, if every row classified.
pub fn law_from_extracted(law: &ExtractedRootLaw) -> Option<RootLawOperator> {
    let entries = law
        .rows
        .iter()
        .map(|r| match &r.outcome {
            RowOutcome::Mapped { to, shift } => Some(RootLawEntry {
                from: r.from.clone(),
                to: to.clone(),
                shift: *shift as i64,
            }),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(RootLawOperator { entries })
}

/// Rows of `law` that differ from `declared`, as `X->(Y,s) vs X->(Y',s')`.
pub fn law_differences(
    inst: &Instance,
    declared: &RootLawOperator,
    law: &ExtractedRootLaw,
) -> Vec<String> {
    let n = inst.action().n() as i64;
    let mut out = Vec::new();
    for row in &law.rows {
        let Some(d) = declared.get(row.from.as_str()) else {
            continue;
        };
        let want = (d.to.as_str(), d.shift.rem_euclid(n) as u64);
        match law.mapping(row.from.as_str()) {
            Some((to, shift)) if (to.as_str(), shift) == want => {}
            Some((to, shift)) => out.push(format!(
                "{}->({},{}) from the map, declared {}->({},{})",
                row.from, to, shift, row.from, want.0, want.1
            )),
            None => out.push(format!("{} does not classify under the map", row.from)),
        }
    }
    out
}

/// First chord on which two operators act differently.
fn first_difference(inst: &Instance, a: &PackagedOperator, b: &PackagedOperator) -> Option<String> {
    let (pa, pb) = (inst.permutation(a), inst.permutation(b));
    let reg = inst.action().registry();
    (0..pa.degree())
        .find(|&i| pa.apply(i) != pb.apply(i))
        .map(|i| {
            format!(
                "{} -> {} vs {}",
                reg.chord_at(i),
                reg.chord_at(pa.apply(i)),
                reg.chord_at(pb.apply(i))
            )
        })
}

fn relation_holds(
    inst: &Instance,
    relation: &str,
    lookup: &dyn Fn(&str) -> Result<PackagedOperator, InstanceError>,
) -> Result<Option<String>, InstanceError> {
    let (lhs, rhs) = parse_relation(relation)?;
    let l = inst.evaluate_word_with(&lhs, lookup)?;
    let r = inst.evaluate_word_with(&rhs, lookup)?;
    Ok(if l == r {
        None
    } else {
        Some(first_difference(inst, &l, &r).unwrap_or_else(|| "bundles differ".into()))
    })
}

pub fn verify(inst: &Instance) -> VerifyReport {
    let action = inst.action();
    let ext = inst.extension();
    let shape = ext.shape();
    let reg = action.registry();
    let chords = reg.chords();
    let morphisms: Vec<_> = ext.morphisms().collect();
    let mut checks = Checks(Vec::new());

    checks.report("groupoid", "shape groupoid axioms", shape.validate());
    checks.report(
        "action-functor",
        "multipliers are functorial units",
        check_action_functor(shape, ext.phi()),
    );
    let mut cocycle = check_normalized(shape, ext.zeta());
    cocycle.extend(check_cocycle(shape, ext.phi(), ext.zeta()));
    checks.report("cocycle", "normalized 2-cocycle", cocycle);
    checks.report(
        "extension-axioms",
        &format!(
            "inclusion, projection and unique fiber shifts over {} morphisms",
            morphisms.len()
        ),
        verify_extension_axioms(ext, &ext.canonical_witness()),
    );

    let bijection_failure = chords.iter().find_map(|c| {
        let back = action
            .chord_to_morphism(c)
            .and_then(|g| action.morphism_to_chord(g));
        (back.as_ref() != Ok(c)).then(|| format!("{c} round-trips to {back:?}"))
    });
    let represented = morphisms
        .iter()
        .filter(|&&g| action.morphism_to_chord(g).is_ok())
        .count();
    let bijection_failure = bijection_failure.or_else(|| {
        (represented != chords.len()).then(|| {
            format!(
                "{represented} represented morphisms for {} chords",
                chords.len()
            )
        })
    });
    checks.expect(
        "chord-bijection",
        format!(
            "{} chords <-> {represented} morphisms ({})",
            chords.len(),
            action.variance()
        ),
        bijection_failure,
    );

    let torsor_failure = chords.iter().find_map(|c1| {
        let images: Vec<(usize, Chord)> = morphisms
            .iter()
            .enumerate()
            .filter(|(_, &g)| action.acts_on(g, c1))
            .map(|(i, &g)| (i, action.act(g, c1).unwrap()))
            .collect();
        chords.iter().find_map(|c2| {
            let hits: Vec<usize> = images
                .iter()
                .filter(|(_, im)| im == c2)
                .map(|(i, _)| *i)
                .collect();
            let solved = action.interval(c1, c2).ok();
            let ok = hits.len() == 1 && solved == Some(morphisms[hits[0]]);
            (!ok).then(|| format!("{} morphisms send {c1} to {c2}", hits.len()))
        })
    });
    checks.expect(
        "interval-torsor",
        format!(
            "unique interval for all {} ordered chord pairs",
            chords.len() * chords.len()
        ),
        torsor_failure,
    );

    let functor_failure = chords.iter().find_map(|c| {
        morphisms.iter().find_map(|&g1| {
            morphisms.iter().find_map(|&g2| {
                let g21 = ext.compose(g2, g1).ok()?;
                let lhs = action.act(g21, c).ok()?;
                let rhs = match action.variance() {
                    Variance::Contravariant => action.act(g2, c).and_then(|d| action.act(g1, &d)),
                    Variance::Covariant => action.act(g1, c).and_then(|d| action.act(g2, &d)),
                };
                (rhs.as_ref() != Ok(&lhs))
                    .then(|| format!("{} then {} on {c}", ext.describe(g1), ext.describe(g2)))
            })
        })
    });
    checks.expect(
        "functoriality",
        format!("{} action respects composition", action.variance()),
        functor_failure,
    );

    let endos: Vec<_> = morphisms
        .iter()
        .copied()
        .filter(|&g| ext.src(g) == action.base() && ext.dst(g) == action.base())
        .collect();
    let duality_failure = chords.iter().find_map(|c| {
        morphisms
            .iter()
            .filter(|&&g| action.acts_on(g, c))
            .find_map(|&g| {
                endos.iter().find_map(|&e| {
                    let one = action.act_opposite(e, c).and_then(|d| action.act(g, &d));
                    let two = action.act(g, c).and_then(|d| action.act_opposite(e, &d));
                    (one != two)
                        .then(|| format!("{} and {} on {c}", ext.describe(g), ext.describe(e)))
                })
            })
    });
    checks.expect(
        "left-right-commute",
        format!(
            "action commutes with the {} base endomorphisms acting on the other side",
            endos.len()
        ),
        duality_failure,
    );

    for name in inst.operator_names() {
        let law = inst.root_law(name).expect("declared operator");
        let op = inst.operator(name).expect("declared operator");
        let perm = inst.permutation(&op);
        let n = action.n() as i64;
        let roots: Vec<i64> = match action.variance() {
            Variance::Contravariant => (0..n).collect(),
            Variance::Covariant => vec![0],
        };
        let failure = law.entries.iter().find_map(|e| {
            roots.iter().find_map(|&r| {
                let c = reg.chord(r, e.from.as_str()).ok()?;
                let want = reg.chord(r + e.shift, e.to.as_str()).ok()?;
                let got = reg.chord_at(perm.apply(reg.chord_index(&c)?));
                (got != want).then(|| format!("{c} -> {got}, law gives {want}"))
            })
        });
        let scope = match action.variance() {
            Variance::Contravariant => "at every root",
            Variance::Covariant => "at root 0",
        };
        checks.expect(
            &format!("operator:{name}"),
            format!("{} follows its root law {scope}", op.describe(ext)),
            failure,
        );
    }

    for (name, literal) in &inst.spec().maps {
        let check = format!("map:{name}");
        let map = AffineMap::parse(literal, action.n()).expect("validated on load");
        let law = match reg.root_law_of(&map) {
            Ok(law) => law,
            Err(e) => {
                checks.push(check, Status::Fail, format!("`{literal}`: {e}"), None);
                continue;
            }
        };
        if !law.consistent {
            checks.push(
                check,
                Status::Fail,
                format!("`{literal}` does not induce a root law"),
                None,
            );
            continue;
        }
        let derived = law_from_extracted(&law).expect("consistent laws classify every row");
        let Some(declared) = inst.root_law(name) else {
            checks.push(
                check,
                Status::Pass,
                format!("`{literal}` induces a root law (no declared operator)"),
                None,
            );
            continue;
        };
        let diffs = law_differences(inst, &declared, &law);
        if diffs.is_empty() {
            checks.push(
                check,
                Status::Pass,
                format!("`{literal}` realises the declared root law"),
                None,
            );
            continue;
        }
        let mut detail = format!(
            "`{literal}` disagrees with the declared law: {}",
            diffs.join("; ")
        );
        let derived_op = compile_root_law(action, &derived).ok();
        for relation in inst.spec().relations.iter().filter(|r| mentions(r, name)) {
            let declared_outcome = relation_holds(inst, relation, &|o| inst.operator(o))
                .ok()
                .map(|f| f.is_none());
            let derived_outcome = derived_op.as_ref().and_then(|d| {
                relation_holds(inst, relation, &|o| {
                    if o == name {
                        Ok(d.clone())
                    } else {
                        inst.operator(o)
                    }
                })
                .ok()
                .map(|f| f.is_none())
            });
            let show = |b: Option<bool>| match b {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "cannot be evaluated",
            };
            detail.push_str(&format!(
                "; `{relation}` {} with the declared law and {} with the map's law",
                show(declared_outcome),
                show(derived_outcome)
            ));
        }
        checks.push(check, Status::Warn, detail, None);
    }

    for relation in &inst.spec().relations {
        let check = format!("relation:{relation}");
        match relation_holds(inst, relation, &|o| inst.operator(o)) {
            Ok(None) => checks.push(check, Status::Pass, "holds on all chords", None),
            Ok(Some(cx)) => checks.push(check, Status::Fail, "does not hold", Some(cx)),
            Err(e) => checks.push(check, Status::Fail, e.to_string(), None),
        }
    }

    let checks = checks.0;
    let failures = checks.iter().filter(|c| c.status == Status::Fail).count();
    let warnings = checks.iter().filter(|c| c.status == Status::Warn).count();
    VerifyReport {
        instance: inst.name().to_string(),
        passed: failures == 0,
        warnings,
        failures,
        checks,
    }
}

/// Whether `name` occurs as a factor of `relation`.
fn mentions(relation: &str, name: &str) -> bool {
    relation
        .split(['=', '*'])
        .map(|f| f.split('^').next().unwrap_or("").trim())
        .any(|f| f == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceSpec;

    #[test]
    fn presets_verify_with_one_warning() {
        let report = verify(&Instance::load("MAlphaBeta").unwrap());
        assert!(report.passed, "{report}");
        assert_eq!(report.warnings, 1, "{report}");
        let warn = report.check("map:VL'").unwrap();
        assert_eq!(warn.status, Status::Warn);
        assert!(
            warn.detail
                .contains("M->(alpha,11) from the map, declared M->(alpha,1)"),
            "{}",
            warn.detail
        );
        assert!(warn
            .detail
            .contains("`VL'^21 = T1` holds with the declared law and fails with the map's law"));
        assert_eq!(report.check("map:VL").unwrap().status, Status::Pass);

        let mm = verify(&Instance::load("Mm").unwrap());
        assert!(mm.passed && mm.warnings == 0, "{mm}");
    }

    #[test]
    fn broken_relation_fails_with_counterexample() {
        let mut spec = InstanceSpec::preset("MAlphaBeta").unwrap();
        spec.relations.push("VL^3 = T1".into());
        let report = verify(&Instance::from_spec(spec).unwrap());
        assert!(!report.passed);
        let fail = report.check("relation:VL^3 = T1").unwrap();
        assert_eq!(fail.counterexample.as_deref(), Some("0M -> 11M vs 1M"));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&verify(&Instance::load("MAlphaBeta").unwrap())).unwrap();
        let b = serde_json::to_string(&verify(&Instance::load("MAlphaBeta").unwrap())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relation_mentions() {
        assert!(mentions("VL'^21 = T1", "VL'"));
        assert!(!mentions("VL'^21 = T1", "VL"));
        assert!(mentions("A*B*A = B", "B"));
    }
}
