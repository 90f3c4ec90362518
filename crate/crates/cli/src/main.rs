use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use chordoid::action::ActionError;
use chordoid::chord::{AffineMap, Chord, ExtractedRootLaw, RowOutcome};
use chordoid::dot::export_dot;
use chordoid::group::{analyze_group, cyclic_certificate, Certificate};
use chordoid::suite::{law_differences, law_from_extracted, verify};
use chordoid::{
    dihedral_certificate, enumerate_group_extensions_with, wreath_certificate, ActionFilter,
    Instance, Permutation,
};

#[derive(Parser)]
#[command(
    name = "chordoid",
    version,
    about = "Groupoid extensions acting on chords: verify instances, act, and generate groups"
)]
struct Cli {
    /// Preset name (MAlphaBeta, Mm) or path to a JSON instance file
    #[arg(long, global = true, default_value = "MAlphaBeta")]
    instance: String,
    /// Emit a JSON report on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Report wall-clock time (a separate `timing` field in JSON, stderr otherwise)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite; exits 1 if any check fails
    Verify,
    /// Apply a named operator or a morphism literal such as "(2, h:beta->M)" to a chord
    Act {
        operator: String,
        chord: Option<String>,
        #[arg(long = "chord", conflicts_with = "chord")]
        chord_flag: Option<String>,
    },
    /// The unique morphism relating two chords
    Interval {
        chords: Vec<String>,
        #[arg(long = "chord")]
        chord_flags: Vec<String>,
    },
    /// Orbit of a chord under named operators
    Orbit {
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
        #[arg(long)]
        chord: String,
    },
    /// Generate the group of named operators and certify its structure
    Closure {
        #[arg(long, value_delimiter = ',', required = true)]
        ops: Vec<String>,
    },
    /// Isomorphism classes of extensions of Z_n by Z_m
    EnumerateExtensions {
        n: u64,
        m: u64,
        /// Only the trivial action of Z_m on Z_n
        #[arg(long)]
        trivial_action: bool,
    },
    /// Chord network of named operators in DOT syntax
    ExportDot {
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
        /// Write here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Root law of an affine voicing map such as "z+2,x-1,y-2"
    CheckVoicing {
        map: String,
        /// Compare with this declared operator only
        #[arg(long)]
        name: Option<String>,
    },
    /// Print the instance as a JSON document
    ShowInstance,
}

enum Failure {
    Error(String),
    Partiality(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Error(_) => 1,
            Failure::Partiality(_) => 2,
        }
    }
}

fn fail(e: impl Display) -> Failure {
    Failure::Error(e.to_string())
}

/// What a command produced: a report for stdout and whether it counts as success.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn new(json: impl Serialize, text: impl Into<String>) -> Self {
        Output {
            json: serde_json::to_value(json).expect("reports serialize"),
            text: text.into(),
            ok: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(out) => {
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            if cli.json {
                let doc = if cli.timing {
                    json!({ "report": out.json, "timing": { "elapsed_ms": elapsed } })
                } else {
                    out.json
                };
                emit(&serde_json::to_string_pretty(&doc).expect("reports serialize"));
            } else {
                if !out.text.is_empty() {
                    emit(out.text.trim_end());
                }
                if cli.timing {
                    eprintln!("elapsed: {elapsed:.3} ms");
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            let (Failure::Error(msg) | Failure::Partiality(msg)) = &failure;
            eprintln!("error: {msg}");
            ExitCode::from(failure.code())
        }
    }
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    if let Command::EnumerateExtensions {
        n,
        m,
        trivial_action,
    } = &cli.command
    {
        return enumerate(*n, *m, *trivial_action);
    }
    let inst = Instance::load(&cli.instance).map_err(fail)?;
    match &cli.command {
        Command::Verify => {
            let report = verify(&inst);
            let mut out = Output::new(&report, report.to_string());
            out.ok = report.passed;
            Ok(out)
        }
        Command::Act {
            operator,
            chord,
            chord_flag,
        } => {
            let chord = chord
                .as_ref()
                .or(chord_flag.as_ref())
                .ok_or_else(|| fail("missing chord"))?;
            act(&inst, operator, chord)
        }
        Command::Interval {
            chords,
            chord_flags,
        } => {
            let all: Vec<&String> = chords.iter().chain(chord_flags).collect();
            let [c1, c2] = all.as_slice() else {
                return Err(fail(format!(
                    "interval needs two chords, got {}",
                    all.len()
                )));
            };
            interval(&inst, c1, c2)
        }
        Command::Orbit { ops, chord } => orbit(&inst, ops, chord),
        Command::Closure { ops } => closure(&inst, ops),
        Command::EnumerateExtensions { .. } => unreachable!("handled above"),
        Command::ExportDot { ops, out } => {
            let names: Vec<&str> = ops.iter().map(String::as_str).collect();
            let dot = export_dot(&inst, &names).map_err(fail)?;
            match out {
                Some(path) => {
                    std::fs::write(path, &dot)
                        .map_err(|e| fail(format!("cannot write `{}`: {e}", path.display())))?;
                    let summary = json!({ "out": path.display().to_string(), "operators": ops });
                    Ok(Output::new(summary, format!("wrote {}", path.display())))
                }
                None => Ok(Output::new(json!({ "dot": dot }), dot)),
            }
        }
        Command::CheckVoicing { map, name } => check_voicing(&inst, map, name.as_deref()),
        Command::ShowInstance => {
            let text = inst.spec().to_json();
            Ok(Output::new(inst.spec(), text))
        }
    }
}

fn parse_chord(inst: &Instance, text: &str) -> Result<Chord, Failure> {
    inst.action().registry().parse_chord(text).map_err(fail)
}

fn act(inst: &Instance, operator: &str, chord: &str) -> Result<Output, Failure> {
    let c = parse_chord(inst, chord)?;
    let image = if operator.trim_start().starts_with('(') {
        let g = inst.extension().parse_morphism(operator).map_err(fail)?;
        match inst.action().act(g, &c) {
            Ok(image) => image,
            Err(e @ ActionError::PartialityViolation { .. }) => {
                return Err(Failure::Partiality(e.to_string()))
            }
            Err(e) => return Err(fail(e)),
        }
    } else {
        let op = inst.operator(operator).map_err(fail)?;
        let reg = inst.action().registry();
        let index = reg
            .chord_index(&c)
            .ok_or_else(|| fail(format!("unknown chord `{chord}`")))?;
        reg.chord_at(inst.permutation(&op).apply(index))
    };
    let report =
        json!({ "operator": operator, "chord": c.to_string(), "image": image.to_string() });
    Ok(Output::new(report, image.to_string()))
}

fn interval(inst: &Instance, c1: &str, c2: &str) -> Result<Output, Failure> {
    let (a, b) = (parse_chord(inst, c1)?, parse_chord(inst, c2)?);
    let ext = inst.extension();
    let g = inst.action().interval(&a, &b).map_err(fail)?;
    let text = ext.describe(g);
    let report = json!({
        "from": a.to_string(),
        "to": b.to_string(),
        "morphism": text,
        "shift": g.shift.value(),
        "h": ext.shape().label(g.h),
    });
    Ok(Output::new(report, text))
}

fn permutations(inst: &Instance, ops: &[String]) -> Result<Vec<Permutation>, Failure> {
    ops.iter()
        .map(|name| Ok(inst.permutation(&inst.operator(name).map_err(fail)?)))
        .collect()
}

fn orbit(inst: &Instance, ops: &[String], chord: &str) -> Result<Output, Failure> {
    let c = parse_chord(inst, chord)?;
    let reg = inst.action().registry();
    let perms = permutations(inst, ops)?;
    let start = reg
        .chord_index(&c)
        .ok_or_else(|| fail(format!("unknown chord `{chord}`")))?;
    let mut seen = vec![false; reg.chords().len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for p in &perms {
            let j = p.apply(i);
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    let members: Vec<String> = (0..seen.len())
        .filter(|&i| seen[i])
        .map(|i| reg.chord_at(i).to_string())
        .collect();
    let text = format!("{} chords: {}", members.len(), members.join(" "));
    Ok(Output::new(
        json!({ "chord": c.to_string(), "operators": ops, "orbit": members }),
        text,
    ))
}

#[derive(Serialize)]
struct Certificates {
    cyclic: Certificate,
    dihedral: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    wreath: Option<Certificate>,
}

fn closure(inst: &Instance, ops: &[String]) -> Result<Output, Failure> {
    let names: Vec<&str> = ops.iter().map(String::as_str).collect();
    let group = inst.generate(&names).map_err(fail)?;
    let analysis = analyze_group(&group);
    let n = inst.action().n() as usize;
    let m = inst.spec().objects.len();
    let wreath = analysis.blocks_preserved.then(|| {
        let hints: Vec<Permutation> = inst
            .zero_shift_swaps()
            .iter()
            .map(|(_, op)| inst.permutation(op))
            .collect();
        wreath_certificate(&group, n, m, &hints)
    });
    let certificates = Certificates {
        cyclic: cyclic_certificate(&group),
        dihedral: dihedral_certificate(&group),
        wreath,
    };

    let mut text = format!(
        "group generated by {} on {} chords\n",
        ops.join(", "),
        group.degree()
    );
    text += &format!("order: {}\n", analysis.order);
    text += &format!("abelian: {}\n", analysis.abelian);
    if let Some(f) = &analysis.invariant_factors {
        text += &format!("invariant factors: {f}\n");
    }
    let hist: Vec<String> = analysis
        .element_orders
        .iter()
        .map(|(o, c)| format!("{o}:{c}"))
        .collect();
    text += &format!("element orders: {}\n", hist.join(" "));
    text += &format!(
        "chord-type blocks preserved: {}\n",
        analysis.blocks_preserved
    );
    if let (Some(k), Some(q)) = (&analysis.kernel, &analysis.quotient) {
        let factors = k
            .invariant_factors
            .as_ref()
            .map(|f| format!(", factors {f}"))
            .unwrap_or_default();
        text += &format!(
            "block kernel: order {}, abelian {}{factors}\n",
            k.order, k.abelian
        );
        text += &format!("block image: order {}, abelian {}\n", q.order, q.abelian);
    }
    let mut line = |label: &str, cert: &Certificate| {
        let detail = match cert.failed() {
            Some(c) => format!("{}: {}", c.name, c.detail),
            None => cert
                .clauses
                .last()
                .map(|c| c.detail.clone())
                .unwrap_or_default(),
        };
        text += &format!("{label} certificate: {} ({detail})\n", cert.holds);
    };
    line("cyclic", &certificates.cyclic);
    line("dihedral", &certificates.dihedral);
    if let Some(w) = &certificates.wreath {
        line(&format!("wreath Z_{n} wr S_{m}"), w);
    }
    let report = json!({
        "instance": inst.name(),
        "generators": ops,
        "analysis": analysis,
        "certificates": certificates,
    });
    Ok(Output::new(report, text))
}

fn enumerate(n: u64, m: u64, trivial: bool) -> Result<Output, Failure> {
    let filter = if trivial {
        ActionFilter::TrivialOnly
    } else {
        ActionFilter::All
    };
    let e = enumerate_group_extensions_with(n, m, filter).map_err(fail)?;
    let count = e.classes.len();
    let mut text = format!(
        "extensions of Z_{n} by Z_{m}: {count} class{}\n",
        if count == 1 { "" } else { "es" }
    );
    for (i, c) in e.classes.iter().enumerate() {
        let shape = match &c.key.invariant_factors {
            Some(f) => format!("abelian {f}"),
            None => "nonabelian".to_string(),
        };
        text += &format!(
            "{:>3}. order {}, {shape}, {} involutions; witness action x{}\n",
            i + 1,
            c.key.order,
            c.key.involutions(),
            c.witness.multiplier
        );
    }
    Ok(Output::new(&e, text))
}

fn describe_row(outcome: &RowOutcome) -> String {
    match outcome {
        RowOutcome::Mapped { to, shift } => format!("({to}, {shift})"),
        RowOutcome::Unclassified { image } => format!("unclassified image {image:?}"),
        RowOutcome::Ambiguous { candidates } => format!("ambiguous: {}", candidates.join(", ")),
        RowOutcome::RootDependent => "depends on the root".to_string(),
        RowOutcome::ArityMismatch => "voicing arity differs".to_string(),
    }
}

#[derive(Serialize)]
struct Comparison {
    operator: String,
    matches: bool,
    differences: Vec<String>,
}

fn check_voicing(inst: &Instance, literal: &str, name: Option<&str>) -> Result<Output, Failure> {
    let n = inst.action().n();
    let map = AffineMap::parse(literal, n).map_err(fail)?;
    let law: ExtractedRootLaw = inst.action().registry().root_law_of(&map).map_err(fail)?;
    let names: Vec<String> = match name {
        Some(name) => {
            if inst.root_law(name).is_none() {
                return Err(fail(format!("unknown operator `{name}`")));
            }
            vec![name.to_string()]
        }
        None => inst.operator_names().map(str::to_string).collect(),
    };
    let extracted = law_from_extracted(&law);
    let comparisons: Vec<Comparison> = names
        .into_iter()
        .map(|op| {
            let declared = inst.root_law(&op).expect("declared operator");
            let differences = law_differences(inst, &declared, &law);
            let covers = extracted.as_ref().is_some_and(|e| {
                e.entries.len() == declared.entries.len()
                    && e.entries
                        .iter()
                        .all(|row| declared.get(row.from.as_str()).is_some())
            });
            Comparison {
                operator: op,
                matches: covers && differences.is_empty(),
                differences,
            }
        })
        .collect();

    let mut text = format!("map {} (mod {n}): equivariant\n", map.to_literal());
    for row in &law.rows {
        text += &format!("  {} -> {}\n", row.from, describe_row(&row.outcome));
    }
    let matching: Vec<&str> = comparisons
        .iter()
        .filter(|c| c.matches)
        .map(|c| c.operator.as_str())
        .collect();
    if name.is_none() {
        text += &if matching.is_empty() {
            "matches no declared operator\n".to_string()
        } else {
            format!("matches declared {}\n", matching.join(", "))
        };
    } else {
        for c in &comparisons {
            if c.matches {
                text += &format!("matches declared {}\n", c.operator);
            } else {
                text += &format!("MISMATCH with declared {}\n", c.operator);
                for d in &c.differences {
                    text += &format!("  {d}\n");
                }
            }
        }
    }
    let report = json!({
        "map": map.to_literal(),
        "equivariant": true,
        "root_law": law,
        "comparisons": comparisons,
    });
    Ok(Output::new(report, text))
}
