//! Set classes with roots, chords `n_t`, voicings, and affine voicing maps.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::groupoid::ObjectId;
use crate::modular::{add_mod, mul_mod, reduce_signed, sub_mod, Residue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordError {
    #[error("unknown chord type `{0}`")]
    UnknownType(String),
    #[error("duplicate set class `{0}`")]
    DuplicateType(String),
    #[error("set class `{0}` must start at 0 with strictly increasing offsets below n")]
    InvalidOffsets(String),
    #[error("cannot parse chord `{0}`")]
    ParseChord(String),
    #[error("map of arity {map} applied to a voicing of length {voicing}")]
    DimensionMismatch { map: usize, voicing: usize },
    #[error("affine map must be square with one constant per row")]
    NotSquare,
    #[error("map is not transposition-equivariant (row {0} does not sum to 1)")]
    NotEquivariant(usize),
    #[error("cannot parse map literal: {0}")]
    ParseMap(String),
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// A chord type given by offsets from its root, e.g. `M = [0, 4, 7]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetClass {
    pub name: ObjectId,
    offsets: Vec<u64>,
}

impl SetClass {
    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn cardinality(&self) -> usize {
        self.offsets.len()
    }
}

/// The chord `root_kind`, written `<root><kind>` as in `0M` or `9alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Chord {
    pub root: Residue,
    pub kind: ObjectId,
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.root.value(), self.kind)
    }
}

/// An ordered pitch-class realisation `(x, y, z, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Voicing(pub Vec<u64>);

/// Registered set classes over `Z_n`, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetClassRegistry {
    n: u64,
    classes: Vec<SetClass>,
}

impl SetClassRegistry {
    pub fn new<S: AsRef<str>>(n: u64, classes: &[(S, Vec<i64>)]) -> Result<Self, ChordError> {
        if n == 0 {
            return Err(ChordError::ZeroModulus);
        }
        let mut out: Vec<SetClass> = Vec::new();
        for (name, offsets) in classes {
            let name = name.as_ref();
            if name.is_empty() || name.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(ChordError::InvalidOffsets(name.to_string()));
            }
            if out.iter().any(|c| c.name.as_str() == name) {
                return Err(ChordError::DuplicateType(name.to_string()));
            }
            let reduced: Vec<u64> = offsets.iter().map(|&o| reduce_signed(o, n)).collect();
            let ok = reduced.first() == Some(&0) && reduced.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(ChordError::InvalidOffsets(name.to_string()));
            }
            out.push(SetClass {
                name: ObjectId::new(name),
                offsets: reduced,
            });
        }
        Ok(SetClassRegistry { n, classes: out })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn classes(&self) -> &[SetClass] {
        &self.classes
    }

    pub fn index_of(&self, kind: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name.as_str() == kind)
    }

    pub fn get(&self, kind: &str) -> Result<&SetClass, ChordError> {
        self.classes
            .iter()
            .find(|c| c.name.as_str() == kind)
            .ok_or_else(|| ChordError::UnknownType(kind.to_string()))
    }

    pub fn chord(&self, root: i64, kind: &str) -> Result<Chord, ChordError> {
        let class = self.get(kind)?;
        Ok(Chord {
            root: Residue::from_signed(root, self.n).unwrap(),
            kind: class.name.clone(),
        })
    }

    /// All chords, types in declaration order and roots ascending.
    pub fn chords(&self) -> Vec<Chord> {
        self.classes
            .iter()
            .flat_map(|c| {
                (0..self.n).map(move |r| Chord {
                    root: Residue::new(r, self.n).unwrap(),
                    kind: c.name.clone(),
                })
            })
            .collect()
    }

    /// Position of a chord in [`chords`](Self::chords).
    pub fn chord_index(&self, chord: &Chord) -> Option<usize> {
        let t = self.index_of(chord.kind.as_str())?;
        Some(t * self.n as usize + chord.root.value() as usize)
    }

    pub fn chord_at(&self, index: usize) -> Chord {
        let n = self.n as usize;
        Chord {
            root: Residue::new((index % n) as u64, self.n).unwrap(),
            kind: self.classes[index / n].name.clone(),
        }
    }

    /// Parses `<decimal root><type name>`; the root must lie in `[0, n)`.
    pub fn parse_chord(&self, text: &str) -> Result<Chord, ChordError> {
        let split = text
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(text.len());
        let (digits, kind) = text.split_at(split);
        if digits.is_empty() || kind.is_empty() {
            return Err(ChordError::ParseChord(text.to_string()));
        }
        let root: u64 = digits
            .parse()
            .map_err(|_| ChordError::ParseChord(text.to_string()))?;
        if root >= self.n {
            return Err(ChordError::ParseChord(text.to_string()));
        }
        let class = self.get(kind)?;
        Ok(Chord {
            root: Residue::new(root, self.n).unwrap(),
            kind: class.name.clone(),
        })
    }

    pub fn realize(&self, chord: &Chord) -> Result<BTreeSet<u64>, ChordError> {
        Ok(self.canonical_voicing(chord)?.0.into_iter().collect())
    }

    /// Every chord whose pitch-class set equals `pcs`.
    pub fn classify(&self, pcs: &BTreeSet<u64>) -> Vec<Chord> {
        let mut out = Vec::new();
        for class in &self.classes {
            if class.cardinality() != pcs.len() {
                continue;
            }
            for r in 0..self.n {
                let set: BTreeSet<u64> = class
                    .offsets
                    .iter()
                    .map(|&o| add_mod(r, o, self.n))
                    .collect();
                if &set == pcs {
                    out.push(Chord {
                        root: Residue::new(r, self.n).unwrap(),
                        kind: class.name.clone(),
                    });
                }
            }
        }
        out
    }

    /// Root-position voicing `(root + o_0, root + o_1, ...)`.
    pub fn canonical_voicing(&self, chord: &Chord) -> Result<Voicing, ChordError> {
        let class = self.get(chord.kind.as_str())?;
        Ok(Voicing(
            class
                .offsets
                .iter()
                .map(|&o| add_mod(chord.root.value(), o, self.n))
                .collect(),
        ))
    }

    /// The root law induced by an equivariant voicing map.
    ///
    /// Each type is evaluated at root 0 and the result is then checked at
    /// every other root.
    pub fn root_law_of(&self, map: &AffineMap) -> Result<ExtractedRootLaw, ChordError> {
        if let Some(row) = map.non_equivariant_row() {
            return Err(ChordError::NotEquivariant(row));
        }
        let mut rows = Vec::new();
        for class in &self.classes {
            let from = class.name.clone();
            let origin = Chord {
                root: Residue::zero(self.n),
                kind: from.clone(),
            };
            let voicing = self.canonical_voicing(&origin)?;
            let outcome = match map.apply(&voicing) {
                Err(_) => RowOutcome::ArityMismatch,
                Ok(image) => {
                    let hits = self.classify(&image.0.iter().copied().collect());
                    match hits.as_slice() {
                        [] => RowOutcome::Unclassified { image: image.0 },
                        [c] => {
                            let shift = c.root.value();
                            let all_roots = (0..self.n).all(|r| {
                                let chord = Chord {
                                    root: Residue::new(r, self.n).unwrap(),
                                    kind: from.clone(),
                                };
                                let img =
                                    map.apply(&self.canonical_voicing(&chord).unwrap()).unwrap();
                                let want = Chord {
                                    root: Residue::new(add_mod(r, shift, self.n), self.n).unwrap(),
                                    kind: c.kind.clone(),
                                };
                                self.classify(&img.0.into_iter().collect()) == vec![want]
                            });
                            if all_roots {
                                RowOutcome::Mapped {
                                    to: c.kind.clone(),
                                    shift,
                                }
                            } else {
                                RowOutcome::RootDependent
                            }
                        }
                        many => RowOutcome::Ambiguous {
                            candidates: many.iter().map(Chord::to_string).collect(),
                        },
                    }
                }
            };
            rows.push(RootLawRow { from, outcome });
        }
        let consistent = rows
            .iter()
            .all(|r| matches!(r.outcome, RowOutcome::Mapped { .. }));
        Ok(ExtractedRootLaw { rows, consistent })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RowOutcome {
    /// `n_from -> (n + shift)_to` for every root.
    Mapped {
        to: ObjectId,
        shift: u64,
    },
    Unclassified {
        image: Vec<u64>,
    },
    Ambiguous {
        candidates: Vec<String>,
    },
    RootDependent,
    ArityMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootLawRow {
    pub from: ObjectId,
    #[serde(flatten)]
    pub outcome: RowOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractedRootLaw {
    pub rows: Vec<RootLawRow>,
    pub consistent: bool,
}

impl ExtractedRootLaw {
    pub fn mapping(&self, from: &str) -> Option<(&ObjectId, u64)> {
        self.rows
            .iter()
            .find(|r| r.from.as_str() == from)
            .and_then(|r| match &r.outcome {
                RowOutcome::Mapped { to, shift } => Some((to, *shift)),
                _ => None,
            })
    }
}

/// `output_i = sum_j matrix[i][j] * input_j + constant[i] (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    n: u64,
    matrix: Vec<Vec<u64>>,
    constant: Vec<u64>,
}

impl AffineMap {
    pub fn new(n: u64, matrix: Vec<Vec<i64>>, constant: Vec<i64>) -> Result<Self, ChordError> {
        if n == 0 {
            return Err(ChordError::ZeroModulus);
        }
        let k = matrix.len();
        if constant.len() != k || matrix.iter().any(|r| r.len() != k) {
            return Err(ChordError::NotSquare);
        }
        Ok(AffineMap {
            n,
            matrix: matrix
                .iter()
                .map(|r| r.iter().map(|&v| reduce_signed(v, n)).collect())
                .collect(),
            constant: constant.iter().map(|&v| reduce_signed(v, n)).collect(),
        })
    }

    pub fn identity(n: u64, arity: usize) -> Self {
        let matrix = (0..arity)
            .map(|i| (0..arity).map(|j| i64::from(i == j)).collect())
            .collect();
        AffineMap::new(n, matrix, vec![0; arity]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn constant(&self) -> &[u64] {
        &self.constant
    }

    pub fn apply(&self, v: &Voicing) -> Result<Voicing, ChordError> {
        if v.0.len() != self.arity() {
            return Err(ChordError::DimensionMismatch {
                map: self.arity(),
                voicing: v.0.len(),
            });
        }
        let n = self.n;
        Ok(Voicing(
            self.matrix
                .iter()
                .zip(&self.constant)
                .map(|(row, &c)| {
                    row.iter()
                        .zip(&v.0)
                        .fold(c, |acc, (&a, &x)| add_mod(acc, mul_mod(a, x, n), n))
                })
                .collect(),
        ))
    }

    /// True iff every row sums to 1, i.e. the map commutes with transposition.
    pub fn is_equivariant(&self) -> bool {
        self.non_equivariant_row().is_none()
    }

    fn non_equivariant_row(&self) -> Option<usize> {
        self.matrix
            .iter()
            .position(|row| row.iter().fold(0, |s, &a| add_mod(s, a, self.n)) != 1 % self.n)
    }

    /// Parses `expr,expr,...`, one affine expression per output coordinate.
    ///
    /// Coordinates are `x, y, z, w` (first four) or `v1, v2, ...`. Expressions
    /// accept integers, `+`, `-`, `*`, parentheses and implicit products such as
    /// `2x` or `2(x+1)`.
    pub fn parse(text: &str, n: u64) -> Result<Self, ChordError> {
        let parts: Vec<&str> = text.split(',').collect();
        let arity = parts.len();
        let mut matrix = Vec::with_capacity(arity);
        let mut constant = Vec::with_capacity(arity);
        for part in parts {
            let form = LinearParser::new(part, arity)?.parse_all()?;
            matrix.push(form.coeffs);
            constant.push(form.constant);
        }
        AffineMap::new(n, matrix, constant)
    }

    /// Renders the map back to the literal grammar.
    pub fn to_literal(&self) -> String {
        let names = |j: usize| -> String {
            match (self.arity() <= 4, j) {
                (true, 0) => "x".into(),
                (true, 1) => "y".into(),
                (true, 2) => "z".into(),
                (true, 3) => "w".into(),
                _ => format!("v{}", j + 1),
            }
        };
        self.matrix
            .iter()
            .zip(&self.constant)
            .map(|(row, &c)| {
                let mut s = String::new();
                for (j, &a) in row.iter().enumerate().filter(|(_, &a)| a != 0) {
                    if !s.is_empty() {
                        s.push('+');
                    }
                    if a != 1 {
                        s.push_str(&format!("{a}*"));
                    }
                    s.push_str(&names(j));
                }
                if c != 0 || s.is_empty() {
                    if !s.is_empty() {
                        s.push('+');
                    }
                    s.push_str(&c.to_string());
                }
                s
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct LinearForm {
    coeffs: Vec<i64>,
    constant: i64,
}

impl LinearForm {
    fn constant(arity: usize, c: i64) -> Self {
        LinearForm {
            coeffs: vec![0; arity],
            constant: c,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn scaled(mut self, k: i64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= k);
        self.constant *= k;
        self
    }

    fn plus(mut self, other: LinearForm, sign: i64) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs) {
            *a += sign * b;
        }
        self.constant += sign * other.constant;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

struct LinearParser {
    tokens: Vec<Token>,
    pos: usize,
    arity: usize,
}

impl LinearParser {
    fn new(text: &str, arity: usize) -> Result<Self, ChordError> {
        let err = |m: String| ChordError::ParseMap(m);
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' | '\t' => i += 1,
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1
                }
                '-' => {
                    tokens.push(Token::Minus);
                    i += 1
                }
                '*' => {
                    tokens.push(Token::Star);
                    i += 1
                }
                '(' => {
                    tokens.push(Token::Open);
                    i += 1
                }
                ')' => {
                    tokens.push(Token::Close);
                    i += 1
                }
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    tokens.push(Token::Num(
                        s.parse().map_err(|_| err(format!("bad number {s}")))?,
                    ));
                }
                'v' => {
                    let start = i + 1;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let idx: usize = s
                        .parse()
                        .map_err(|_| err("expected index after v".into()))?;
                    if idx == 0 || idx > arity {
                        return Err(err(format!(
                            "coordinate v{idx} out of range for arity {arity}"
                        )));
                    }
                    tokens.push(Token::Var(idx - 1));
                }
                'x' | 'y' | 'z' | 'w' => {
                    let idx = "xyzw".find(c).unwrap();
                    if idx >= arity {
                        return Err(err(format!(
                            "coordinate {c} out of range for arity {arity}"
                        )));
                    }
                    tokens.push(Token::Var(idx));
                    i += 1;
                }
                other => return Err(err(format!("unexpected character `{other}`"))),
            }
        }
        Ok(LinearParser {
            tokens,
            pos: 0,
            arity,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn parse_all(mut self) -> Result<LinearForm, ChordError> {
        if self.tokens.is_empty() {
            return Err(ChordError::ParseMap("empty expression".into()));
        }
        let form = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(ChordError::ParseMap(format!(
                "trailing input at token {}",
                self.pos
            )));
        }
        Ok(form)
    }

    fn expr(&mut self) -> Result<LinearForm, ChordError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.plus(self.term()?, 1);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.plus(self.term()?, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinearForm, ChordError> {
        let mut acc = self.unary()?;
        loop {
            let implicit = matches!(
                self.peek(),
                Some(Token::Var(_)) | Some(Token::Open) | Some(Token::Num(_))
            );
            if matches!(self.peek(), Some(Token::Star)) {
                self.pos += 1;
            } else if !implicit {
                return Ok(acc);
            }
            let rhs = self.unary()?;
            acc = multiply(acc, rhs)?;
        }
    }

    fn unary(&mut self) -> Result<LinearForm, ChordError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(self.unary()?.scaled(-1));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<LinearForm, ChordError> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(v)) => Ok(LinearForm::constant(self.arity, v)),
            Some(Token::Var(i)) => {
                let mut f = LinearForm::constant(self.arity, 0);
                f.coeffs[i] = 1;
                Ok(f)
            }
            Some(Token::Open) => {
                let inner = self.expr()?;
                if self.tokens.get(self.pos) != Some(&Token::Close) {
                    return Err(ChordError::ParseMap("unbalanced parentheses".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(ChordError::ParseMap(format!("unexpected token {other:?}"))),
        }
    }
}

fn multiply(a: LinearForm, b: LinearForm) -> Result<LinearForm, ChordError> {
    if a.is_constant() {
        let k = a.constant;
        Ok(b.scaled(k))
    } else if b.is_constant() {
        let k = b.constant;
        Ok(a.scaled(k))
    } else {
        Err(ChordError::ParseMap(
            "product of two coordinates is not affine".into(),
        ))
    }
}

/// `(x + t, y + t, ...)`.
pub fn transpose_voicing(v: &Voicing, t: u64, n: u64) -> Voicing {
    Voicing(v.0.iter().map(|&x| add_mod(x, t, n)).collect())
}

/// Inverse of [`transpose_voicing`].
pub fn untranspose_voicing(v: &Voicing, t: u64, n: u64) -> Voicing {
    Voicing(v.0.iter().map(|&x| sub_mod(x, t, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> SetClassRegistry {
        SetClassRegistry::new(
            12,
            &[
                ("M", vec![0, 4, 7]),
                ("alpha", vec![0, 2, 5]),
                ("beta", vec![0, 4, 5]),
            ],
        )
        .unwrap()
    }

    fn pcs(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    const VL: &str = "z+2,x-1,y-2";
    const VL_PRIME: &str = "z+4,x+1,y";
    const I_M_ALPHA: &str = "x,(2x-3)-y,(2x-3)-z";
    const I_M_BETA: &str = "(2z+4)-y,(2z+4)-x,z";
    const I_ALPHA_BETA: &str = "(2y-1)-z,y,(2y-1)-x";

    fn law(reg: &SetClassRegistry, lit: &str) -> Vec<(String, String, u64)> {
        let l = reg
            .root_law_of(&AffineMap::parse(lit, 12).unwrap())
            .unwrap();
        assert!(l.consistent);
        l.rows
            .iter()
            .map(|r| match &r.outcome {
                RowOutcome::Mapped { to, shift } => (r.from.to_string(), to.to_string(), *shift),
                other => panic!("{other:?}"),
            })
            .collect()
    }

    fn row(from: &str, to: &str, shift: u64) -> (String, String, u64) {
        (from.to_string(), to.to_string(), shift)
    }

    #[test]
    fn realize_examples() {
        let reg = registry();
        assert_eq!(
            reg.realize(&reg.chord(0, "M").unwrap()).unwrap(),
            pcs(&[0, 4, 7])
        );
        assert_eq!(
            reg.realize(&reg.chord(0, "beta").unwrap()).unwrap(),
            pcs(&[0, 4, 5])
        );
        assert_eq!(
            reg.realize(&reg.chord(3, "alpha").unwrap()).unwrap(),
            pcs(&[3, 5, 8])
        );
        let bogus = Chord {
            root: Residue::zero(12),
            kind: ObjectId::new("gamma"),
        };
        assert_eq!(
            reg.realize(&bogus),
            Err(ChordError::UnknownType("gamma".into()))
        );
    }

    #[test]
    fn classify_examples() {
        let reg = registry();
        assert_eq!(
            reg.classify(&pcs(&[0, 4, 7])),
            vec![reg.chord(0, "M").unwrap()]
        );
        assert_eq!(
            reg.classify(&pcs(&[9, 11, 2])),
            vec![reg.chord(9, "alpha").unwrap()]
        );
        assert!(reg.classify(&pcs(&[0, 1, 2])).is_empty());
    }

    #[test]
    fn classify_inverts_realize() {
        let reg = registry();
        for c in reg.chords() {
            assert!(reg.classify(&reg.realize(&c).unwrap()).contains(&c));
        }
        // symmetric set classes give several roots
        let aug = SetClassRegistry::new(12, &[("aug", vec![0, 4, 8])]).unwrap();
        assert_eq!(aug.classify(&pcs(&[0, 4, 8])).len(), 3);
    }

    #[test]
    fn canonical_voicing_examples() {
        let reg = registry();
        assert_eq!(
            reg.canonical_voicing(&reg.chord(0, "M").unwrap()).unwrap(),
            Voicing(vec![0, 4, 7])
        );
        assert_eq!(
            reg.canonical_voicing(&reg.chord(5, "alpha").unwrap())
                .unwrap(),
            Voicing(vec![5, 7, 10])
        );
        assert_eq!(
            reg.canonical_voicing(&reg.chord(0, "beta").unwrap())
                .unwrap(),
            Voicing(vec![0, 4, 5])
        );
    }

    #[test]
    fn apply_affine_examples() {
        let vl = AffineMap::parse(VL, 12).unwrap();
        assert_eq!(
            vl.apply(&Voicing(vec![0, 4, 7])).unwrap(),
            Voicing(vec![9, 11, 2])
        );
        let i = AffineMap::parse(I_M_ALPHA, 12).unwrap();
        assert_eq!(
            i.apply(&Voicing(vec![0, 4, 7])).unwrap(),
            Voicing(vec![0, 5, 2])
        );
        let reg = registry();
        assert_eq!(
            reg.classify(&pcs(&[0, 5, 2])),
            vec![reg.chord(0, "alpha").unwrap()]
        );
        let id = AffineMap::identity(12, 3);
        assert_eq!(
            id.apply(&Voicing(vec![3, 1, 4])).unwrap(),
            Voicing(vec![3, 1, 4])
        );
        assert_eq!(
            vl.apply(&Voicing(vec![1, 2])),
            Err(ChordError::DimensionMismatch { map: 3, voicing: 2 })
        );
    }

    #[test]
    fn root_laws_of_the_voice_leadings_and_involutions() {
        let reg = registry();
        assert_eq!(
            law(&reg, VL),
            vec![
                row("M", "alpha", 9),
                row("alpha", "beta", 7),
                row("beta", "M", 7)
            ]
        );
        assert_eq!(
            law(&reg, I_M_BETA),
            vec![
                row("M", "beta", 2),
                row("alpha", "alpha", 0),
                row("beta", "M", 10)
            ]
        );
        assert_eq!(
            law(&reg, I_M_ALPHA),
            vec![
                row("M", "alpha", 0),
                row("alpha", "M", 0),
                row("beta", "beta", 0)
            ]
        );
        assert_eq!(
            law(&reg, I_ALPHA_BETA),
            vec![
                row("M", "M", 0),
                row("alpha", "beta", 10),
                row("beta", "alpha", 2)
            ]
        );
        // the formula gives n_M -> (n-1)_alpha
        assert_eq!(
            law(&reg, VL_PRIME),
            vec![
                row("M", "alpha", 11),
                row("alpha", "beta", 9),
                row("beta", "M", 9)
            ]
        );
        assert_eq!(
            law(&reg, "x,y,z"),
            vec![
                row("M", "M", 0),
                row("alpha", "alpha", 0),
                row("beta", "beta", 0)
            ]
        );
    }

    #[test]
    fn root_law_requires_equivariance() {
        let reg = registry();
        let doubling = AffineMap::parse("2x,2y,2z", 12).unwrap();
        assert_eq!(
            reg.root_law_of(&doubling),
            Err(ChordError::NotEquivariant(0))
        );
    }

    #[test]
    fn equivariance_examples() {
        assert!(AffineMap::parse(VL, 12).unwrap().is_equivariant());
        let iab = AffineMap::new(
            12,
            vec![vec![0, 2, -1], vec![0, 1, 0], vec![-1, 2, 0]],
            vec![-1, 0, -1],
        )
        .unwrap();
        assert!(iab.is_equivariant());
        assert_eq!(iab, AffineMap::parse(I_ALPHA_BETA, 12).unwrap());
        assert!(!AffineMap::parse("2x,2y,2z", 12).unwrap().is_equivariant());
    }

    #[test]
    fn equivariant_maps_commute_with_transposition() {
        for lit in [VL, VL_PRIME, I_M_ALPHA, I_M_BETA, I_ALPHA_BETA] {
            let map = AffineMap::parse(lit, 12).unwrap();
            for a in 0..12 {
                for t in 0..12 {
                    let v = Voicing(vec![a, (a * 5 + 1) % 12, (a * 7 + 3) % 12]);
                    let lhs = map.apply(&transpose_voicing(&v, t, 12)).unwrap();
                    let rhs = transpose_voicing(&map.apply(&v).unwrap(), t, 12);
                    assert_eq!(lhs, rhs);
                    assert_eq!(untranspose_voicing(&rhs, t, 12), map.apply(&v).unwrap());
                }
            }
        }
    }

    #[test]
    fn involutions_square_to_the_identity_on_their_types() {
        let reg = registry();
        for (lit, pair) in [
            (I_M_ALPHA, ["M", "alpha"]),
            (I_M_BETA, ["M", "beta"]),
            (I_ALPHA_BETA, ["alpha", "beta"]),
        ] {
            let map = AffineMap::parse(lit, 12).unwrap();
            for kind in pair {
                for r in 0..12 {
                    let v = reg.canonical_voicing(&reg.chord(r, kind).unwrap()).unwrap();
                    assert_eq!(
                        map.apply(&map.apply(&v).unwrap()).unwrap(),
                        v,
                        "{lit} on {r}{kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn three_voice_leadings_transpose_down_a_semitone() {
        let reg = registry();
        let vl = AffineMap::parse(VL, 12).unwrap();
        for c in reg.chords() {
            let mut v = reg.canonical_voicing(&c).unwrap();
            for _ in 0..3 {
                v = vl.apply(&v).unwrap();
            }
            let image = reg.classify(&v.0.iter().copied().collect());
            let want = reg
                .chord(c.root.value() as i64 - 1, c.kind.as_str())
                .unwrap();
            assert_eq!(image, vec![want]);
        }
    }

    #[test]
    fn parser_handles_the_literal_grammar() {
        let m = AffineMap::parse("2(x+1) - -y, 3*z-14, v1", 12).unwrap();
        assert_eq!(m.matrix(), &[vec![2, 1, 0], vec![0, 0, 3], vec![1, 0, 0]]);
        assert_eq!(m.constant(), &[2, 10, 0]);
        assert!(AffineMap::parse("x*y,y,z", 12).is_err());
        assert!(AffineMap::parse("x,y", 12).unwrap().arity() == 2);
        assert!(AffineMap::parse("x,z", 12).is_err());
        assert!(AffineMap::parse("x,(y,z", 12).is_err());
        let vl = AffineMap::parse(VL, 12).unwrap();
        assert_eq!(AffineMap::parse(&vl.to_literal(), 12).unwrap(), vl);
    }

    #[test]
    fn chord_grammar() {
        let reg = registry();
        assert_eq!(
            reg.parse_chord("10beta").unwrap(),
            reg.chord(10, "beta").unwrap()
        );
        assert_eq!(reg.parse_chord("0M").unwrap().to_string(), "0M");
        assert!(reg.parse_chord("12M").is_err());
        assert!(reg.parse_chord("M").is_err());
        assert!(matches!(
            reg.parse_chord("0m"),
            Err(ChordError::UnknownType(_))
        ));
        for (i, c) in reg.chords().iter().enumerate() {
            assert_eq!(reg.chord_index(c), Some(i));
            assert_eq!(&reg.chord_at(i), c);
        }
    }

    #[test]
    fn registry_rejects_malformed_classes() {
        assert!(SetClassRegistry::new(12, &[("M", vec![4, 7])]).is_err());
        assert!(SetClassRegistry::new(12, &[("M", vec![0, 7, 4])]).is_err());
        assert!(SetClassRegistry::new(12, &[("M", vec![0, 4]), ("M", vec![0, 3])]).is_err());
        assert!(SetClassRegistry::new(12, &[("7th", vec![0, 4])]).is_err());
    }
}
