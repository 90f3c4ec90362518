//! Breadth-first closure of permutation groups, structure reports, and
//! cyclic, dihedral and wreath-product certificates.
//!
//! Groups act on points partitioned into blocks (the chord types); the
//! kernel of the induced block action plays the role of the normal subgroup
//! of fiber transpositions.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::modular::{invariant_factors_from_orders, InvariantFactors};
use crate::perm::Permutation;

/// Default cap on the number of elements a closure may produce.
pub const CLOSURE_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the budget of {0} elements")]
    ClosureBudgetExceeded(usize),
    #[error("generator of degree {got} in a group of degree {want}")]
    DegreeMismatch { got: usize, want: usize },
    #[error("block labelling has {got} points, expected {want}")]
    BlockMismatch { got: usize, want: usize },
}

type Closure = (Vec<Permutation>, Vec<(u32, u32)>, HashMap<Permutation, u32>);

/// BFS closure from the identity. Returns the elements in visiting order and,
/// for each non-identity element, `(parent, generator)` with
/// `element = parent.then(generator)`.
fn closure(degree: usize, gens: &[Permutation], budget: usize) -> Result<Closure, GroupError> {
    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut parent = vec![(0, u32::MAX)];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut next = 0;
    while next < elements.len() {
        for (gi, g) in gens.iter().enumerate() {
            let candidate = elements[next].then(g);
            if index.contains_key(&candidate) {
                continue;
            }
            if elements.len() >= budget {
                return Err(GroupError::ClosureBudgetExceeded(budget));
            }
            index.insert(candidate.clone(), elements.len() as u32);
            elements.push(candidate);
            parent.push((next as u32, gi as u32));
        }
        next += 1;
    }
    Ok((elements, parent, index))
}

/// A permutation group with its generators and shortest generator words.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    degree: usize,
    blocks: Vec<usize>,
    block_count: usize,
    names: Vec<String>,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    parent: Vec<(u32, u32)>,
    index: HashMap<Permutation, u32>,
}

/// Closes `gens` under composition.
///
/// `blocks[i]` labels the block of point `i`; labels must be `0..k`.
/// Elements are visited breadth first with generators tried in the given
/// order, so each element's word is the shortlex-least word reaching it.
pub fn generate_group(
    degree: usize,
    blocks: Vec<usize>,
    gens: Vec<(String, Permutation)>,
    budget: usize,
) -> Result<GeneratedGroup, GroupError> {
    if blocks.len() != degree {
        return Err(GroupError::BlockMismatch {
            got: blocks.len(),
            want: degree,
        });
    }
    if let Some((_, p)) = gens.iter().find(|(_, p)| p.degree() != degree) {
        return Err(GroupError::DegreeMismatch {
            got: p.degree(),
            want: degree,
        });
    }
    let (names, generators): (Vec<String>, Vec<Permutation>) = gens.into_iter().unzip();
    let (elements, parent, index) = closure(degree, &generators, budget)?;
    let block_count = blocks.iter().max().map_or(0, |&b| b + 1);
    Ok(GeneratedGroup {
        degree,
        blocks,
        block_count,
        names,
        generators,
        elements,
        parent,
        index,
    })
}

impl GeneratedGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// Elements in visiting order; index 0 is the identity.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    pub fn position(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    /// Generator indices, in the order they are applied.
    pub fn word(&self, element: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut i = element;
        while i != 0 {
            let (p, g) = self.parent[i];
            word.push(g as usize);
            i = p as usize;
        }
        word.reverse();
        word
    }

    /// The word as generator names joined by `*`, or `id`.
    pub fn word_string(&self, element: usize) -> String {
        let w = self.word(element);
        if w.is_empty() {
            return "id".to_string();
        }
        w.iter()
            .map(|&g| self.names[g].as_str())
            .collect::<Vec<_>>()
            .join("*")
    }

    /// The induced permutation of blocks, or `None` if `p` breaks a block.
    pub fn block_action(&self, p: &Permutation) -> Option<Permutation> {
        let mut image: Vec<Option<usize>> = vec![None; self.block_count];
        for i in 0..self.degree {
            let (b, c) = (self.blocks[i], self.blocks[p.apply(i)]);
            match image[b] {
                None => image[b] = Some(c),
                Some(prev) if prev != c => return None,
                _ => {}
            }
        }
        Permutation::from_images(image.into_iter().map(|b| b.unwrap_or(usize::MAX)).collect())
    }

    pub fn preserves_blocks(&self) -> bool {
        self.generators
            .iter()
            .all(|g| self.block_action(g).is_some())
    }

    /// Elements acting trivially on blocks. Empty if blocks are not preserved.
    fn kernel(&self) -> Vec<&Permutation> {
        if !self.preserves_blocks() {
            return Vec::new();
        }
        self.elements
            .iter()
            .filter(|p| self.block_action(p).is_some_and(|b| b.is_identity()))
            .collect()
    }

    /// The element with the given order, first in visiting order.
    pub fn find_element_of_order(&self, order: u64) -> Option<usize> {
        self.elements.iter().position(|p| p.order() == order)
    }

    pub fn element_orders(&self) -> BTreeMap<u64, usize> {
        histogram(self.elements.iter())
    }
}

fn histogram<'a>(elements: impl Iterator<Item = &'a Permutation>) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for p in elements {
        *h.entry(p.order()).or_insert(0) += 1;
    }
    h
}

/// A subgroup given by its elements is abelian iff a generating set
/// commutes; the generating set is grown greedily.
fn subgroup_is_abelian(degree: usize, elements: &[&Permutation]) -> bool {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut span: HashSet<Permutation> = HashSet::from([Permutation::identity(degree)]);
    for &e in elements {
        if span.contains(e) {
            continue;
        }
        if gens.iter().any(|g| !g.commutes_with(e)) {
            return false;
        }
        gens.push(e.clone());
        span = closure(degree, &gens, usize::MAX)
            .expect("unbounded")
            .2
            .into_keys()
            .collect();
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelSummary {
    pub order: usize,
    pub abelian: bool,
    pub invariant_factors: Option<InvariantFactors>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientSummary {
    pub order: usize,
    pub abelian: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupAnalysis {
    pub order: usize,
    pub abelian: bool,
    pub cyclic: bool,
    pub invariant_factors: Option<InvariantFactors>,
    pub element_orders: BTreeMap<u64, usize>,
    pub blocks_preserved: bool,
    pub kernel: Option<KernelSummary>,
    pub quotient: Option<QuotientSummary>,
}

pub fn analyze_group(g: &GeneratedGroup) -> GroupAnalysis {
    let gens = g.generators();
    let abelian = gens
        .iter()
        .enumerate()
        .all(|(i, a)| gens[i + 1..].iter().all(|b| a.commutes_with(b)));
    let element_orders = g.element_orders();
    let cyclic = element_orders.contains_key(&(g.order() as u64));
    let invariant_factors = abelian.then(|| invariant_factors_from_orders(&element_orders));
    let blocks_preserved = g.preserves_blocks();
    let (kernel, quotient) = if blocks_preserved {
        let kernel = g.kernel();
        let k_abelian = subgroup_is_abelian(g.degree(), &kernel);
        let k_factors =
            k_abelian.then(|| invariant_factors_from_orders(&histogram(kernel.iter().copied())));
        let images: Vec<Permutation> = gens.iter().map(|p| g.block_action(p).unwrap()).collect();
        let q_abelian = images
            .iter()
            .enumerate()
            .all(|(i, a)| images[i + 1..].iter().all(|b| a.commutes_with(b)));
        (
            Some(KernelSummary {
                order: kernel.len(),
                abelian: k_abelian,
                invariant_factors: k_factors,
            }),
            Some(QuotientSummary {
                order: g.order() / kernel.len(),
                abelian: q_abelian,
            }),
        )
    } else {
        (None, None)
    };
    GroupAnalysis {
        order: g.order(),
        abelian,
        cyclic,
        invariant_factors,
        element_orders,
        blocks_preserved,
        kernel,
        quotient,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// Outcome of a structure check: the clauses evaluated, stopping at the first failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    pub clauses: Vec<Clause>,
}

impl Certificate {
    fn new() -> Self {
        Certificate {
            holds: true,
            clauses: Vec::new(),
        }
    }

    /// Records a clause; returns whether evaluation should continue.
    fn check(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) -> bool {
        self.clauses.push(Clause {
            name,
            ok,
            detail: detail.into(),
        });
        self.holds &= ok;
        ok
    }

    pub fn failed(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.ok)
    }
}

/// `G` contains an element of order `|G|`.
pub fn cyclic_certificate(g: &GeneratedGroup) -> Certificate {
    let mut cert = Certificate::new();
    match g.find_element_of_order(g.order() as u64) {
        Some(i) => cert.check(
            "generator",
            true,
            format!("{} has order {}", g.word_string(i), g.order()),
        ),
        None => cert.check(
            "generator",
            false,
            format!("no element of order {}", g.order()),
        ),
    };
    cert
}

/// `|G| = 2k` with `t` of order `k` and an involution `r` outside `<t>`
/// satisfying `r t r = t^-1`.
pub fn dihedral_certificate(g: &GeneratedGroup) -> Certificate {
    let mut cert = Certificate::new();
    let order = g.order();
    if !cert.check(
        "even-order",
        order.is_multiple_of(2),
        format!("|G| = {order}"),
    ) {
        return cert;
    }
    let k = (order / 2) as u64;
    for (ti, t) in g
        .elements()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.order() == k)
    {
        let rotations: HashSet<Permutation> = (0..k).map(|e| t.pow(e)).collect();
        let t_inv = t.inverse();
        let reflection = g.elements().iter().position(|r| {
            !rotations.contains(r) && r.then(r).is_identity() && r.then(t).then(r) == t_inv
        });
        if let Some(ri) = reflection {
            cert.check(
                "rotation",
                true,
                format!("t = {} has order {k}", g.word_string(ti)),
            );
            cert.check(
                "reflection",
                true,
                format!("r = {} inverts t", g.word_string(ri)),
            );
            return cert;
        }
    }
    if g.find_element_of_order(k).is_none() {
        cert.check("rotation", false, format!("no element of order {k}"));
    } else {
        cert.check(
            "reflection",
            false,
            format!("no involution inverts an element of order {k}"),
        );
    }
    cert
}

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

/// `K` is a complement to the block kernel: `|K| = m!`, `K` meets the kernel trivially.
fn is_complement(g: &GeneratedGroup, gens: &[Permutation], m: usize) -> bool {
    if gens.iter().any(|p| !g.contains(p)) {
        return false;
    }
    match closure(g.degree(), gens, factorial(m) + 1) {
        Ok((elements, _, _)) => {
            elements.len() == factorial(m)
                && elements
                    .iter()
                    .skip(1)
                    .all(|p| g.block_action(p).is_some_and(|b| !b.is_identity()))
        }
        Err(_) => false,
    }
}

/// Searches lifts of the adjacent block transpositions for a complement.
fn search_complement(g: &GeneratedGroup, m: usize) -> Option<Vec<Permutation>> {
    if m <= 1 {
        return Some(Vec::new());
    }
    let swaps: Vec<Permutation> = (0..m - 1)
        .map(|i| {
            let mut images: Vec<usize> = (0..m).collect();
            images.swap(i, i + 1);
            Permutation::from_images(images).unwrap()
        })
        .collect();
    let lifts: Vec<Vec<&Permutation>> = swaps
        .iter()
        .map(|s| {
            g.elements()
                .iter()
                .filter(|p| p.then(p).is_identity() && g.block_action(p).as_ref() == Some(s))
                .collect()
        })
        .collect();
    if lifts.iter().any(Vec::is_empty) {
        return None;
    }
    let mut choice = vec![0usize; lifts.len()];
    loop {
        let gens: Vec<Permutation> = choice
            .iter()
            .zip(&lifts)
            .map(|(&c, l)| l[c].clone())
            .collect();
        if is_complement(g, &gens, m) {
            return Some(gens);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < lifts[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Checks `G = Z_n wr S_m` with the blocks as the `m` coordinates.
///
/// `hints` are tried first as generators of the complement (typically the
/// zero-shift swaps); otherwise lifts of the block transpositions are searched.
pub fn wreath_certificate(
    g: &GeneratedGroup,
    n: usize,
    m: usize,
    hints: &[Permutation],
) -> Certificate {
    let mut cert = Certificate::new();
    let want = n.pow(m as u32) * factorial(m);
    if !cert.check(
        "order",
        g.order() == want,
        format!("|G| = {}, n^m m! = {want}", g.order()),
    ) {
        return cert;
    }
    let blocks_ok = g.preserves_blocks() && g.block_count() == m && g.degree() == n * m;
    if !cert.check(
        "blocks",
        blocks_ok,
        format!("{} blocks on {} points", g.block_count(), g.degree()),
    ) {
        return cert;
    }
    let kernel = g.kernel();
    let abelian = subgroup_is_abelian(g.degree(), &kernel);
    let factors =
        abelian.then(|| invariant_factors_from_orders(&histogram(kernel.iter().copied())));
    let expected = InvariantFactors(if n > 1 { vec![n as u64; m] } else { Vec::new() });
    let detail = match &factors {
        Some(f) => format!(
            "kernel of order {} with invariant factors {f}",
            kernel.len()
        ),
        None => format!("kernel of order {} is not abelian", kernel.len()),
    };
    if !cert.check("kernel", factors.as_ref() == Some(&expected), detail) {
        return cert;
    }
    let image_order = g.order() / kernel.len();
    if !cert.check(
        "block-image",
        image_order == factorial(m),
        format!("block image of order {image_order}"),
    ) {
        return cert;
    }
    let (found, source) = if is_complement(g, hints, m) {
        (true, "hinted generators")
    } else if search_complement(g, m).is_some() {
        (true, "searched lifts")
    } else {
        (false, "none found")
    };
    let detail = if found {
        format!(
            "complement of order {} from {source}; |N||K| = {}",
            factorial(m),
            kernel.len() * factorial(m)
        )
    } else {
        "no complement of order m! meeting the kernel trivially".to_string()
    };
    cert.check("complement", found, detail);
    cert
}

/// Points `0..degree` in blocks of `block_size` consecutive points.
pub fn contiguous_blocks(degree: usize, block_size: usize) -> Vec<usize> {
    (0..degree).map(|i| i / block_size).collect()
}

/// Points reachable from `start` under `gens`, in BFS order.
pub fn orbit_of_points(gens: &[Permutation], start: usize) -> Vec<usize> {
    let mut seen = HashSet::from([start]);
    let mut out = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let j = g.apply(i);
            if seen.insert(j) {
                out.push(j);
                queue.push_back(j);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Permutation {
        Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap()
    }

    fn group(degree: usize, block: usize, gens: &[Permutation]) -> GeneratedGroup {
        let named = gens
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("g{i}"), p.clone()))
            .collect();
        generate_group(
            degree,
            contiguous_blocks(degree, block),
            named,
            CLOSURE_BUDGET,
        )
        .unwrap()
    }

    /// `Z_n wr S_2` on two blocks of size `n`: shift in block 0 and the block swap.
    fn wreath_2(n: usize) -> (Permutation, Permutation) {
        let shift = Permutation::from_images(
            (0..2 * n)
                .map(|i| if i < n { (i + 1) % n } else { i })
                .collect(),
        )
        .unwrap();
        let swap =
            Permutation::from_images((0..2 * n).map(|i| (i + n) % (2 * n)).collect()).unwrap();
        (shift, swap)
    }

    #[test]
    fn trivial_group() {
        let g = group(4, 2, &[Permutation::identity(4)]);
        assert_eq!(g.order(), 1);
        let a = analyze_group(&g);
        assert!(a.abelian && a.cyclic);
        assert_eq!(a.invariant_factors, Some(InvariantFactors(vec![])));
        assert_eq!(g.word_string(0), "id");
    }

    #[test]
    fn cyclic_group_words_are_shortest() {
        let g = group(12, 12, &[cycle(12)]);
        assert_eq!(g.order(), 12);
        for i in 0..12 {
            assert_eq!(g.word(i).len(), i);
        }
        assert!(cyclic_certificate(&g).holds);
        assert!(!dihedral_certificate(&g).holds);
    }

    #[test]
    fn budget_is_enforced() {
        let (shift, swap) = wreath_2(12);
        let gens = vec![("a".to_string(), shift), ("b".to_string(), swap)];
        assert_eq!(
            generate_group(24, contiguous_blocks(24, 12), gens, 100).unwrap_err(),
            GroupError::ClosureBudgetExceeded(100)
        );
    }

    #[test]
    fn wreath_of_two_blocks() {
        let (shift, swap) = wreath_2(5);
        let g = group(10, 5, &[shift, swap.clone()]);
        assert_eq!(g.order(), 50);
        let a = analyze_group(&g);
        assert!(!a.abelian && a.blocks_preserved);
        assert_eq!(
            a.kernel.as_ref().unwrap().invariant_factors,
            Some(InvariantFactors(vec![5, 5]))
        );
        assert_eq!(
            a.quotient,
            Some(QuotientSummary {
                order: 2,
                abelian: true
            })
        );
        assert!(wreath_certificate(&g, 5, 2, &[swap]).holds);
        // no hints: the complement is found by search
        let searched = wreath_certificate(&g, 5, 2, &[]);
        assert!(searched.holds);
        assert!(searched.clauses.last().unwrap().detail.contains("searched"));
        let wrong = wreath_certificate(&g, 5, 3, &[]);
        assert_eq!(wrong.failed().unwrap().name, "order");
    }

    #[test]
    fn dihedral_groups_are_recognised() {
        for k in 1..=12 {
            let rot = cycle(k);
            let refl = Permutation::from_images((0..k).map(|i| (k - i) % k).collect()).unwrap();
            let g = group(k, k, &[rot, refl]);
            let expected = match k {
                1 | 2 => k,
                _ => 2 * k,
            };
            assert_eq!(g.order(), expected, "k = {k}");
            assert_eq!(
                dihedral_certificate(&g).holds,
                g.order().is_multiple_of(2),
                "k = {k}"
            );
        }
        let z2 = group(2, 2, &[cycle(2)]);
        assert!(dihedral_certificate(&z2).holds);
    }

    #[test]
    fn blocks_not_preserved_are_reported() {
        let g = group(4, 2, &[cycle(4)]);
        let a = analyze_group(&g);
        assert!(!a.blocks_preserved);
        assert!(a.kernel.is_none());
        assert_eq!(
            wreath_certificate(&g, 2, 2, &[]).failed().unwrap().name,
            "order"
        );
    }

    #[test]
    fn symmetric_group_on_three_points() {
        let g = group(
            3,
            1,
            &[cycle(3), Permutation::from_images(vec![1, 0, 2]).unwrap()],
        );
        let a = analyze_group(&g);
        assert_eq!(a.order, 6);
        assert!(!a.abelian && !a.cyclic);
        assert_eq!(a.element_orders, BTreeMap::from([(1, 1), (2, 3), (3, 2)]));
        assert!(dihedral_certificate(&g).holds);
        assert!(wreath_certificate(&g, 1, 3, &[]).holds);
        assert_eq!(orbit_of_points(g.generators(), 0), vec![0, 1, 2]);
    }
}
