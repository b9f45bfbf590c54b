//! Group-theoretic oracles over gate placements at fixed width: exhaustive
//! closure for tiny state spaces, stabilizer-chain order and membership with
//! factorization witnesses, and the ancilla-implementability search.
//!
//! Points are encoded full-width words. Wire permutations come for free, so
//! the adjacent wire crossings are always appended as extra generators.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::circuit::{Circuit, Placement, PlacedOp};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word;

/// Budget on stabilizer-chain point counts.
const CHAIN_BUDGET: usize = 100_000;
/// Below this many points, the ancilla search enumerates the whole group.
const EXHAUSTIVE_POINTS: usize = 10;

/// One expanded generator: a gate on chosen wires, as a permutation of all
/// `k^W` full-width words.
#[derive(Debug, Clone)]
pub struct GroupGenerator {
    pub name: String,
    pub gate: Arc<Gate>,
    pub wires: Vec<usize>,
    perm: Vec<u32>,
}

impl GroupGenerator {
    pub fn permutation(&self) -> &[u32] {
        &self.perm
    }
}

/// A fixed-width placement group: user placements plus free wire crossings.
#[derive(Debug, Clone)]
pub struct PlacementGroup {
    k: u32,
    wires: usize,
    points: usize,
    generators: Vec<GroupGenerator>,
}

fn expand_placement(k: u32, wires: usize, gate: &Gate, at: &[usize]) -> Result<Vec<u32>> {
    let points = crate::checked_table_len(k, wires)?;
    let mut perm = vec![0u32; points];
    let mut state = vec![0u32; wires];
    let mut sub = vec![0u32; at.len()];
    for (index, slot) in perm.iter_mut().enumerate() {
        word::decode_into(k, index, &mut state);
        for (b, &w) in sub.iter_mut().zip(at) {
            *b = state[w];
        }
        let out = gate.apply_index(word::encode(k, &sub));
        word::decode_into(k, out, &mut sub);
        for (&w, &s) in at.iter().zip(&sub) {
            state[w] = s;
        }
        *slot = word::encode(k, &state) as u32;
    }
    Ok(perm)
}

impl PlacementGroup {
    pub fn new(k: u32, wires: usize, placements: Vec<(Arc<Gate>, Vec<usize>)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        let points = crate::checked_table_len(k, wires)?;
        let mut generators = Vec::new();
        for (idx, (gate, at)) in placements.into_iter().enumerate() {
            if gate.k() != k {
                return Err(Error::AlphabetMismatch { left: k, right: gate.k() });
            }
            if gate.arity() != at.len() {
                return Err(Error::PlacementWidthMismatch { expected: gate.arity(), got: at.len() });
            }
            let mut seen = BTreeSet::new();
            for &w in &at {
                if w >= wires {
                    return Err(Error::WireOutOfRange { wire: w, wire_count: wires });
                }
                if !seen.insert(w) {
                    return Err(Error::DuplicateWire(w));
                }
            }
            let perm = expand_placement(k, wires, &gate, &at)?;
            generators.push(GroupGenerator { name: format!("g{idx}"), gate, wires: at, perm });
        }
        // Free wire permutations, generated by adjacent crossings.
        let crossing = crate::constructors::wire_swap(k)?.shared();
        for i in 0..wires.saturating_sub(1) {
            let at = vec![i, i + 1];
            let perm = expand_placement(k, wires, &crossing, &at)?;
            generators.push(GroupGenerator {
                name: format!("wireswap{i}"),
                gate: Arc::clone(&crossing),
                wires: at,
                perm,
            });
        }
        Ok(PlacementGroup { k, wires, points, generators })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn generators(&self) -> &[GroupGenerator] {
        &self.generators
    }

    /// Expand a full-width gate into its permutation of points.
    pub fn expand_gate(&self, gate: &Gate) -> Result<Vec<u32>> {
        if gate.arity() != self.wires {
            return Err(Error::ArityMismatch { left: self.wires, right: gate.arity() });
        }
        expand_placement(self.k, self.wires, gate, &(0..self.wires).collect::<Vec<_>>())
    }

    /// Turn a generator word (applied first to last) into a circuit on the
    /// group's wires with the given input/ancilla split.
    pub fn word_to_circuit(
        &self,
        word: &[usize],
        input_wires: Vec<usize>,
        ancillas: Vec<(usize, u32)>,
    ) -> Result<Circuit> {
        let steps = word
            .iter()
            .map(|&idx| {
                let generator = &self.generators[idx];
                Placement {
                    op: PlacedOp::Gate(Arc::clone(&generator.gate)),
                    wires: generator.wires.clone(),
                }
            })
            .collect();
        Circuit::new(self.k, input_wires, ancillas, steps)
    }
}

/// Result of the brute-force closure: the exact subgroup at this width.
#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub k: u32,
    pub wires: usize,
    pub element_cap: usize,
    /// Every element of the generated subgroup, sorted.
    pub elements: Vec<Vec<u32>>,
}

impl ClosureReport {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, candidate: &[u32]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(candidate)).is_ok()
    }
}

/// Exhaustive closure of the generated subgroup. Fails once more than
/// `element_cap` distinct elements appear. The report is tied to this fixed
/// width; it says nothing about generation with more ancilla wires.
pub fn closure_bfs(group: &PlacementGroup, element_cap: usize) -> Result<ClosureReport> {
    let identity: Vec<u32> = (0..group.points as u32).collect();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    seen.insert(identity.clone());
    let mut queue = VecDeque::new();
    queue.push_back(identity);
    while let Some(current) = queue.pop_front() {
        for generator in &group.generators {
            let next: Vec<u32> = current.iter().map(|&x| generator.perm[x as usize]).collect();
            if !seen.contains(&next) {
                if seen.len() >= element_cap {
                    return Err(Error::ClosureCapExceeded { cap: element_cap });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(ClosureReport {
        k: group.k,
        wires: group.wires,
        element_cap,
        elements: seen.into_iter().collect(),
    })
}

/// A permutation together with a word in the group generators producing it.
/// Words list generator indices in application order (first applied first).
#[derive(Debug, Clone)]
struct PermWord {
    perm: Vec<u32>,
    word: Vec<usize>,
}

impl PermWord {
    fn identity(points: usize) -> Self {
        PermWord { perm: (0..points as u32).collect(), word: Vec::new() }
    }

    fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `other` applied first, then `self`.
    fn after(&self, other: &PermWord) -> PermWord {
        let perm = other.perm.iter().map(|&x| self.perm[x as usize]).collect();
        let mut word = other.word.clone();
        word.extend(&self.word);
        PermWord { perm, word }
    }
}

struct Level {
    base: u32,
    generators: Vec<PermWord>,
    transversal: HashMap<u32, PermWord>,
}

impl Level {
    fn new(base: u32, points: usize) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(base, PermWord::identity(points));
        Level { base, generators: Vec::new(), transversal }
    }
}

/// Stabilizer chain with transversal words for factorization witnesses.
pub struct StabilizerChain {
    points: usize,
    /// Orders of the original generators, for inverse-free inverse words.
    generator_orders: Vec<u64>,
    levels: Vec<Level>,
}

/// Size of the orbit of `point` under all generators of the group.
fn orbit_size(group: &PlacementGroup, point: u32) -> usize {
    let mut seen = BTreeSet::new();
    seen.insert(point);
    let mut queue = VecDeque::new();
    queue.push_back(point);
    while let Some(at) = queue.pop_front() {
        for generator in &group.generators {
            let next = generator.perm[at as usize];
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.len()
}

fn perm_order(perm: &[u32]) -> u64 {
    let mut seen = vec![false; perm.len()];
    let mut order = 1u64;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut at = start;
        loop {
            seen[at] = true;
            len += 1;
            at = perm[at] as usize;
            if at == start {
                break;
            }
        }
        order = num_lcm(order, len);
    }
    order
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn num_lcm(a: u64, b: u64) -> u64 {
    a / num_gcd(a, b) * b
}

impl StabilizerChain {
    /// Build with base points chosen greedily on largest orbits.
    pub fn build(group: &PlacementGroup) -> Result<Self> {
        Self::build_with_base(group, &[])
    }

    /// Build with a prescribed initial base sequence, extended as needed.
    pub fn build_with_base(group: &PlacementGroup, base: &[u32]) -> Result<Self> {
        if group.points > CHAIN_BUDGET {
            return Err(Error::ChainBudgetExceeded { points: group.points, budget: CHAIN_BUDGET });
        }
        let mut chain = StabilizerChain {
            points: group.points,
            generator_orders: group.generators.iter().map(|g| perm_order(&g.perm)).collect(),
            levels: base.iter().map(|&b| Level::new(b, group.points)).collect(),
        };
        for (idx, generator) in group.generators.iter().enumerate() {
            let element = PermWord { perm: generator.perm.clone(), word: vec![idx] };
            chain.add_element(element, group);
        }
        Ok(chain)
    }

    /// Word for the inverse of `element`, using generator orders.
    fn inverse_word(&self, element: &PermWord) -> Vec<usize> {
        let mut out = Vec::new();
        for &idx in element.word.iter().rev() {
            let order = self.generator_orders[idx];
            for _ in 0..order - 1 {
                out.push(idx);
            }
        }
        out
    }

    fn inverse(&self, element: &PermWord) -> PermWord {
        let mut perm = vec![0u32; element.perm.len()];
        for (i, &x) in element.perm.iter().enumerate() {
            perm[x as usize] = i as u32;
        }
        PermWord { perm, word: self.inverse_word(element) }
    }

    /// Sift an element through the chain; if a residue survives, record it
    /// as a strong generator at every level it stabilizes through and
    /// recompute the affected orbits, deepest first. An element whose
    /// residue ever sticks strictly enlarges some transversal, so the
    /// process reaches a fixpoint.
    fn add_element(&mut self, element: PermWord, group: &PlacementGroup) {
        let mut h = element;
        let mut level = 0;
        loop {
            if h.is_identity() {
                return;
            }
            if level == self.levels.len() {
                // New base point: the moved point with the largest orbit
                // under the full generator set, ties to the smallest point.
                let base = h
                    .perm
                    .iter()
                    .enumerate()
                    .filter(|&(i, &x)| i != x as usize)
                    .map(|(i, _)| i as u32)
                    .max_by_key(|&p| (orbit_size(group, p), std::cmp::Reverse(p)))
                    .expect("non-identity element moves a point");
                self.levels.push(Level::new(base, self.points));
            }
            let base = self.levels[level].base;
            let image = h.perm[base as usize];
            match self.levels[level].transversal.get(&image) {
                Some(representative) => {
                    h = self.inverse(representative).after(&h);
                    level += 1;
                }
                None => break,
            }
        }
        for j in 0..=level {
            let known = self.levels[j].generators.iter().any(|g| g.perm == h.perm);
            if !known {
                self.levels[j].generators.push(h.clone());
            }
        }
        for j in (0..=level).rev() {
            self.rebuild_orbit(j, group);
        }
    }

    fn rebuild_orbit(&mut self, level: usize, group: &PlacementGroup) {
        let generators = self.levels[level].generators.clone();
        let mut points: Vec<u32> = self.levels[level].transversal.keys().copied().collect();
        points.sort_unstable();
        let mut queue: VecDeque<u32> = points.into_iter().collect();
        let mut pending = Vec::new();
        while let Some(point) = queue.pop_front() {
            let through = self.levels[level].transversal[&point].clone();
            for generator in &generators {
                let image = generator.perm[point as usize];
                if let Some(representative) = self.levels[level].transversal.get(&image) {
                    // Schreier element stabilizing the base point.
                    let schreier = self
                        .inverse(representative)
                        .after(&generator.after(&through));
                    if !schreier.is_identity() {
                        pending.push(schreier);
                    }
                } else {
                    let entry = generator.after(&through);
                    self.levels[level].transversal.insert(image, entry);
                    queue.push_back(image);
                }
            }
        }
        for element in pending {
            self.add_element(element, group);
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.transversal.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Membership sift. On success the witness word, applied first to last,
    /// multiplies out to the candidate.
    pub fn membership(&self, candidate: &[u32]) -> Option<Vec<usize>> {
        let mut residue = PermWord { perm: candidate.to_vec(), word: Vec::new() };
        let mut prefix: Vec<&PermWord> = Vec::new();
        for level in &self.levels {
            let image = residue.perm[level.base as usize];
            let representative = level.transversal.get(&image)?;
            residue = self.inverse(representative).after(&residue);
            prefix.push(representative);
        }
        if !residue.is_identity() {
            return None;
        }
        // candidate = t_1 . t_2 . ... . t_r as functions, so the application
        // order is t_r first.
        let mut word = Vec::new();
        for representative in prefix.iter().rev() {
            word.extend(&representative.word);
        }
        Some(word)
    }
}

/// Membership verdict with a factorization witness.
pub struct MembershipWitness {
    pub word: Vec<usize>,
}

/// Decide membership of a full-width candidate permutation, with a witness
/// word in the group's generators when the answer is yes.
pub fn group_membership(
    group: &PlacementGroup,
    candidate: &[u32],
) -> Result<Option<MembershipWitness>> {
    if candidate.len() != group.points {
        return Err(Error::NotBijective { len: candidate.len() });
    }
    let chain = StabilizerChain::build(group)?;
    Ok(chain.membership(candidate).map(|word| MembershipWitness { word }))
}

/// Outcome of the ancilla-implementability search. A `None` circuit means
/// no element of the group at *this* width satisfies the constraints; wider
/// searches with more ancillas may still succeed, so the verdict carries its
/// width and ancilla budget.
#[derive(Debug)]
pub struct AncillaSearch {
    pub wires: usize,
    pub ancillas: Vec<(usize, u32)>,
    /// Whether the verdict came from full subgroup enumeration (tiny state
    /// spaces) rather than the coset walk. Both are exact at this width.
    pub exhaustive: bool,
    pub circuit: Option<Circuit>,
}

/// Search for a circuit over the group's placements computing `gate` on the
/// non-ancilla wires while restoring the given ancilla assignment.
///
/// The constraint set is pointwise, so the solutions form a coset: walking a
/// stabilizer chain whose base is the constrained points decides existence
/// exactly. Tiny state spaces are searched by full enumeration instead.
pub fn implementable_with_ancillas(
    group: &PlacementGroup,
    gate: &Gate,
    ancilla_assignment: &[(usize, u32)],
) -> Result<AncillaSearch> {
    if gate.k() != group.k {
        return Err(Error::AlphabetMismatch { left: group.k, right: gate.k() });
    }
    let mut is_ancilla = vec![false; group.wires];
    for &(wire, sym) in ancilla_assignment {
        if wire >= group.wires {
            return Err(Error::WireOutOfRange { wire, wire_count: group.wires });
        }
        if is_ancilla[wire] {
            return Err(Error::DuplicateWire(wire));
        }
        if sym >= group.k {
            return Err(Error::SymbolOutOfRange { symbol: sym, k: group.k });
        }
        is_ancilla[wire] = true;
    }
    let input_wires: Vec<usize> = (0..group.wires).filter(|&w| !is_ancilla[w]).collect();
    if input_wires.len() != gate.arity() {
        return Err(Error::ArityMismatch { left: gate.arity(), right: input_wires.len() });
    }

    // Constraints: on the ancilla-consistent slice, the full-width action is
    // the gate on input wires with ancillas restored.
    let mut state = vec![0u32; group.wires];
    for &(wire, sym) in ancilla_assignment {
        state[wire] = sym;
    }
    let mut constraints = Vec::with_capacity(gate.table_len());
    let mut buf = vec![0u32; gate.arity()];
    for (i, o) in gate.entries() {
        word::decode_into(group.k, i, &mut buf);
        for (&w, &s) in input_wires.iter().zip(&buf) {
            state[w] = s;
        }
        let source = word::encode(group.k, &state) as u32;
        word::decode_into(group.k, o, &mut buf);
        for (&w, &s) in input_wires.iter().zip(&buf) {
            state[w] = s;
        }
        let target = word::encode(group.k, &state) as u32;
        constraints.push((source, target));
    }

    let exhaustive = group.points <= EXHAUSTIVE_POINTS;
    let witness_word = if exhaustive {
        // Fully enumerate with words; definitive at this scale.
        let identity: Vec<u32> = (0..group.points as u32).collect();
        let mut words: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        words.insert(identity.clone(), Vec::new());
        let mut queue = VecDeque::new();
        queue.push_back(identity);
        let mut found: Option<Vec<usize>> = None;
        'outer: while let Some(current) = queue.pop_front() {
            if constraints
                .iter()
                .all(|&(s, t)| current[s as usize] == t)
            {
                found = Some(words[&current].clone());
                break 'outer;
            }
            for (idx, generator) in group.generators.iter().enumerate() {
                // next = generator applied after current
                let next: Vec<u32> = current.iter().map(|&x| generator.perm[x as usize]).collect();
                if !words.contains_key(&next) {
                    let mut w = words[&current].clone();
                    w.push(idx);
                    words.insert(next.clone(), w);
                    queue.push_back(next);
                }
            }
        }
        found
    } else {
        let base: Vec<u32> = constraints.iter().map(|&(s, _)| s).collect();
        let chain = StabilizerChain::build_with_base(group, &base)?;
        walk_coset(&chain, &constraints)
    };

    let circuit = match witness_word {
        None => None,
        Some(word) => Some(group.word_to_circuit(&word, input_wires, ancilla_assignment.to_vec())?),
    };
    Ok(AncillaSearch {
        wires: group.wires,
        ancillas: ancilla_assignment.to_vec(),
        exhaustive,
        circuit,
    })
}

/// Walk transversals level by level to satisfy pointwise constraints; the
/// solution set is a coset, so failure at any level is definitive.
fn walk_coset(chain: &StabilizerChain, constraints: &[(u32, u32)]) -> Option<Vec<usize>> {
    let mut built = PermWord::identity(chain.points);
    for (level, &(source, target)) in constraints.iter().enumerate() {
        debug_assert_eq!(chain.levels[level].base, source);
        // need: built . s (s first) sends source to target, s in the current
        // stabilizer; that is s(source) = built^{-1}(target).
        let needed = chain.inverse(&built).perm[target as usize];
        let representative = chain.levels[level].transversal.get(&needed)?;
        built = built.after(representative);
    }
    if constraints
        .iter()
        .all(|&(s, t)| built.perm[s as usize] == t)
    {
        Some(built.word)
    } else {
        None
    }
}
