//! Invariant computations: symbol counts, partition conservativity, and the
//! mod-m machinery classifying classes above the count-preserving gates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::{self, Word};

/// A set partition of the alphabet `0..k-1`. Blocks are kept sorted, and the
/// block list is ordered by smallest member, so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: u32,
    blocks: Vec<Vec<u32>>,
}

impl Partition {
    pub fn new(k: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        let mut seen = vec![false; k as usize];
        let mut normalized: Vec<Vec<u32>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::Parse { line: 0, message: "empty partition block".into() });
            }
            let mut block = block;
            block.sort_unstable();
            block.dedup();
            for &s in &block {
                if s >= k {
                    return Err(Error::SymbolOutOfRange { symbol: s, k });
                }
                if seen[s as usize] {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("symbol {} appears in two blocks", s + 1),
                    });
                }
                seen[s as usize] = true;
            }
            normalized.push(block);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Parse { line: 0, message: "partition does not cover the alphabet".into() });
        }
        normalized.sort_by_key(|b| b[0]);
        Ok(Partition { k, blocks: normalized })
    }

    /// The one-block partition; conservativity for it is vacuous.
    pub fn whole(k: u32) -> Result<Self> {
        Partition::new(k, vec![(0..k).collect()])
    }

    /// All singleton blocks; conservativity for it is full conservativity.
    pub fn singletons(k: u32) -> Result<Self> {
        Partition::new(k, (0..k).map(|s| vec![s]).collect())
    }

    /// The `(k-1, 1)` split that isolates the largest symbol.
    pub fn split_last(k: u32) -> Result<Self> {
        Partition::new(k, vec![(0..k - 1).collect(), vec![k - 1]])
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `s`.
    pub fn block_of(&self, s: u32) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&s).is_ok())
            .expect("symbol in some block")
    }

    pub fn is_whole(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.len() == self.k as usize
    }

    /// True when every block of `self` is a union of blocks of `finer`.
    pub fn coarsens(&self, finer: &Partition) -> bool {
        self.k == finer.k
            && finer
                .blocks
                .iter()
                .all(|fb| fb.iter().all(|&s| self.block_of(s) == self.block_of(fb[0])))
    }

    /// Apply a symbol permutation blockwise: block B maps to sigma(B).
    pub fn map_symbols(&self, sigma: &[u32]) -> Result<Partition> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&s| sigma[s as usize]).collect())
            .collect();
        Partition::new(self.k, blocks)
    }

    /// Display as 1-based blocks, e.g. `{1,2}{3}`.
    pub fn display(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|&s| (s + 1).to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect()
    }
}

/// Number of occurrences of symbol `s` in `w`.
pub fn count_symbol(w: &Word, s: u32) -> Result<usize> {
    if s >= w.k() {
        return Err(Error::SymbolOutOfRange { symbol: s, k: w.k() });
    }
    Ok(w.symbols().iter().filter(|&&x| x == s).count())
}

fn block_counts(partition: &Partition, symbols: &[u32], out: &mut [usize]) {
    out.iter_mut().for_each(|c| *c = 0);
    for &s in symbols {
        out[partition.block_of(s)] += 1;
    }
}

/// First input whose blockwise symbol counts change under the gate, if any.
pub fn lambda_violation(gate: &Gate, partition: &Partition) -> Result<Option<Word>> {
    if gate.k() != partition.k() {
        return Err(Error::AlphabetMismatch { left: gate.k(), right: partition.k() });
    }
    let n = gate.arity();
    let blocks = partition.block_count();
    let mut input = vec![0u32; n];
    let mut output = vec![0u32; n];
    let mut cin = vec![0usize; blocks];
    let mut cout = vec![0usize; blocks];
    for (i, o) in gate.entries() {
        word::decode_into(gate.k(), i, &mut input);
        word::decode_into(gate.k(), o, &mut output);
        block_counts(partition, &input, &mut cin);
        block_counts(partition, &output, &mut cout);
        if cin != cout {
            return Ok(Some(Word::new(gate.k(), input)?));
        }
    }
    Ok(None)
}

/// True when the gate preserves, per block, the total count of its symbols.
pub fn is_conservative_lambda(gate: &Gate, partition: &Partition) -> Result<bool> {
    Ok(lambda_violation(gate, partition)?.is_none())
}

/// The difference multiset of marked-symbol counts, reduced to its support
/// and gcd. `gcd_value == 0` means the gate preserves the count exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModProfile {
    pub marked: u32,
    pub diffs: BTreeSet<i64>,
    pub gcd_value: u64,
}

impl ModProfile {
    pub fn is_count_preserving(&self) -> bool {
        self.gcd_value == 0
    }
}

/// Difference profile with respect to the marked symbol (default: the
/// largest symbol).
pub fn mod_profile_with_marked(gate: &Gate, marked: u32) -> Result<ModProfile> {
    if marked >= gate.k() {
        return Err(Error::SymbolOutOfRange { symbol: marked, k: gate.k() });
    }
    let n = gate.arity();
    let mut input = vec![0u32; n];
    let mut output = vec![0u32; n];
    let mut diffs = BTreeSet::new();
    let mut g = 0u64;
    for (i, o) in gate.entries() {
        word::decode_into(gate.k(), i, &mut input);
        word::decode_into(gate.k(), o, &mut output);
        let cin = input.iter().filter(|&&s| s == marked).count() as i64;
        let cout = output.iter().filter(|&&s| s == marked).count() as i64;
        let d = cout - cin;
        diffs.insert(d);
        g = gcd(g, d.unsigned_abs());
    }
    Ok(ModProfile { marked, diffs, gcd_value: g })
}

pub fn mod_profile(gate: &Gate) -> ModProfile {
    mod_profile_with_marked(gate, gate.k() - 1).expect("largest symbol is valid")
}

/// Mod-m-respecting: all count differences are congruent to one shift mod m.
pub fn is_mod_respecting(gate: &Gate, m: u32) -> bool {
    debug_assert!(m >= 1);
    let profile = mod_profile(gate);
    let m = m as i64;
    let mut iter = profile.diffs.iter();
    let first = match iter.next() {
        Some(&d) => d.rem_euclid(m),
        None => return true,
    };
    iter.all(|&d| d.rem_euclid(m) == first)
}

/// Mod-m-preserving: all count differences vanish mod m.
pub fn is_mod_preserving(gate: &Gate, m: u32) -> bool {
    debug_assert!(m >= 1);
    let profile = mod_profile(gate);
    profile.diffs.iter().all(|&d| d.rem_euclid(m as i64) == 0)
}

/// First input whose marked-symbol count changes by a non-multiple of `m`.
pub fn mod_preserving_violation(gate: &Gate, m: u32) -> Result<Option<Word>> {
    let marked = gate.k() - 1;
    let n = gate.arity();
    let mut input = vec![0u32; n];
    let mut output = vec![0u32; n];
    for (i, o) in gate.entries() {
        word::decode_into(gate.k(), i, &mut input);
        word::decode_into(gate.k(), o, &mut output);
        let cin = input.iter().filter(|&&s| s == marked).count() as i64;
        let cout = output.iter().filter(|&&s| s == marked).count() as i64;
        if (cout - cin).rem_euclid(m as i64) != 0 {
            return Ok(Some(Word::new(gate.k(), input)?));
        }
    }
    Ok(None)
}

/// `m(F)`: the largest modulus for which the gate is mod-m-preserving, or 0
/// when the gate preserves the count outright. Computed as the gcd of the
/// difference set; a direct scan over candidate moduli gives the same value
/// and the equivalence is pinned by a test.
pub fn m_invariant(gate: &Gate) -> u32 {
    mod_profile(gate).gcd_value as u32
}

/// gcd of the `m` invariants over a gate list; 0 for the empty list. The
/// class generated over the count-preserving gates by the listed gates equals
/// the class indexed by the returned modulus (0 meaning no extra power,
/// 1 meaning everything).
pub fn classify_above_cons(gates: &[Gate]) -> Result<u32> {
    let mut g = 0u64;
    let mut k: Option<u32> = None;
    for gate in gates {
        match k {
            None => k = Some(gate.k()),
            Some(existing) if existing != gate.k() => {
                return Err(Error::AlphabetMismatch { left: existing, right: gate.k() });
            }
            _ => {}
        }
        g = gcd(g, m_invariant(gate) as u64);
    }
    Ok(g as u32)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_cc, make_tau};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn w(k: u32, s: &str) -> Word {
        Word::parse(k, s).unwrap()
    }

    fn random_gate(rng: &mut ChaCha8Rng, k: u32, arity: usize) -> Gate {
        let len = (k as usize).pow(arity as u32);
        let mut image: Vec<u32> = (0..len as u32).collect();
        image.shuffle(rng);
        Gate::new(k, arity, image).unwrap()
    }

    #[test]
    fn count_symbol_examples() {
        assert_eq!(count_symbol(&w(3, "121"), 2).unwrap(), 0);
        assert_eq!(count_symbol(&w(3, "133"), 2).unwrap(), 2);
        assert_eq!(count_symbol(&Word::empty(3).unwrap(), 2).unwrap(), 0);
        assert!(count_symbol(&w(3, "1"), 3).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![2], vec![]]).is_err());
        assert_eq!(Partition::split_last(3).unwrap().display(), "{1,2}{3}");
    }

    #[test]
    fn lambda_conservativity_examples() {
        let whole = Partition::whole(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_gate(&mut rng, 3, 2);
            assert!(is_conservative_lambda(&g, &whole).unwrap());
        }

        let singles = Partition::singletons(3).unwrap();
        let fredkinish = crate::constructors::make_controlled(
            &w(3, "1"),
            &crate::constructors::make_swap(&w(3, "1"), &w(3, "2")).unwrap(),
        )
        .unwrap();
        assert!(is_conservative_lambda(&fredkinish, &singles).unwrap());

        let cc2 = make_cc(2, 3).unwrap();
        let split = Partition::split_last(3).unwrap();
        assert_eq!(lambda_violation(&cc2, &split).unwrap(), Some(w(3, "111")));
    }

    #[test]
    fn coarser_partitions_inherit_conservativity() {
        let singles = Partition::singletons(3).unwrap();
        let split = Partition::split_last(3).unwrap();
        let whole = Partition::whole(3).unwrap();
        assert!(split.coarsens(&singles));
        assert!(whole.coarsens(&split));
        // conservative gates are too rare to sample; build them directly as
        // products of within-class transpositions
        let class_taus = [
            make_tau(&w(3, "12"), &w(3, "21")).unwrap(),
            make_tau(&w(3, "13"), &w(3, "31")).unwrap(),
            make_tau(&w(3, "23"), &w(3, "32")).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let mut g = Gate::identity(3, 2).unwrap();
            for tau in &class_taus {
                if rng.gen_bool(0.5) {
                    g = tau.compose(&g).unwrap();
                }
            }
            assert!(is_conservative_lambda(&g, &singles).unwrap());
            assert!(is_conservative_lambda(&g, &split).unwrap());
            assert!(is_conservative_lambda(&g, &whole).unwrap());
        }
        // and a split-conservative gate that is not fully conservative
        let g = make_tau(&w(3, "11"), &w(3, "22")).unwrap();
        assert!(!is_conservative_lambda(&g, &singles).unwrap());
        assert!(is_conservative_lambda(&g, &split).unwrap());
        assert!(is_conservative_lambda(&g, &whole).unwrap());
    }

    #[test]
    fn mod_profile_examples() {
        let id = Gate::identity(3, 2).unwrap();
        let p = mod_profile(&id);
        assert_eq!(p.diffs.iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(p.gcd_value, 0);

        let cc2 = make_cc(2, 3).unwrap();
        let p = mod_profile(&cc2);
        assert_eq!(p.diffs.iter().copied().collect::<Vec<_>>(), vec![-2, 0, 2]);
        assert_eq!(p.gcd_value, 2);

        let tau13 = make_tau(&w(3, "1"), &w(3, "3")).unwrap();
        let p = mod_profile(&tau13);
        assert_eq!(p.diffs.iter().copied().collect::<Vec<_>>(), vec![-1, 0, 1]);
        assert_eq!(p.gcd_value, 1);
    }

    #[test]
    fn mod_respecting_and_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let g = random_gate(&mut rng, 3, 2);
            assert!(is_mod_preserving(&g, 1));
        }
        let cc2 = make_cc(2, 3).unwrap();
        assert!(is_mod_preserving(&cc2, 2));
        assert!(!is_mod_respecting(&cc2, 4));
    }

    #[test]
    fn respecting_equals_preserving_over_three_symbols() {
        // 500 seeded gates, m <= 6; then the binary negative control
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..500 {
            let arity = rng.gen_range(1..=2);
            let g = random_gate(&mut rng, 3, arity);
            for m in 2..=6 {
                assert_eq!(
                    is_mod_respecting(&g, m),
                    is_mod_preserving(&g, m),
                    "mismatch at m={m} for {g:?}"
                );
            }
        }
        // Over two symbols the single-wire flip respects mod 2 with shift 1.
        let flip = make_tau(&Word::new(2, vec![0]).unwrap(), &Word::new(2, vec![1]).unwrap()).unwrap();
        assert!(is_mod_respecting(&flip, 2));
        assert!(!is_mod_preserving(&flip, 2));
    }

    #[test]
    fn m_invariant_examples() {
        assert_eq!(m_invariant(&Gate::identity(3, 1).unwrap()), 0);
        for m in 1..=6 {
            assert_eq!(m_invariant(&make_cc(m, 3).unwrap()), m);
        }
    }

    #[test]
    fn m_invariant_matches_direct_definition() {
        // gcd of diffs equals the largest preserving modulus, checked directly
        // for every m up to 12 on a seeded sample.
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..120 {
            let arity = rng.gen_range(1..=2);
            let g = random_gate(&mut rng, 3, arity);
            let computed = m_invariant(&g);
            let mut largest = 0;
            for m in 1..=12 {
                if is_mod_preserving(&g, m) {
                    largest = m;
                }
            }
            if mod_profile(&g).is_count_preserving() {
                assert_eq!(computed, 0);
                assert_eq!(largest, 12, "count-preserving gates preserve every modulus");
            } else {
                assert_eq!(computed, largest, "gcd route disagrees with direct scan on {g:?}");
            }
        }
    }

    #[test]
    fn tensor_gcd_law_on_sampled_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..60 {
            let fa = rng.gen_range(1..=2);
            let f = random_gate(&mut rng, 3, fa);
            let ga = rng.gen_range(1..=2);
            let g = random_gate(&mut rng, 3, ga);
            let t = f.tensor(&g).unwrap();
            assert_eq!(
                m_invariant(&t) as u64,
                gcd(m_invariant(&f) as u64, m_invariant(&g) as u64)
            );
        }
    }

    #[test]
    fn diff_sum_vanishes() {
        // bijectivity balances the count differences over all inputs
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let g = random_gate(&mut rng, 3, 2);
            let mut total = 0i64;
            let mut input = vec![0u32; 2];
            let mut output = vec![0u32; 2];
            for (i, o) in g.entries() {
                word::decode_into(3, i, &mut input);
                word::decode_into(3, o, &mut output);
                total += output.iter().filter(|&&s| s == 2).count() as i64
                    - input.iter().filter(|&&s| s == 2).count() as i64;
            }
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_above_cons(&[]).unwrap(), 0);
        let cc4 = make_cc(4, 3).unwrap();
        let cc6 = make_cc(6, 3).unwrap();
        assert_eq!(classify_above_cons(&[cc4, cc6]).unwrap(), 2);
        let tau13 = make_tau(&w(3, "1"), &w(3, "3")).unwrap();
        assert_eq!(classify_above_cons(&[tau13]).unwrap(), 1);

        let mixed = [make_cc(2, 3).unwrap(), make_cc(2, 4).unwrap()];
        assert!(classify_above_cons(&mixed).is_err());
    }

    #[test]
    fn classify_is_stable_under_marked_fixing_conjugation() {
        // m(F^sigma) = m(F) whenever sigma fixes the marked symbol
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let sigma = [1u32, 0, 2]; // swaps the two unmarked symbols
        for _ in 0..50 {
            let g = random_gate(&mut rng, 3, 2);
            let conj = crate::lattice::act_sigma(&g, &sigma).unwrap();
            assert_eq!(m_invariant(&g), m_invariant(&conj));
        }
    }
}
