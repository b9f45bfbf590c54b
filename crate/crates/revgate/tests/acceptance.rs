//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use revgate::analysis::{self, Partition};
use revgate::constructors::{make_cc, make_tau};
use revgate::files;
use revgate::group::{closure_bfs, PlacementGroup, StabilizerChain};
use revgate::lattice;
use revgate::synth::{self, GeneratorLibrary};
use revgate::word;
use revgate::{Circuit, CircuitBuilder, Gate, Word};

fn report(number: u32, name: &str, ok: bool) {
    println!("ACCEPTANCE {number:2} [{}] {name}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance criterion {number} failed: {name}");
}

fn random_gate(rng: &mut ChaCha8Rng, k: u32, arity: usize) -> Gate {
    let len = (k as usize).pow(arity as u32);
    let mut image: Vec<u32> = (0..len as u32).collect();
    image.shuffle(rng);
    Gate::new(k, arity, image).unwrap()
}

fn all_permutation_gates(k: u32, arity: usize) -> Vec<Gate> {
    let len = (k as usize).pow(arity as u32);
    let mut items: Vec<u32> = (0..len as u32).collect();
    let mut out = Vec::new();
    permute(&mut items, 0, &mut |t| {
        out.push(Gate::new(k, arity, t.to_vec()).unwrap());
    });
    out
}

fn permute(items: &mut [u32], start: usize, visit: &mut impl FnMut(&[u32])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[test]
fn criterion_01_synth_all_soundness() {
    let lib = GeneratorLibrary::all_gen(3).unwrap();
    let mut ok = true;
    for gate in all_permutation_gates(3, 1) {
        let circuit = synth::synth_all(&gate).unwrap();
        ok &= circuit.extract_gate().unwrap() == gate && lib.certifies(&circuit);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11);
    for _ in 0..200 {
        let gate = random_gate(&mut rng, 3, 2);
        let circuit = synth::synth_all(&gate).unwrap();
        ok &= circuit.extract_gate().unwrap() == gate && lib.certifies(&circuit);
    }
    report(1, "unrestricted synthesis: 6 single-wire + 200 random two-wire gates", ok);
}

#[test]
fn criterion_02_synth_cons_soundness() {
    let singles = Partition::singletons(3).unwrap();
    let conservative: Vec<Gate> = all_permutation_gates(3, 2)
        .into_iter()
        .filter(|g| analysis::is_conservative_lambda(g, &singles).unwrap())
        .collect();
    let mut ok = conservative.len() == 8;
    let lib = GeneratorLibrary::cons_gen(3).unwrap();
    for gate in &conservative {
        let circuit = synth::synth_cons(gate).unwrap();
        ok &= &circuit.extract_gate().unwrap() == gate && lib.certifies(&circuit);
    }
    report(2, "conservative synthesis: all 8 conservative two-wire gates", ok);
}

#[test]
fn criterion_03_synth_lambda_soundness() {
    let split = Partition::split_last(3).unwrap();
    let targets: Vec<Gate> = all_permutation_gates(3, 2)
        .into_iter()
        .filter(|g| analysis::is_conservative_lambda(g, &split).unwrap())
        .collect();
    // blockwise classes of sizes 4, 4, 1 give 4! * 4! = 576 such gates
    let mut ok = targets.len() == 576;
    let lib = GeneratorLibrary::lambda_gen(&split).unwrap();
    for gate in &targets {
        let circuit = synth::synth_cons_lambda(gate, &split).unwrap();
        ok &= &circuit.extract_gate().unwrap() == gate && lib.certifies(&circuit);
    }
    report(3, "partition synthesis: every {1,2}/{3}-conservative two-wire gate", ok);
}

#[test]
fn criterion_04_mod_classification() {
    let mut ok = true;
    for m in 1..=6 {
        // brute-force difference gcd over all inputs of CC_m
        let cc = make_cc(m, 3).unwrap();
        let n = cc.arity();
        let mut g = 0u64;
        for (i, o) in cc.entries() {
            let cin = word::decode(3, n, i).iter().filter(|&&s| s == 2).count() as i64;
            let cout = word::decode(3, n, o).iter().filter(|&&s| s == 2).count() as i64;
            g = gcd(g, (cout - cin).unsigned_abs());
        }
        ok &= g == m as u64;
        ok &= analysis::m_invariant(&cc) == m;
    }
    let cc4 = make_cc(4, 3).unwrap();
    let cc6 = make_cc(6, 3).unwrap();
    ok &= analysis::classify_above_cons(&[cc4, cc6]).unwrap() == 2;
    let tau13 = make_tau(&Word::parse(3, "1").unwrap(), &Word::parse(3, "3").unwrap()).unwrap();
    ok &= analysis::classify_above_cons(&[tau13]).unwrap() == 1;
    report(4, "mod classification: m(CC_m) = m, gcd classes", ok);
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn criterion_05_no_mod_shifter() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x505);
    let mut ok = true;
    for _ in 0..500 {
        let arity = rng.gen_range(1..=2);
        let gate = random_gate(&mut rng, 3, arity);
        for m in 1..=6 {
            ok &= analysis::is_mod_respecting(&gate, m) == analysis::is_mod_preserving(&gate, m);
        }
    }
    // negative control over the binary alphabet: the single-wire flip
    // respects mod 2 with a nonzero shift
    let flip = make_tau(&Word::new(2, vec![0]).unwrap(), &Word::new(2, vec![1]).unwrap()).unwrap();
    ok &= analysis::is_mod_respecting(&flip, 2) && !analysis::is_mod_preserving(&flip, 2);
    report(5, "respecting = preserving over 3 symbols; binary control fails", ok);
}

#[test]
fn criterion_06_tensor_gcd() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x606);
    let mut ok = true;
    for _ in 0..100 {
        let fa = rng.gen_range(1..=2);
        let ga = rng.gen_range(1..=2);
        let f = random_gate(&mut rng, 3, fa);
        let g = random_gate(&mut rng, 3, ga);
        let t = f.tensor(&g).unwrap();
        ok &= analysis::m_invariant(&t) as u64
            == gcd(analysis::m_invariant(&f) as u64, analysis::m_invariant(&g) as u64);
    }
    report(6, "tensor invariant: m(F tensor G) = gcd(m(F), m(G)) on 100 pairs", ok);
}

#[test]
fn criterion_07_cc_recovery() {
    let cc2 = make_cc(2, 3).unwrap();
    let circuit = synth::synth_cc_from_gate(&cc2).unwrap();
    let mut ok = circuit.extract_gate().unwrap() == cc2;

    let seed = make_cc(2, 3).unwrap().tensor(&make_cc(3, 3).unwrap()).unwrap();
    let circuit = synth::synth_cc_from_gate(&seed).unwrap();
    ok &= circuit.extract_gate().unwrap() == make_cc(1, 3).unwrap();
    report(7, "CC recovery: CC_2 from itself, CC_1 from CC_2 tensor CC_3", ok);
}

#[test]
fn criterion_08_nonfingen_certificate() {
    let mut ok = true;
    for n in 0..=10 {
        let cert = lattice::nonfingen_certificate(n, 3).unwrap();
        ok &= cert.even_counts.iter().all(|c| c.flip_count % 2 == 0);
        ok &= cert.extremal.flip_count == 1;
        ok &= cert.conclusion == lattice::Conclusion::UnreachableParity;
    }
    report(8, "parity certificate for T_0..T_n versus T_{n+1}, n <= 10", ok);
}

#[test]
fn criterion_09_oracle_agreement() {
    let tau01 = make_tau(&Word::parse(3, "1").unwrap(), &Word::parse(3, "2").unwrap())
        .unwrap()
        .shared();
    let tau12 = make_tau(&Word::parse(3, "2").unwrap(), &Word::parse(3, "3").unwrap())
        .unwrap()
        .shared();

    let one_wire = PlacementGroup::new(
        3,
        1,
        vec![(tau01.clone(), vec![0]), (tau12.clone(), vec![0])],
    )
    .unwrap();
    let closure = closure_bfs(&one_wire, 100).unwrap();
    let chain = StabilizerChain::build(&one_wire).unwrap();
    let mut ok = closure.order() == 6 && chain.order() == 6;

    let two_wires = PlacementGroup::new(
        3,
        2,
        vec![
            (tau01.clone(), vec![0]),
            (tau12.clone(), vec![0]),
            (tau01, vec![1]),
            (tau12, vec![1]),
        ],
    )
    .unwrap();
    let closure = closure_bfs(&two_wires, 1000).unwrap();
    let chain = StabilizerChain::build(&two_wires).unwrap();
    ok &= closure.order() == 72 && chain.order() == 72;

    // every closure element is a chain member with a valid witness, and a
    // foreign transposition is rejected by both
    for candidate in &closure.elements {
        match chain.membership(candidate) {
            None => ok = false,
            Some(word) => {
                let mut acc: Vec<u32> = (0..two_wires.points() as u32).collect();
                for idx in word {
                    let perm = two_wires.generators()[idx].permutation();
                    acc = acc.iter().map(|&x| perm[x as usize]).collect();
                }
                ok &= &acc == candidate;
            }
        }
    }
    let foreign = make_tau(&Word::parse(3, "11").unwrap(), &Word::parse(3, "12").unwrap()).unwrap();
    let expanded = two_wires.expand_gate(&foreign).unwrap();
    ok &= chain.membership(&expanded).is_none();
    ok &= !closure.contains(&expanded);
    report(9, "closure orders 6 and 72 match the chain; verdicts cross-check", ok);
}

#[test]
fn criterion_10_base_change_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A0);
    let mut ok = true;
    let mut checked = 0;
    for k in [2u32, 3] {
        for _ in 0..30 {
            let arity = rng.gen_range(1..=3);
            let mut builder = CircuitBuilder::new(k, arity);
            for _ in 0..rng.gen_range(1..=4) {
                let width = rng.gen_range(1..=arity);
                let gate = random_gate(&mut rng, k, width);
                let mut wires: Vec<usize> = (0..arity).collect();
                wires.shuffle(&mut rng);
                wires.truncate(width);
                builder.gate(gate.shared(), wires);
            }
            let circuit = builder.build().unwrap();
            let gate = circuit.extract_gate().unwrap();
            let lifted = lattice::lift_circuit(&circuit).unwrap();
            ok &= lifted.extract_gate().unwrap() == lattice::base_change(&gate).unwrap();
            checked += 1;
        }
    }
    ok &= checked >= 50;
    for _ in 0..200 {
        let f = random_gate(&mut rng, 3, 2);
        let g = random_gate(&mut rng, 3, 2);
        if f != g {
            ok &= lattice::base_change(&f).unwrap() != lattice::base_change(&g).unwrap();
        }
    }
    report(10, "base change: extract(lift(C)) transfers exactly; injective", ok);
}

#[test]
fn criterion_11_format_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B0);
    let mut ok = true;
    for _ in 0..1000 {
        let k = rng.gen_range(2..=4);
        let arity = rng.gen_range(0..=3);
        let gate = random_gate(&mut rng, k, arity);
        let text = files::serialize_gate(&gate);
        let reparsed = files::parse_gate(&text).unwrap();
        ok &= files::serialize_gate(&reparsed) == text && reparsed == gate;
    }
    for _ in 0..200 {
        let k = rng.gen_range(2..=3);
        let wires = rng.gen_range(1..=3);
        let mut builder = CircuitBuilder::new(k, wires);
        for _ in 0..rng.gen_range(0..=5) {
            let width = rng.gen_range(1..=wires);
            let gate = random_gate(&mut rng, k, width);
            let mut at: Vec<usize> = (0..wires).collect();
            at.shuffle(&mut rng);
            at.truncate(width);
            builder.gate(gate.shared(), at);
        }
        let circuit = builder.build().unwrap();
        let text = files::serialize_circuit(&circuit);
        let reparsed = files::parse_circuit(&text, None).unwrap();
        ok &= files::serialize_circuit(&reparsed) == text;
        ok &= behaves_identically(&circuit, &reparsed);
    }
    report(11, "formats: 1000 gates and 200 circuits round-trip byte-identically", ok);
}

fn behaves_identically(a: &Circuit, b: &Circuit) -> bool {
    let len = (a.k() as usize).pow(a.input_count() as u32);
    (0..len).all(|index| {
        let input = Word::from_index(a.k(), a.input_count(), index).unwrap();
        a.simulate(&input).unwrap() == b.simulate(&input).unwrap()
    })
}
